#include "cdpa/permutation.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace cdpa {

const char* method_name(PermutationMethod m) noexcept {
  switch (m) {
    case PermutationMethod::Identity: return "identity";
    case PermutationMethod::Provided: return "provided";
    case PermutationMethod::Dspfp: return "dspfp";
    case PermutationMethod::Exhaustive: return "exhaustive";
  }
  return "unknown";
}

std::vector<Index> identity_permutation(Index p) {
  std::vector<Index> perm(static_cast<std::size_t>(p));
  std::iota(perm.begin(), perm.end(), Index{0});
  return perm;
}

bool is_bijection(const std::vector<Index>& perm) {
  std::vector<char> seen(perm.size(), 0);
  for (Index v : perm) {
    if (v < 0 || static_cast<std::size_t>(v) >= perm.size() || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = 1;
  }
  return true;
}

Matrix permute_rows(const Matrix& m, const std::vector<Index>& perm) {
  if (static_cast<Index>(perm.size()) != m.rows())
    throw Error(Errc::BadDimensions, "permutation length does not match row count");
  Matrix out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) out.row(i) = m.row(perm[static_cast<std::size_t>(i)]);
  return out;
}

std::string permutation_to_json(const std::vector<Index>& perm) {
  return nlohmann::json(perm).dump();
}

std::vector<Index> permutation_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::Parse, std::string("permutation JSON: ") + e.what());
  }
  if (!j.is_array()) throw Error(Errc::Parse, "permutation JSON must be an array of indices");
  std::vector<Index> perm;
  perm.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw Error(Errc::Parse, "permutation entries must be integers");
    perm.push_back(v.get<Index>());
  }
  if (!is_bijection(perm)) throw Error(Errc::Parse, "permutation is not a bijection on 0..p-1");
  return perm;
}

std::vector<Index> read_permutation_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open permutation file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return permutation_from_json(ss.str());
}

}  // namespace cdpa
