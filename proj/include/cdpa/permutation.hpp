#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cdpa/types.hpp"

namespace cdpa {

enum class PermutationMethod { Identity, Provided, Dspfp, Exhaustive };

const char* method_name(PermutationMethod m) noexcept;

/// Row alignment of the zero-padded second channel onto the first.
/// Row i of P M is row perm[i] of M.
struct PermutationPlan {
  std::vector<Index> perm;
  double objective = 0.0;  // ||Q1^T P Q2A||_F^2 = sum of squared cosines
  PermutationMethod method = PermutationMethod::Identity;

  Index size() const { return static_cast<Index>(perm.size()); }
};

std::vector<Index> identity_permutation(Index p);
bool is_bijection(const std::vector<Index>& perm);

/// P M for the row permutation `perm`.
Matrix permute_rows(const Matrix& m, const std::vector<Index>& perm);

/// One-line JSON array of 0-based indices.
std::string permutation_to_json(const std::vector<Index>& perm);
std::vector<Index> permutation_from_json(std::string_view text);
std::vector<Index> read_permutation_file(const std::filesystem::path& path);

}  // namespace cdpa
