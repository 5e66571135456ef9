#include "cdpa/matrix_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace cdpa::io {

namespace {

constexpr std::array<char, 4> kMagic{'C', 'D', 'P', 'M'};

static_assert(std::endian::native == std::endian::little,
              "binary matrix format assumes a little-endian host");

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\r' || s[b] == '"')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\r' || s[e - 1] == '"')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (*b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e;
}

}  // namespace

TextMatrix read_delimited(std::istream& in, const std::string& source) {
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    lines.emplace_back(lineno, line);
  }
  if (lines.empty()) throw Error(Errc::Parse, source + ": no data rows");

  const char delim = lines.front().second.find('\t') != std::string::npos ? '\t' : ',';
  std::vector<std::vector<std::string>> cells;
  cells.reserve(lines.size());
  for (const auto& [no, l] : lines) cells.push_back(split(l, delim));

  TextMatrix tm;
  double tmp = 0.0;
  // Header: any cell after the first that is not numeric.
  bool header = false;
  for (std::size_t j = 1; j < cells.front().size(); ++j)
    if (!parse_double(cells.front()[j], tmp)) header = true;
  if (cells.front().size() == 1 && !parse_double(cells.front()[0], tmp)) header = true;
  const std::size_t first_data = header ? 1 : 0;
  if (first_data >= cells.size()) throw Error(Errc::Parse, source + ": header without data rows");

  bool row_names = !parse_double(cells[first_data][0], tmp);
  const std::size_t offset = row_names ? 1 : 0;
  const std::size_t ncols = cells[first_data].size() - offset;
  if (ncols == 0) throw Error(Errc::Parse, source + ": no numeric columns");

  if (header) {
    const auto& h = cells.front();
    const std::size_t start = (h.size() == ncols + offset) ? offset : 0;
    for (std::size_t j = start; j < h.size(); ++j) tm.column_names.push_back(h[j]);
  }

  const std::size_t nrows = cells.size() - first_data;
  tm.values.resize(static_cast<Index>(nrows), static_cast<Index>(ncols));
  for (std::size_t i = 0; i < nrows; ++i) {
    const auto& row = cells[first_data + i];
    const std::size_t no = lines[first_data + i].first;
    if (row.size() != ncols + offset) {
      throw Error(Errc::Parse, source + ":" + std::to_string(no) + ": expected " +
                                   std::to_string(ncols + offset) + " fields, found " +
                                   std::to_string(row.size()));
    }
    if (row_names) tm.row_names.push_back(row[0]);
    for (std::size_t j = 0; j < ncols; ++j) {
      double v = 0.0;
      if (!parse_double(row[j + offset], v)) {
        throw Error(Errc::Parse, source + ":" + std::to_string(no) + ": field " +
                                     std::to_string(j + offset + 1) + " is not a number: '" +
                                     row[j + offset] + "'");
      }
      tm.values(static_cast<Index>(i), static_cast<Index>(j)) = v;
    }
  }
  return tm;
}

TextMatrix read_delimited_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  return read_delimited(in, path.string());
}

void write_delimited(std::ostream& out, const Matrix& m, char delimiter) {
  out << std::setprecision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << delimiter;
      out << m(i, j);
    }
    out << '\n';
  }
}

Matrix read_binary(std::istream& in, const std::string& source) {
  std::array<char, 4> magic{};
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  in.read(magic.data(), 4);
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in || magic != kMagic) throw Error(Errc::Parse, source + ": bad binary matrix header");
  Matrix m(rows, cols);
  const auto bytes = static_cast<std::streamsize>(sizeof(double) * rows * static_cast<std::size_t>(cols));
  in.read(reinterpret_cast<char*>(m.data()), bytes);
  if (in.gcount() != bytes) throw Error(Errc::Parse, source + ": truncated binary payload");
  return m;
}

void write_binary(std::ostream& out, const Matrix& m) {
  const auto rows = static_cast<std::uint32_t>(m.rows());
  const auto cols = static_cast<std::uint32_t>(m.cols());
  out.write(kMagic.data(), 4);
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
}

Matrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::array<char, 4> head{};
  in.read(head.data(), 4);
  const bool binary = in.gcount() == 4 && head == kMagic;
  in.clear();
  in.seekg(0);
  if (binary) return read_binary(in, path.string());
  return read_delimited(in, path.string()).values;
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  const auto ext = path.extension().string();
  if (ext == ".csv" || ext == ".tsv" || ext == ".txt") {
    std::ofstream out(path);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    write_delimited(out, m, ext == ".tsv" ? '\t' : ',');
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  write_binary(out, m);
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

}  // namespace cdpa::io
