#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cdpa/types.hpp"

namespace cdpa::io {

// Delimited text: rows are variables, columns are samples. A header row and a
// leading row-name column are detected and skipped when their cells are not
// numeric. Tab is used when the first line contains one, comma otherwise.
struct TextMatrix {
  Matrix values;
  std::vector<std::string> row_names;
  std::vector<std::string> column_names;
};
TextMatrix read_delimited(std::istream& in, const std::string& source = "<stream>");
TextMatrix read_delimited_file(const std::filesystem::path& path);
void write_delimited(std::ostream& out, const Matrix& m, char delimiter = ',');

// Binary layout, little-endian: "CDPM", u32 rows, u32 cols, rows*cols f64 in
// column-major order.
Matrix read_binary(std::istream& in, const std::string& source = "<stream>");
void write_binary(std::ostream& out, const Matrix& m);

// Dispatch on content: files starting with the magic are binary, anything else
// is parsed as delimited text.
Matrix read_matrix(const std::filesystem::path& path);
// .csv / .tsv / .txt are written as text, everything else as binary.
void write_matrix(const std::filesystem::path& path, const Matrix& m);

}  // namespace cdpa::io
