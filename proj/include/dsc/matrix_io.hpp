#pragma once

#include "dsc/types.hpp"

#include <iosfwd>
#include <string>

namespace dsc {

// Plain text matrix format: first line "rows cols", then the entries in
// row-major order, 17 significant digits. The reader accepts any whitespace
// layout between tokens.

void write_matrix(std::ostream& out, const Eigen::Ref<const Matrix>& mat);
void write_matrix(const std::string& path, const Eigen::Ref<const Matrix>& mat);

Matrix read_matrix(std::istream& in, const std::string& context = "<stream>");
Matrix read_matrix(const std::string& path);

/// Writes `content` to `path` via a temporary file + rename, so readers never
/// observe a partially written file.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace dsc
