#include "dsc/matrix_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace dsc {

void write_matrix(std::ostream& out, const Eigen::Ref<const Matrix>& mat) {
  out << mat.rows() << ' ' << mat.cols() << '\n';
  char buf[40];
  for (Index i = 0; i < mat.rows(); ++i) {
    for (Index j = 0; j < mat.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", mat(i, j));
      out << buf << (j + 1 < mat.cols() ? ' ' : '\n');
    }
  }
  if (mat.cols() == 0 && mat.rows() > 0) out << '\n';
}

void write_matrix(const std::string& path, const Eigen::Ref<const Matrix>& mat) {
  std::ostringstream oss;
  write_matrix(oss, mat);
  write_file_atomic(path, oss.str());
}

Matrix read_matrix(std::istream& in, const std::string& context) {
  long long rows = -1, cols = -1;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0)
    throw IoError("bad matrix header in " + context);
  Matrix mat(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    for (long long j = 0; j < cols; ++j) {
      double value = 0.0;
      if (!(in >> value))
        throw IoError("truncated matrix data in " + context + " at entry (" +
                      std::to_string(i) + "," + std::to_string(j) + ")");
      mat(i, j) = value;
    }
  }
  return mat;
}

Matrix read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix file: " + path);
  return read_matrix(in, path);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + tmp);
    out << content;
    if (!out) throw IoError("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename failed for " + path + ": " + ec.message());
}

}  // namespace dsc
