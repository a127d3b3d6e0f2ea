#include "woldkit/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace woldkit {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void fail(const std::string& what) {
  throw InputError("matrix market: " + what);
}

// Reads the next line that is neither blank nor a % comment.
bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '%') continue;
    return true;
  }
  return false;
}

}  // namespace

ComplexMatrix read_matrix_market(std::istream& in) {
  std::string banner;
  if (!std::getline(in, banner)) fail("empty stream");
  std::istringstream bs(banner);
  std::string magic, object, format, field, symmetry;
  bs >> magic >> object >> format >> field >> symmetry;
  if (lower(magic) != "%%matrixmarket") fail("missing %%MatrixMarket banner");
  if (lower(object) != "matrix") fail("only matrix objects are supported");
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (format != "array" && format != "coordinate")
    fail("unknown format '" + format + "'");
  const bool complex_field = field == "complex";
  if (!complex_field && field != "real" && field != "integer")
    fail("unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric" &&
      symmetry != "hermitian" && symmetry != "skew-symmetric")
    fail("unsupported symmetry '" + symmetry + "'");

  std::string line;
  if (!next_data_line(in, line)) fail("missing size line");
  std::istringstream sizes(line);

  auto mirror = [&](ComplexMatrix& m, Index i, Index j, Complex v) {
    m(i, j) = v;
    if (i == j || symmetry == "general") return;
    if (symmetry == "symmetric")
      m(j, i) = v;
    else if (symmetry == "hermitian")
      m(j, i) = std::conj(v);
    else  // skew-symmetric
      m(j, i) = -v;
  };

  if (format == "array") {
    Index rows = 0, cols = 0;
    if (!(sizes >> rows >> cols)) fail("bad array size line");
    if (rows < 0 || cols < 0) fail("negative dimensions");
    if (symmetry != "general" && rows != cols)
      fail("symmetric storage requires a square matrix");
    ComplexMatrix m = ComplexMatrix::Zero(rows, cols);
    // Array data is column-major; symmetric variants store the lower
    // triangle only.
    for (Index j = 0; j < cols; ++j) {
      const Index first = symmetry == "general"
                              ? 0
                              : (symmetry == "skew-symmetric" ? j + 1 : j);
      for (Index i = first; i < rows; ++i) {
        double re = 0.0, im = 0.0;
        if (!(in >> re)) fail("truncated array data");
        if (complex_field && !(in >> im)) fail("truncated complex entry");
        mirror(m, i, j, Complex(re, im));
      }
    }
    if (!m.allFinite()) fail("non-finite entries");
    return m;
  }

  Index rows = 0, cols = 0, nnz = 0;
  if (!(sizes >> rows >> cols >> nnz)) fail("bad coordinate size line");
  if (rows < 0 || cols < 0 || nnz < 0) fail("negative dimensions");
  if (symmetry != "general" && rows != cols)
    fail("symmetric storage requires a square matrix");
  ComplexMatrix m = ComplexMatrix::Zero(rows, cols);
  for (Index entry = 0; entry < nnz; ++entry) {
    Index i = 0, j = 0;
    double re = 0.0, im = 0.0;
    if (!(in >> i >> j >> re)) fail("truncated coordinate data");
    if (complex_field && !(in >> im)) fail("truncated complex entry");
    if (i < 1 || i > rows || j < 1 || j > cols)
      fail("coordinate entry out of bounds");
    mirror(m, i - 1, j - 1, Complex(re, im));
  }
  if (!m.allFinite()) fail("non-finite entries");
  return m;
}

ComplexMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path.string() + "'");
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const ComplexMatrix& m) {
  out << "%%MatrixMarket matrix array complex general\n";
  out << m.rows() << " " << m.cols() << "\n";
  char buf[64];
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g\n", m(i, j).real(),
                    m(i, j).imag());
      out << buf;
    }
}

void write_matrix_market(const std::filesystem::path& path,
                         const ComplexMatrix& m) {
  std::ofstream out(path);
  if (!out)
    throw InputError("matrix market: cannot write '" + path.string() + "'");
  write_matrix_market(out, m);
  out.flush();
  if (!out)
    throw InputError("matrix market: write failed for '" + path.string() +
                     "'");
}

}  // namespace woldkit
