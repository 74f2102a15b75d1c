#include "vpgrad/matrix_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace vpgrad {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_matrix(std::ostream& os, const DenseMatrix& x, EntryKind kind) {
  const bool real = kind == EntryKind::Real;
  os << x.rows() << ' ' << x.cols() << ' ' << (real ? "real" : "complex") << '\n';
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      const Complex v = x(i, j);
      if (real) {
        if (v.imag() != 0.0) throw InputError("write_matrix: real output of a matrix with imaginary parts");
        os << format_double(v.real()) << '\n';
      } else {
        os << format_double(v.real()) << ' ' << format_double(v.imag()) << '\n';
      }
    }
  }
}

void write_matrix_file(const std::string& path, const DenseMatrix& x, EntryKind kind) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_matrix(os, x, kind);
  if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

namespace {

double parse_double(const std::string& token, std::size_t line) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw InputError("matrix file line " + std::to_string(line) + ": bad number '" + token + "'");
  }
  if (!std::isfinite(v)) throw InputError("matrix file line " + std::to_string(line) + ": non-finite value");
  return v;
}

Index parse_dim(const std::string& token) {
  Index v = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size() || v == 0) {
    throw InputError("matrix file header: bad dimension '" + token + "'");
  }
  return v;
}

}  // namespace

MatrixFile read_matrix(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("matrix file: missing header");
  std::istringstream header(line);
  std::string rows_tok, cols_tok, kind_tok, extra;
  if (!(header >> rows_tok >> cols_tok >> kind_tok) || (header >> extra)) {
    throw InputError("matrix file header must be '<rows> <cols> complex|real'");
  }
  MatrixFile out;
  if (kind_tok == "real") {
    out.kind = EntryKind::Real;
  } else if (kind_tok == "complex") {
    out.kind = EntryKind::Complex;
  } else {
    throw InputError("matrix file header: unknown entry kind '" + kind_tok + "'");
  }
  const Index rows = parse_dim(rows_tok);
  const Index cols = parse_dim(cols_tok);
  out.matrix = DenseMatrix(rows, cols);
  const std::size_t fields = out.kind == EntryKind::Real ? 1 : 2;
  for (Index idx = 0; idx < rows * cols; ++idx) {
    const std::size_t line_no = idx + 2;
    if (!std::getline(is, line)) throw InputError("matrix file: expected " + std::to_string(rows * cols) + " entries");
    std::istringstream ls(line);
    std::string re_tok, im_tok;
    if (!(ls >> re_tok)) throw InputError("matrix file line " + std::to_string(line_no) + ": empty");
    if (fields == 2 && !(ls >> im_tok)) {
      throw InputError("matrix file line " + std::to_string(line_no) + ": missing imaginary part");
    }
    if (ls >> extra) throw InputError("matrix file line " + std::to_string(line_no) + ": trailing data");
    const double re = parse_double(re_tok, line_no);
    const double im = fields == 2 ? parse_double(im_tok, line_no) : 0.0;
    out.matrix(idx / cols, idx % cols) = Complex(re, im);
  }
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) throw InputError("matrix file: trailing data");
  }
  return out;
}

MatrixFile read_matrix_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open matrix file '" + path + "'");
  return read_matrix(is);
}

}  // namespace vpgrad
