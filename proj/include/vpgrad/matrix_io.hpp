#pragma once

// Text matrix format:
//   line 1:  "<rows> <cols> complex" or "<rows> <cols> real"
//   then rows·cols lines in row-major order, "re im" (complex) or "re" (real).
// Numbers use the shortest decimal form that parses back to the same double,
// so write → read is bit-exact.

#include <iosfwd>
#include <string>

#include "vpgrad/matrix.hpp"

namespace vpgrad {

enum class EntryKind { Real, Complex };

struct MatrixFile {
  DenseMatrix matrix;
  EntryKind kind = EntryKind::Complex;
};

/// Real output requires every imaginary part to be zero.
void write_matrix(std::ostream& os, const DenseMatrix& x, EntryKind kind);
void write_matrix_file(const std::string& path, const DenseMatrix& x, EntryKind kind);

/// Throws InputError on malformed headers, wrong entry counts, trailing
/// data, or non-finite values.
MatrixFile read_matrix(std::istream& is);
MatrixFile read_matrix_file(const std::string& path);

std::string format_double(double v);

}  // namespace vpgrad
