#pragma once

#include <filesystem>
#include <iosfwd>

#include "woldkit/types.hpp"

namespace woldkit {

// Reads a dense complex matrix from a Matrix Market stream. Accepts array
// and coordinate formats with real, integer or complex fields and the
// general, symmetric, hermitian and skew-symmetric symmetries. Malformed
// input raises InputError.
ComplexMatrix read_matrix_market(std::istream& in);
ComplexMatrix read_matrix_market(const std::filesystem::path& path);

// Writes a dense complex array in column-major order with 17 significant
// digits, enough to round-trip doubles exactly.
void write_matrix_market(std::ostream& out, const ComplexMatrix& m);
void write_matrix_market(const std::filesystem::path& path,
                         const ComplexMatrix& m);

}  // namespace woldkit
