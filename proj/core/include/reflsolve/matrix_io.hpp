#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "reflsolve/linalg.hpp"

namespace reflsolve {

// Plain-text interchange format: a header line "rows cols" followed by one
// matrix row per line with whitespace-separated decimals. Vectors use the same
// format as either a single row or a single column.

DenseMatrix read_matrix(std::istream& in);
DenseMatrix read_matrix_file(const std::filesystem::path& path);
Vector read_vector(std::istream& in);
Vector read_vector_file(const std::filesystem::path& path);

void write_matrix(std::ostream& out, const DenseMatrix& a);
/// Writes an n x 1 column.
void write_vector(std::ostream& out, std::span<const double> x);

/// Round-trippable decimal text for a double ("%.17g").
std::string format_double(double value);

}  // namespace reflsolve
