#pragma once

#include <filesystem>
#include <iosfwd>

#include "iat/arnoldi.hpp"
#include "iat/operator.hpp"
#include "iat/types.hpp"

namespace iat {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense matrix files.
//
// Text: a header line holding n, then n rows of n whitespace-separated
// decimals. Binary: the 8 bytes "IATMATRX", a little-endian uint64 n, then
// n*n little-endian float64 values in column-major order.
// read_matrix detects the format from the leading bytes.

void write_matrix_text(std::ostream& out, const Eigen::Ref<const Matrix>& m);
void write_matrix_binary(std::ostream& out, const Eigen::Ref<const Matrix>& m);
Matrix read_matrix(std::istream& in);
Matrix read_matrix(const std::filesystem::path& path);
std::shared_ptr<const DenseOperator> load_dense_operator(const std::filesystem::path& path);

// Vector text files: a header line holding n, then one decimal per line.
void write_vector_text(std::ostream& out, const Eigen::Ref<const Vector>& v);
Vector read_vector_text(std::istream& in);
Vector read_vector(const std::filesystem::path& path);

// Arnoldi decomposition dump, all fields little-endian:
//   char[8]  "IATARNLD"
//   uint64   n            rows of the basis
//   uint64   steps        m, columns of H
//   uint64   basis_cols   m+1, or m after a breakdown
//   uint64   flags        bit 0 = breakdown
//   float64  beta
//   float64  basis[n * basis_cols]      column-major
//   float64  hessenberg[(m+1) * m]      column-major
void write_decomposition(std::ostream& out, const ArnoldiDecomposition& dec);
ArnoldiDecomposition read_decomposition(std::istream& in);

}  // namespace iat
