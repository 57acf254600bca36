#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's numerical routines; every quantity is recomputed from
// definitions with plain dense linear algebra.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

/// Explicit Kronecker product.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

/// Orthonormal basis of the Krylov space span{b, T b, ..., T^{k-1} b} by
/// Householder QR of the explicit Krylov matrix (columns normalized first).
inline Matrix krylov_basis(const Matrix& t, const Vector& b, Index k) {
  Matrix kry(b.size(), k);
  Vector v = b.normalized();
  for (Index j = 0; j < k; ++j) {
    kry.col(j) = v;
    v = (t * v).normalized();
  }
  Eigen::HouseholderQR<Matrix> qr(kry);
  return qr.householderQ() * Matrix::Identity(b.size(), k);
}

/// Largest principal angle sine between the column spans of orthonormal a and b.
inline double subspace_distance(const Matrix& a, const Matrix& b) {
  return spectral_norm(a - b * (b.transpose() * a));
}

/// Iterated Tikhonov through filter factors on the SVD of h:
/// z_i = sum_j (1 - (alpha/(s_j^2+alpha))^i) / s_j * v_j u_j^T y.
inline Vector filtered_iterate(const Matrix& h, const Vector& y, double alpha, int i) {
  Eigen::JacobiSVD<Matrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector s = svd.singularValues();
  const Vector c = svd.matrixU().transpose() * y;
  Vector coeff = Vector::Zero(s.size());
  for (Index j = 0; j < s.size(); ++j) {
    if (s(j) <= 1e-300) continue;
    const double s2 = s(j) * s(j);
    const double keep = std::pow(alpha / (s2 + alpha), i);
    coeff(j) = (1.0 - keep) / s(j) * c(j);
  }
  return svd.matrixV() * coeff;
}

/// Left-hand side of the parameter equation from the reduced residual:
/// with r_i = y - H z_i, phi = alpha r_i^T (H H^T + alpha I)^{-1} r_i minus
/// the residual component in the null space of H^T (where the factor is 1).
inline double phi_from_residual(const Matrix& h, const Vector& y, double alpha, int i) {
  const Vector z = filtered_iterate(h, y, alpha, i);
  const Vector r = y - h * z;
  const Index m1 = h.rows();
  const Matrix g = h * h.transpose() + alpha * Matrix::Identity(m1, m1);
  const double full = alpha * r.dot(g.ldlt().solve(r));
  Eigen::JacobiSVD<Matrix> svd(h, Eigen::ComputeFullU);
  const Vector u_null = svd.matrixU().col(m1 - 1);
  const double null_part = u_null.dot(y);
  return full - null_part * null_part;
}

/// Diagonal form of the parameter equation from a fresh SVD of h, summed in
/// long double.
inline double phi_direct(const Matrix& h, const Vector& y, double alpha, int i) {
  Eigen::JacobiSVD<Matrix> svd(h, Eigen::ComputeFullU);
  const Vector c = svd.matrixU().transpose() * y;
  const Vector s = svd.singularValues();
  long double sum = 0.0L;
  for (Index j = 0; j < s.size(); ++j) {
    if (s(j) <= 1e-14 * s(0)) break;
    const long double a = alpha;
    const long double ratio = a / (static_cast<long double>(s(j)) * s(j) + a);
    sum += std::pow(ratio, 2 * i + 1) * static_cast<long double>(c(j)) * c(j);
  }
  return static_cast<double>(sum);
}

/// ||m||_2 by power iteration on m^T m from a fixed pseudo-random start.
inline double power_norm(const Matrix& m, int iters = 1000) {
  Vector v = Vector::Zero(m.cols());
  std::mt19937_64 rng(7);
  std::normal_distribution<double> d;
  for (Index k = 0; k < v.size(); ++k) v(k) = d(rng);
  double est = 0.0;
  for (int k = 0; k < iters; ++k) {
    v.normalize();
    const Vector w = m.transpose() * (m * v);
    est = std::sqrt(v.dot(w));
    v = w;
  }
  return est;
}

/// Trapezoidal Phillips matrix with explicit loops, independent of the generator.
inline Matrix phillips_matrix(Index n) {
  Matrix t(n, n);
  const double h = 12.0 / static_cast<double>(n - 1);
  for (Index i = 0; i < n; ++i) {
    const double s = -6.0 + h * static_cast<double>(i);
    for (Index j = 0; j < n; ++j) {
      const double u = -6.0 + h * static_cast<double>(j);
      const double d = s - u;
      const double w = (j == 0 || j == n - 1) ? 0.5 * h : h;
      t(i, j) = std::abs(d) < 3.0 ? w * (1.0 + std::cos(std::numbers::pi * d / 3.0)) : 0.0;
    }
  }
  return t;
}

inline double phillips_rhs(double s) {
  const double a = std::abs(s);
  return (6.0 - a) * (1.0 + 0.5 * std::cos(std::numbers::pi * s / 3.0)) +
         9.0 / (2.0 * std::numbers::pi) * std::sin(std::numbers::pi * a / 3.0);
}

/// Random matrices and vectors for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  Vector vector(Index n) {
    Vector v(n);
    std::normal_distribution<double> d;
    for (Index k = 0; k < n; ++k) v(k) = d(rng_);
    return v;
  }
  Matrix matrix(Index rows, Index cols) {
    Matrix m(rows, cols);
    std::normal_distribution<double> d;
    for (Index k = 0; k < m.size(); ++k) m.data()[k] = d(rng_);
    return m;
  }
  /// Square matrix with prescribed, geometrically decaying singular values.
  Matrix ill_conditioned(Index n, double decay) {
    Eigen::HouseholderQR<Matrix> q1(matrix(n, n));
    Eigen::HouseholderQR<Matrix> q2(matrix(n, n));
    Vector s(n);
    for (Index k = 0; k < n; ++k) s(k) = std::pow(decay, static_cast<double>(k));
    return Matrix(q1.householderQ()) * s.asDiagonal() * Matrix(q2.householderQ()).transpose();
  }
  /// Upper Hessenberg (m+1) x m matrix with positive subdiagonal.
  Matrix hessenberg(Index m) {
    Matrix h = matrix(m + 1, m);
    for (Index j = 0; j < m; ++j) {
      for (Index i = j + 2; i <= m; ++i) h(i, j) = 0.0;
      h(j + 1, j) = std::abs(h(j + 1, j)) + 0.1;
    }
    return h;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oracle
