#pragma once

#include "iat/operator.hpp"
#include "iat/types.hpp"

namespace iat {

struct HessenbergSvd;

/// T V_m = V_{m+1} H_{m+1,m} for the Krylov space of (T, b).
///
/// `hessenberg` is always (m+1) x m. When the process breaks down at step m
/// the Krylov space is invariant: the last row of `hessenberg` is stored as
/// zero and `basis` keeps only its m columns.
struct ArnoldiDecomposition {
  Matrix basis;
  Matrix hessenberg;
  Index steps = 0;
  bool breakdown = false;
  double beta = 0.0;  // ||b||_2

  Index dim() const noexcept { return basis.rows(); }

  /// V_m, the columns spanning the search space of the reduced problem.
  auto leading_basis() const { return basis.leftCols(steps); }

  /// V_{m+1}^T y, zero-padded to m+1 entries after a breakdown.
  Vector reduce(const Eigen::Ref<const Vector>& y) const;

  /// V_m z.
  Vector expand(const Eigen::Ref<const Vector>& z) const;
};

struct ArnoldiOptions {
  /// A new basis vector is declared zero when its norm falls to
  /// breakdown_tol times the largest |H| entry computed so far.
  double breakdown_tol = 1e-12;
};

/// `ell` steps of Arnoldi with modified Gram-Schmidt and one unconditional
/// reorthogonalization pass. Stops early on breakdown. Requires
/// 1 <= ell <= dim and b != 0.
ArnoldiDecomposition arnoldi(const LinearOperator& op, const Eigen::Ref<const Vector>& b,
                             Index ell, const ArnoldiOptions& options = {});

struct SpectralNormOptions {
  /// Below or at this dimension the norm comes from a dense SVD.
  Index dense_threshold = 64;
  int max_iter = 200;
  double tol = 1e-8;
};

/// h_ell = ||T (I - V_m V_m^T)||_2, the distance between T and its Arnoldi
/// approximation V_{m+1} H V_m^T.
double approximation_gap(const LinearOperator& op, const ArnoldiDecomposition& dec,
                         const SpectralNormOptions& options = {});

/// gamma_ell = ||(I - R) T||_2 where R projects onto the range of the Arnoldi
/// approximation, R = V_{m+1} U_q U_q^T V_{m+1}^T.
double gamma_ell(const LinearOperator& op, const HessenbergSvd& svd,
                 const ArnoldiDecomposition& dec, const SpectralNormOptions& options = {});

}  // namespace iat
