#include "iat/arnoldi.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "iat/paramselect.hpp"

namespace iat {

Vector ArnoldiDecomposition::reduce(const Eigen::Ref<const Vector>& y) const {
  if (y.size() != dim()) throw ArgumentError("reduce: vector length does not match basis");
  Vector out = Vector::Zero(steps + 1);
  out.head(basis.cols()).noalias() = basis.transpose() * y;
  return out;
}

Vector ArnoldiDecomposition::expand(const Eigen::Ref<const Vector>& z) const {
  if (z.size() != steps) throw ArgumentError("expand: reduced vector length != steps");
  return leading_basis() * z;
}

ArnoldiDecomposition arnoldi(const LinearOperator& op, const Eigen::Ref<const Vector>& b,
                             Index ell, const ArnoldiOptions& options) {
  const Index n = op.dim();
  if (b.size() != n) throw ArgumentError("arnoldi: start vector length mismatch");
  if (ell < 1 || ell > n) throw ArgumentError("arnoldi: need 1 <= ell <= n");
  if (!b.allFinite()) throw ArgumentError("arnoldi: start vector has non-finite entries");
  const double beta = b.norm();
  if (!(beta > 0.0)) throw ArgumentError("arnoldi: zero start vector");

  Matrix v(n, ell + 1);
  Matrix h = Matrix::Zero(ell + 1, ell);
  v.col(0) = b / beta;
  double h_max = 0.0;

  ArnoldiDecomposition dec;
  dec.beta = beta;

  for (Index j = 0; j < ell; ++j) {
    Vector w = op.apply(v.col(j));
    for (int pass = 0; pass < 2; ++pass) {
      for (Index k = 0; k <= j; ++k) {
        const double c = v.col(k).dot(w);
        w -= c * v.col(k);
        h(k, j) += c;
      }
    }
    for (Index k = 0; k <= j; ++k) h_max = std::max(h_max, std::abs(h(k, j)));
    const double w_norm = w.norm();
    // No room for another orthonormal vector once j + 1 == n.
    if (w_norm <= options.breakdown_tol * h_max || j + 1 == n) {
      dec.steps = j + 1;
      dec.breakdown = true;
      dec.basis = v.leftCols(j + 1);
      dec.hessenberg = h.topLeftCorner(j + 2, j + 1);
      dec.hessenberg(j + 1, j) = 0.0;
      return dec;
    }
    h(j + 1, j) = w_norm;
    h_max = std::max(h_max, w_norm);
    v.col(j + 1) = w / w_norm;
  }
  dec.steps = ell;
  dec.basis = std::move(v);
  dec.hessenberg = std::move(h);
  return dec;
}

namespace {

Vector project_out(const Matrix& basis, Vector v) {
  v -= basis * (basis.transpose() * v);
  return v;
}

/// Start vectors for the projected power iteration: the all-ones vector (a
/// ramp if ones lies in the basis span) and a fixed low-discrepancy sequence,
/// which breaks the symmetry ones shares with symmetric operators.
std::vector<Vector> projected_starts(const Matrix& basis, Index n) {
  Vector ones = project_out(basis, Vector::Ones(n));
  if (ones.norm() <= 1e-8 * std::sqrt(static_cast<double>(n))) {
    ones = project_out(basis, Vector::LinSpaced(n, 1.0, 2.0));
  }
  Vector scrambled(n);
  constexpr double kGolden = 0.6180339887498949;
  for (Index k = 0; k < n; ++k) {
    const double t = static_cast<double>(k + 1) * kGolden;
    scrambled(k) = t - std::floor(t) - 0.5;
  }
  return {std::move(ones), project_out(basis, std::move(scrambled))};
}

double largest_singular_value(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

double approximation_gap(const LinearOperator& op, const ArnoldiDecomposition& dec,
                         const SpectralNormOptions& options) {
  const Index n = op.dim();
  if (dec.dim() != n) throw ArgumentError("approximation_gap: decomposition/operator mismatch");
  const Matrix vl = dec.leading_basis();
  if (n <= options.dense_threshold) {
    const Matrix t = op.to_dense();
    return largest_singular_value(t - (t * vl) * vl.transpose());
  }
  auto project = [&vl](const Vector& x) -> Vector { return x - vl * (vl.transpose() * x); };
  auto gram = [&](const Vector& x) { return project(op.apply_transpose(op.apply(project(x)))); };
  // Every estimate is a lower bound; keep the best.
  double best = 0.0;
  for (const Vector& start : projected_starts(vl, n)) {
    best = std::max(best, estimate_gram_norm(gram, start, options.tol, options.max_iter).value);
  }
  return best;
}

double gamma_ell(const LinearOperator& op, const HessenbergSvd& svd,
                 const ArnoldiDecomposition& dec, const SpectralNormOptions& options) {
  const Index n = op.dim();
  if (dec.dim() != n) throw ArgumentError("gamma_ell: decomposition/operator mismatch");
  // After a breakdown the last row of H is zero, so the leading q columns of U
  // have a zero last entry and only the stored basis columns contribute.
  const Matrix w = dec.basis * svd.U.topLeftCorner(dec.basis.cols(), svd.rank);
  auto complement = [&w](const Vector& x) -> Vector { return x - w * (w.transpose() * x); };
  if (n <= options.dense_threshold) {
    const Matrix t = op.to_dense();
    return largest_singular_value(t - w * (w.transpose() * t));
  }
  return estimate_gram_norm(
             [&](const Vector& x) { return op.apply_transpose(complement(op.apply(x))); },
             Vector::Ones(n), options.tol, options.max_iter)
      .value;
}

}  // namespace iat
