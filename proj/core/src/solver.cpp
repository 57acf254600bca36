#include "iat/solver.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace iat {

namespace {

void check_reduced_inputs(const Eigen::Ref<const Matrix>& h, const Eigen::Ref<const Vector>& y,
                          double alpha) {
  if (h.rows() != h.cols() + 1) throw ArgumentError("reduced solve: H must be (m+1) x m");
  if (y.size() != h.rows()) throw ArgumentError("reduced solve: y_reduced must have m+1 entries");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ArgumentError("reduced solve: alpha must be positive and finite");
  if (!h.allFinite() || !y.allFinite()) throw ArgumentError("reduced solve: non-finite input");
}

}  // namespace

ReducedIteration::ReducedIteration(const Eigen::Ref<const Matrix>& hessenberg,
                                   const Eigen::Ref<const Vector>& y_reduced, double alpha)
    : hessenberg_(hessenberg), y_reduced_(y_reduced), alpha_(alpha) {
  check_reduced_inputs(hessenberg, y_reduced, alpha);
  hty_ = hessenberg_.transpose() * y_reduced_;

  Matrix normal = hessenberg_.transpose() * hessenberg_;
  normal.diagonal().array() += alpha_;
  Eigen::LLT<Matrix> llt(normal);
  bool use_qr = llt.info() != Eigen::Success;
  if (!use_qr && normal.rows() > 0) {
    const auto diag = llt.matrixLLT().diagonal();
    const double ratio = diag.maxCoeff() / diag.minCoeff();
    condition_estimate_ = ratio * ratio;
    use_qr = !(condition_estimate_ <= kConditionLimit);
  }
  if (use_qr) {
    const Index m = hessenberg_.cols();
    Matrix stacked(hessenberg_.rows() + m, m);
    stacked.topRows(hessenberg_.rows()) = hessenberg_;
    stacked.bottomRows(m) = std::sqrt(alpha_) * Matrix::Identity(m, m);
    factor_.emplace<Eigen::HouseholderQR<Matrix>>(stacked);
  } else {
    factor_.emplace<Eigen::LLT<Matrix>>(std::move(llt));
  }
}

Vector ReducedIteration::next(const Eigen::Ref<const Vector>& z_prev) const {
  if (z_prev.size() != size()) throw ArgumentError("reduced iteration: z has wrong length");
  if (const auto* llt = std::get_if<Eigen::LLT<Matrix>>(&factor_)) {
    const Vector rhs = hty_ + alpha_ * z_prev;
    return llt->solve(rhs);
  }
  const auto& qr = std::get<Eigen::HouseholderQR<Matrix>>(factor_);
  Vector rhs(y_reduced_.size() + size());
  rhs.head(y_reduced_.size()) = y_reduced_;
  rhs.tail(size()) = std::sqrt(alpha_) * z_prev;
  return qr.solve(rhs);
}

Vector ReducedIteration::run(int i) const {
  if (i < 1) throw ArgumentError("iteration count i must be >= 1");
  Vector z = Vector::Zero(size());
  for (int k = 0; k < i; ++k) z = next(z);
  return z;
}

Vector at_solve(const Eigen::Ref<const Matrix>& hessenberg,
                const Eigen::Ref<const Vector>& y_reduced, double alpha) {
  return ReducedIteration(hessenberg, y_reduced, alpha).run(1);
}

Vector at_solve(const ArnoldiDecomposition& dec, const Eigen::Ref<const Vector>& y_reduced,
                double alpha) {
  return at_solve(dec.hessenberg, y_reduced, alpha);
}

Vector iat_solve(const Eigen::Ref<const Matrix>& hessenberg,
                 const Eigen::Ref<const Vector>& y_reduced, double alpha, int i) {
  return ReducedIteration(hessenberg, y_reduced, alpha).run(i);
}

Vector iat_solve(const ArnoldiDecomposition& dec, const Eigen::Ref<const Vector>& y_reduced,
                 double alpha, int i) {
  return iat_solve(dec.hessenberg, y_reduced, alpha, i);
}

Vector oracle_full_space(const LinearOperator& op, const ArnoldiDecomposition& dec,
                         const Eigen::Ref<const Vector>& y_delta, double alpha, int i) {
  const Index n = op.dim();
  if (n > 64) throw ArgumentError("oracle_full_space is limited to n <= 64");
  if (dec.dim() != n || y_delta.size() != n) throw ArgumentError("oracle_full_space: dimension mismatch");
  if (!(alpha > 0.0) || i < 1) throw ArgumentError("oracle_full_space: need alpha > 0 and i >= 1");

  // T_ell is only rank ell up to rounding; with a large residual that rounding
  // is amplified by about ||r||/alpha, so the whole route runs in long double.
  using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using VectorL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const Index m = dec.basis.cols();
  const MatrixL basis = dec.basis.cast<long double>();
  const MatrixL t_ell = basis * dec.hessenberg.topRows(m).cast<long double>() *
                        basis.leftCols(dec.steps).transpose();
  // each step is min ||[T_ell; sqrt(a) I] x - [y; sqrt(a) x_prev]||
  const long double root = std::sqrt(static_cast<long double>(alpha));
  MatrixL stacked(2 * n, n);
  stacked.topRows(n) = t_ell;
  stacked.bottomRows(n) = root * MatrixL::Identity(n, n);
  const Eigen::HouseholderQR<MatrixL> qr(stacked);
  VectorL rhs(2 * n);
  rhs.head(n) = y_delta.cast<long double>();
  VectorL x = VectorL::Zero(n);
  for (int k = 0; k < i; ++k) {
    rhs.tail(n) = root * x;
    x = qr.solve(rhs);
  }
  return x.cast<double>();
}

double relative_error(const Eigen::Ref<const Vector>& x_dagger,
                      const Eigen::Ref<const Vector>& x) {
  return (x_dagger - x).norm() / x_dagger.norm();
}

std::string SolveReport::to_json() const {
  nlohmann::json j;
  j["alpha"] = alpha;
  j["iterations"] = iterations;
  j["residual_norm"] = residual_norm;
  j["relative_error"] = relative_error ? nlohmann::json(*relative_error) : nlohmann::json();
  j["ell"] = ell;
  j["n"] = n;
  j["converged"] = converged;
  return j.dump();
}

namespace {

SolveReport make_report(const LinearOperator& op, const ArnoldiDecomposition& dec,
                        const Eigen::Ref<const Vector>& y_delta, double alpha, int i, Vector z,
                        const std::optional<Vector>& x_dagger) {
  SolveReport r;
  r.x = dec.expand(z);
  r.z = std::move(z);
  r.alpha = alpha;
  r.iterations = i;
  r.residual_norm = (op.apply(r.x) - y_delta).norm();
  if (x_dagger) r.relative_error = relative_error(*x_dagger, r.x);
  r.ell = dec.steps;
  r.n = op.dim();
  return r;
}

}  // namespace

SolveReport iat_report(const LinearOperator& op, const ArnoldiDecomposition& dec,
                       const Eigen::Ref<const Vector>& y_delta, double alpha, int i,
                       const std::optional<Vector>& x_dagger) {
  return make_report(op, dec, y_delta, alpha, i, iat_solve(dec, dec.reduce(y_delta), alpha, i),
                     x_dagger);
}

SolveReport discrepancy_run(const LinearOperator& op, const ArnoldiDecomposition& dec,
                            const Eigen::Ref<const Vector>& y_delta, double alpha,
                            double delta, const DiscrepancyOptions& options,
                            const std::optional<Vector>& x_dagger) {
  if (!(delta > 0.0)) throw ArgumentError("discrepancy_run: delta must be positive");
  if (options.i_max < 1) throw ArgumentError("discrepancy_run: i_max must be >= 1");
  if (!(options.tau >= 1.0)) throw ArgumentError("discrepancy_run: tau must be >= 1");
  if (y_delta.size() != op.dim()) throw ArgumentError("discrepancy_run: data length mismatch");

  const ReducedIteration iteration(dec.hessenberg, dec.reduce(y_delta), alpha);
  const double bound = options.tau * delta;
  Vector z = Vector::Zero(dec.steps);
  for (int i = 1; i <= options.i_max; ++i) {
    z = iteration.next(z);
    const double residual = (op.apply(dec.expand(z)) - y_delta).norm();
    if (residual <= bound || i == options.i_max) {
      SolveReport r = make_report(op, dec, y_delta, alpha, i, z, x_dagger);
      r.converged = residual <= bound;
      return r;
    }
  }
  return {};  // unreachable
}

}  // namespace iat
