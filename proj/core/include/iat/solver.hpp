#pragma once

#include <optional>
#include <string>
#include <variant>

#include "iat/arnoldi.hpp"
#include "iat/operator.hpp"
#include "iat/types.hpp"

namespace iat {

/// One factorization of H^T H + alpha I, reused across iterated Tikhonov steps
///   z_k = (H^T H + alpha I)^{-1} (H^T y + alpha z_{k-1}).
///
/// Uses Cholesky unless the estimated condition number of H^T H + alpha I
/// exceeds `kConditionLimit`; then it switches to a Householder QR of the
/// stacked least-squares system [H; sqrt(alpha) I] z = [y; sqrt(alpha) z_{k-1}].
class ReducedIteration {
 public:
  static constexpr double kConditionLimit = 1e14;

  ReducedIteration(const Eigen::Ref<const Matrix>& hessenberg,
                   const Eigen::Ref<const Vector>& y_reduced, double alpha);

  Vector next(const Eigen::Ref<const Vector>& z_prev) const;
  /// z_i starting from z_0 = 0.
  Vector run(int i) const;

  Index size() const noexcept { return hty_.size(); }
  double alpha() const noexcept { return alpha_; }
  bool uses_qr() const noexcept { return std::holds_alternative<Eigen::HouseholderQR<Matrix>>(factor_); }
  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  Matrix hessenberg_;
  Vector y_reduced_;
  Vector hty_;
  double alpha_;
  double condition_estimate_ = 1.0;
  std::variant<Eigen::LLT<Matrix>, Eigen::HouseholderQR<Matrix>> factor_;
};

/// Tikhonov solution of the reduced problem, (H^T H + alpha I)^{-1} H^T y.
Vector at_solve(const Eigen::Ref<const Matrix>& hessenberg,
                const Eigen::Ref<const Vector>& y_reduced, double alpha);
Vector at_solve(const ArnoldiDecomposition& dec, const Eigen::Ref<const Vector>& y_reduced,
                double alpha);

/// i-th iterated Tikhonov iterate of the reduced problem,
/// sum_{k=1}^{i} alpha^{k-1} (H^T H + alpha I)^{-k} H^T y.
Vector iat_solve(const Eigen::Ref<const Matrix>& hessenberg,
                 const Eigen::Ref<const Vector>& y_reduced, double alpha, int i);
Vector iat_solve(const ArnoldiDecomposition& dec, const Eigen::Ref<const Vector>& y_reduced,
                 double alpha, int i);

/// Brute-force full-space iteration with T^(l) = V_{m+1} H V_m^T formed
/// explicitly, each step a stacked least-squares solve by Householder QR in
/// long double. Testing oracle; refuses dim > 64.
Vector oracle_full_space(const LinearOperator& op, const ArnoldiDecomposition& dec,
                         const Eigen::Ref<const Vector>& y_delta, double alpha, int i);

struct SolveReport {
  Vector x;  // V_m z
  Vector z;
  double alpha = 0.0;
  int iterations = 0;
  double residual_norm = 0.0;  // ||T x - y_delta||
  std::optional<double> relative_error;
  bool converged = true;
  Index ell = 0;
  Index n = 0;

  /// {alpha, iterations, residual_norm, relative_error, ell, n, converged}
  std::string to_json() const;
};

/// Fixed (alpha, i) solve with the full-space residual and, when x_dagger is
/// given, the relative error.
SolveReport iat_report(const LinearOperator& op, const ArnoldiDecomposition& dec,
                       const Eigen::Ref<const Vector>& y_delta, double alpha, int i,
                       const std::optional<Vector>& x_dagger = std::nullopt);

struct DiscrepancyOptions {
  int i_max = 5000;
  double tau = 1.0;  // stop when residual <= tau * delta
};

/// Runs the iteration for increasing i until ||T V_m z_i - y_delta|| <= tau delta.
/// Returns the i_max iterate with converged = false if the bound is never met.
SolveReport discrepancy_run(const LinearOperator& op, const ArnoldiDecomposition& dec,
                            const Eigen::Ref<const Vector>& y_delta, double alpha,
                            double delta, const DiscrepancyOptions& options = {},
                            const std::optional<Vector>& x_dagger = std::nullopt);

double relative_error(const Eigen::Ref<const Vector>& x_dagger,
                      const Eigen::Ref<const Vector>& x);

}  // namespace iat
