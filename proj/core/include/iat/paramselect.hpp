#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "iat/arnoldi.hpp"
#include "iat/types.hpp"

namespace iat {

/// SVD of the reduced Hessenberg matrix, H = U Sigma S^T, together with the
/// projected data y_hat = I_q U^T y_reduced.
struct HessenbergSvd {
  Matrix U;      // (m+1) x (m+1)
  Vector sigma;  // length m, non-increasing
  Matrix S;      // m x m
  Index rank = 0;
  Vector y_hat;  // length m+1, entries at index >= rank are exactly zero

  /// ||R y|| for the projector R onto the range of the Arnoldi approximation.
  double y_hat_norm() const { return y_hat.norm(); }
};

/// `rank` counts sigma_j > rank_tol * sigma_1.
HessenbergSvd hessenberg_svd(const Eigen::Ref<const Matrix>& hessenberg,
                             const Eigen::Ref<const Vector>& y_reduced,
                             double rank_tol = 1e-14);

/// How the left-hand side alpha^{2i+1} y_hat^T (Sigma Sigma^T + alpha I)^{-(2i+1)} y_hat
/// is evaluated.
enum class PhiForm {
  /// Sum_j (alpha / (sigma_j^2 + alpha))^{2i+1} y_hat_j^2 in log space. Exact
  /// for every alpha and i.
  diagonal,
  /// The printed product taken literally in binary64: pow(alpha, 2i+1) times
  /// the resolvent quadratic form. pow overflows once (2i+1) log10(alpha)
  /// passes ~308, which caps the root near DBL_MAX^{1/(2i+1)} for large i.
  /// This is the evaluation that produced the published reference tables.
  literal,
};

std::string to_string(PhiForm form);
PhiForm phi_form_from_string(const std::string& name);

/// Left-hand side of the parameter equation. Strictly increasing in alpha.
double phi(const HessenbergSvd& svd, double alpha, int i, PhiForm form = PhiForm::diagonal);

/// Derivative of the diagonal form with respect to log(alpha).
double phi_log_derivative(const HessenbergSvd& svd, double alpha, int i);

/// True iff 0 <= rhs <= ||y_hat||, i.e. E h + C delta does not exceed ||R y||.
bool feasibility(const HessenbergSvd& svd, double rhs);

/// Raised when E h + C delta exceeds ||R y||; the caller should enlarge ell.
class InfeasibleError : public std::domain_error {
 public:
  InfeasibleError(double rhs, double projected_norm);
  double rhs() const noexcept { return rhs_; }
  double projected_norm() const noexcept { return projected_norm_; }

 private:
  double rhs_;
  double projected_norm_;
};

struct AlphaSolution {
  double alpha = 0.0;
  double phi_at_alpha = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int bisection_steps = 0;
  int newton_iters = 0;
};

/// Unique alpha > 0 with phi(alpha) = rhs^2. Bracketing, geometric bisection,
/// then a safeguarded Newton polish on log(alpha) for the diagonal form.
/// With PhiForm::literal the returned alpha is the largest bracketed value at
/// which the literal product is still finite and below rhs^2.
AlphaSolution solve_alpha(const HessenbergSvd& svd, int i, double rhs, double tol = 1e-12,
                          PhiForm form = PhiForm::diagonal);

/// rhs = E h + C delta with E given, or E = E_scale * ||x_dagger|| when E is unset.
/// E_scale = 1 is the iAT rule; E_scale = 3 with i = 1 is the classical AT baseline.
struct FixedE {
  double C = 1.0;
  double E_scale = 1.0;
  std::optional<double> E;
};

/// E replaced by D ||x_{alpha,i}||, iterated to a fixed point.
struct AdaptiveE {
  double C = 1.0;
  double D = 1.0;
  int max_sweeps = 20;
  double alpha_rtol = 1e-3;
};

/// alpha = (h + delta)^{2/(2i+1)}, no root finding.
struct Heuristic {};

struct ParamRule {
  std::variant<FixedE, AdaptiveE, Heuristic> variant = FixedE{};
  int i = 1;
  PhiForm form = PhiForm::diagonal;

  std::string name() const;

  static ParamRule iat(int i, PhiForm form = PhiForm::diagonal) {
    return {FixedE{1.0, 1.0, std::nullopt}, i, form};
  }
  static ParamRule at_baseline(PhiForm form = PhiForm::diagonal) {
    return {FixedE{1.0, 3.0, std::nullopt}, 1, form};
  }
};

struct AlphaDiagnostics {
  std::string rule;
  double rhs = 0.0;
  double alpha = 0.0;
  double phi_at_alpha = 0.0;
  bool feasible = true;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int newton_iters = 0;
  int sweeps = 0;
  double E = 0.0;

  std::string to_json() const;
};

struct AlphaChoice {
  double alpha = 0.0;
  AlphaDiagnostics diagnostics;
};

/// Selects alpha under `rule`. Throws InfeasibleError (carrying the attempted
/// rhs) when the feasibility condition fails, ArgumentError when the rule's
/// constants are out of range or fixed_E lacks ||x_dagger||.
AlphaChoice choose_alpha(const ParamRule& rule, const HessenbergSvd& svd, double h_ell,
                         double delta, std::optional<double> x_dagger_norm,
                         const ArnoldiDecomposition& dec,
                         const Eigen::Ref<const Vector>& y_reduced);

}  // namespace iat
