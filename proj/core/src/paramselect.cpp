#include "iat/paramselect.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "iat/solver.hpp"

namespace iat {

std::string to_string(PhiForm form) {
  return form == PhiForm::diagonal ? "diagonal" : "literal";
}

PhiForm phi_form_from_string(const std::string& name) {
  if (name == "diagonal") return PhiForm::diagonal;
  if (name == "literal") return PhiForm::literal;
  throw ArgumentError("unknown phi form '" + name + "' (expected diagonal|literal)");
}

HessenbergSvd hessenberg_svd(const Eigen::Ref<const Matrix>& hessenberg,
                             const Eigen::Ref<const Vector>& y_reduced, double rank_tol) {
  const Index m = hessenberg.cols();
  if (hessenberg.rows() != m + 1) throw ArgumentError("hessenberg_svd: H must be (m+1) x m");
  if (y_reduced.size() != m + 1) throw ArgumentError("hessenberg_svd: y_reduced must have m+1 entries");

  Eigen::BDCSVD<Matrix> svd(hessenberg, Eigen::ComputeFullU | Eigen::ComputeFullV);
  HessenbergSvd out;
  out.U = svd.matrixU();
  out.sigma = svd.singularValues();
  out.S = svd.matrixV();
  const double cutoff = out.sigma.size() > 0 ? rank_tol * out.sigma(0) : 0.0;
  out.rank = 0;
  while (out.rank < out.sigma.size() && out.sigma(out.rank) > cutoff) ++out.rank;
  out.y_hat = out.U.transpose() * y_reduced;
  out.y_hat.tail(m + 1 - out.rank).setZero();
  return out;
}

namespace {

void check_alpha_i(double alpha, int i) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ArgumentError("alpha must be positive and finite");
  if (i < 1) throw ArgumentError("iteration count i must be >= 1");
}

double phi_diagonal(const HessenbergSvd& svd, double alpha, int i) {
  const double power = 2.0 * i + 1.0;
  double sum = 0.0;
  for (Index j = 0; j < svd.rank; ++j) {
    const double s2 = svd.sigma(j) * svd.sigma(j);
    // (alpha / (s2 + alpha))^{2i+1}
    sum += std::exp(-power * std::log1p(s2 / alpha)) * svd.y_hat(j) * svd.y_hat(j);
  }
  return sum;
}

double phi_literal(const HessenbergSvd& svd, double alpha, int i) {
  const double power = 2.0 * i + 1.0;
  const double alpha_power = std::pow(alpha, power);
  if (std::isinf(alpha_power)) return alpha_power;
  double sum = 0.0;
  for (Index j = 0; j < svd.y_hat.size(); ++j) {
    const double s = j < svd.sigma.size() ? svd.sigma(j) : 0.0;
    const double resolvent = std::pow(s * s + alpha, -power);
    // An overflowing resolvent implies alpha_power underflowed; take the ratio instead of 0 * inf.
    const double term = std::isinf(resolvent) ? std::pow(alpha / (s * s + alpha), power)
                                              : alpha_power * resolvent;
    sum += svd.y_hat(j) * svd.y_hat(j) * term;
  }
  return sum;
}

}  // namespace

double phi(const HessenbergSvd& svd, double alpha, int i, PhiForm form) {
  check_alpha_i(alpha, i);
  return form == PhiForm::diagonal ? phi_diagonal(svd, alpha, i) : phi_literal(svd, alpha, i);
}

double phi_log_derivative(const HessenbergSvd& svd, double alpha, int i) {
  check_alpha_i(alpha, i);
  const double power = 2.0 * i + 1.0;
  double sum = 0.0;
  for (Index j = 0; j < svd.rank; ++j) {
    const double s2 = svd.sigma(j) * svd.sigma(j);
    const double factor = std::exp(-power * std::log1p(s2 / alpha));
    sum += power * factor * (s2 / (s2 + alpha)) * svd.y_hat(j) * svd.y_hat(j);
  }
  return sum;
}

bool feasibility(const HessenbergSvd& svd, double rhs) {
  if (!(rhs >= 0.0)) throw ArgumentError("feasibility: rhs must be non-negative");
  return rhs <= svd.y_hat_norm();
}

InfeasibleError::InfeasibleError(double rhs, double projected_norm)
    : std::domain_error([&] {
        std::ostringstream msg;
        msg.precision(6);
        msg << "parameter equation infeasible: E*h + C*delta = " << rhs
            << " must stay below ||R y|| = " << projected_norm << "; increase ell";
        return msg.str();
      }()),
      rhs_(rhs),
      projected_norm_(projected_norm) {}

AlphaSolution solve_alpha(const HessenbergSvd& svd, int i, double rhs, double tol, PhiForm form) {
  if (i < 1) throw ArgumentError("solve_alpha: i must be >= 1");
  if (!(tol > 0.0)) throw ArgumentError("solve_alpha: tol must be positive");
  if (!(rhs > 0.0) || !std::isfinite(rhs)) throw ArgumentError("solve_alpha: rhs must be positive");
  const double target = rhs * rhs;
  const double y_norm2 = svd.y_hat.squaredNorm();
  if (!(target < y_norm2) || svd.rank == 0) throw InfeasibleError(rhs, std::sqrt(y_norm2));

  const double power = 2.0 * i + 1.0;
  const double s1 = svd.sigma(0) * svd.sigma(0);
  const double sq = svd.sigma(svd.rank - 1) * svd.sigma(svd.rank - 1);

  // phi(alpha) < target  <=>  alpha lies left of the root. Overflow in the
  // literal form (inf or inf*0 = nan) counts as right of the root.
  auto below = [&](double alpha) {
    const double value = phi(svd, alpha, i, form);
    return std::isfinite(value) && value < target;
  };

  AlphaSolution sol;
  double lo = sq * std::pow(target / y_norm2, 1.0 / power) * 1e-6;
  double hi = s1 * 1e6;
  for (int k = 0; k < 200 && !below(lo); ++k) lo *= 1e-3;
  for (int k = 0; k < 200 && below(hi); ++k) hi *= 1e3;
  if (!below(lo) || below(hi)) {
    throw std::runtime_error("solve_alpha: failed to bracket the root");
  }

  double log_lo = std::log(lo);
  double log_hi = std::log(hi);
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (log_lo + log_hi);
    if (mid <= log_lo || mid >= log_hi) break;
    if (below(std::exp(mid))) {
      log_lo = mid;
    } else {
      log_hi = mid;
    }
    ++sol.bisection_steps;
  }

  if (form == PhiForm::literal) {
    sol.alpha = std::exp(log_lo);
  } else {
    // Newton on u = log(alpha), kept inside the bisection bracket.
    double u = 0.5 * (log_lo + log_hi);
    for (int k = 0; k < 50; ++k) {
      const double alpha = std::exp(u);
      const double f = phi_diagonal(svd, alpha, i) - target;
      if (std::abs(f) <= tol * target) break;
      if (f < 0.0) {
        log_lo = u;
      } else {
        log_hi = u;
      }
      const double df = phi_log_derivative(svd, alpha, i);
      double next = df > 0.0 ? u - f / df : 0.5 * (log_lo + log_hi);
      if (!(next > log_lo && next < log_hi)) next = 0.5 * (log_lo + log_hi);
      ++sol.newton_iters;
      if (next == u) break;
      u = next;
    }
    sol.alpha = std::exp(u);
  }
  sol.bracket_lo = std::exp(log_lo);
  sol.bracket_hi = std::exp(log_hi);
  sol.phi_at_alpha = phi(svd, sol.alpha, i, form);
  return sol;
}

std::string ParamRule::name() const {
  struct Namer {
    std::string operator()(const FixedE&) const { return "fixed_e"; }
    std::string operator()(const AdaptiveE&) const { return "adaptive_e"; }
    std::string operator()(const Heuristic&) const { return "heuristic"; }
  };
  return std::visit(Namer{}, variant);
}

std::string AlphaDiagnostics::to_json() const {
  nlohmann::json j;
  j["rule"] = rule;
  j["rhs"] = rhs;
  j["alpha"] = alpha;
  j["phi_at_alpha"] = std::isfinite(phi_at_alpha) ? nlohmann::json(phi_at_alpha) : nlohmann::json();
  j["feasible"] = feasible;
  j["bracket"] = {bracket_lo, bracket_hi};
  j["newton_iters"] = newton_iters;
  return j.dump();
}

namespace {

double heuristic_alpha(double h_ell, double delta, int i) {
  return std::pow(h_ell + delta, 2.0 / (2.0 * i + 1.0));
}

AlphaChoice solve_with(const ParamRule& rule, const HessenbergSvd& svd, double rhs, double E) {
  AlphaChoice choice;
  auto& d = choice.diagnostics;
  d.rule = rule.name();
  d.rhs = rhs;
  d.E = E;
  d.feasible = feasibility(svd, rhs);
  if (!d.feasible) throw InfeasibleError(rhs, svd.y_hat_norm());
  const AlphaSolution sol = solve_alpha(svd, rule.i, rhs, 1e-12, rule.form);
  choice.alpha = sol.alpha;
  d.alpha = sol.alpha;
  d.phi_at_alpha = sol.phi_at_alpha;
  d.bracket_lo = sol.bracket_lo;
  d.bracket_hi = sol.bracket_hi;
  d.newton_iters = sol.newton_iters;
  return choice;
}

}  // namespace

AlphaChoice choose_alpha(const ParamRule& rule, const HessenbergSvd& svd, double h_ell,
                         double delta, std::optional<double> x_dagger_norm,
                         const ArnoldiDecomposition& dec,
                         const Eigen::Ref<const Vector>& y_reduced) {
  if (rule.i < 1) throw ArgumentError("rule: i must be >= 1");
  if (!(h_ell >= 0.0) || !(delta >= 0.0)) throw ArgumentError("rule: h_ell and delta must be >= 0");

  if (std::holds_alternative<Heuristic>(rule.variant)) {
    AlphaChoice choice;
    choice.alpha = heuristic_alpha(h_ell, delta, rule.i);
    auto& d = choice.diagnostics;
    d.rule = rule.name();
    d.alpha = choice.alpha;
    d.rhs = h_ell + delta;
    d.feasible = true;
    d.phi_at_alpha = phi(svd, choice.alpha, rule.i, rule.form);
    return choice;
  }

  if (const auto* fixed = std::get_if<FixedE>(&rule.variant)) {
    if (fixed->C < 1.0) throw ArgumentError("fixed_E rule requires C >= 1");
    double E = 0.0;
    if (fixed->E) {
      E = *fixed->E;
    } else {
      if (!x_dagger_norm) throw ArgumentError("fixed_E rule requires ||x_dagger||");
      E = fixed->E_scale * *x_dagger_norm;
    }
    if (!(E > 0.0)) throw ArgumentError("fixed_E rule requires E > 0");
    return solve_with(rule, svd, E * h_ell + fixed->C * delta, E);
  }

  const auto& adaptive = std::get<AdaptiveE>(rule.variant);
  if (adaptive.C < 1.0) throw ArgumentError("adaptive_E rule requires C >= 1");
  if (adaptive.D < 1.0) throw ArgumentError("adaptive_E rule requires D >= 1");
  const Matrix& h = dec.hessenberg;
  // ||V_m z|| = ||z|| since V_m has orthonormal columns.
  auto iterate_norm = [&](double alpha) { return iat_solve(h, y_reduced, alpha, rule.i).norm(); };

  double alpha = heuristic_alpha(h_ell, delta, rule.i);
  double E = adaptive.D * iterate_norm(alpha);
  AlphaChoice choice;
  for (int sweep = 1; sweep <= adaptive.max_sweeps; ++sweep) {
    choice = solve_with(rule, svd, E * h_ell + adaptive.C * delta, E);
    choice.diagnostics.sweeps = sweep;
    const double change = std::abs(choice.alpha - alpha) / alpha;
    alpha = choice.alpha;
    if (change < adaptive.alpha_rtol) break;
    E = adaptive.D * iterate_norm(alpha);
  }
  return choice;
}

}  // namespace iat
