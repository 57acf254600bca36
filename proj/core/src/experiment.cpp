#include "iat/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "iat/arnoldi.hpp"
#include "iat/solver.hpp"

namespace iat {

void ExperimentSpec::validate(Index dim) const {
  for (Index ell : ell_list) {
    if (ell < 1) throw ConfigError("ell must be >= 1, got " + std::to_string(ell));
    if (ell >= dim) {
      throw ConfigError("ell must be < n = " + std::to_string(dim) + ", got " + std::to_string(ell));
    }
  }
  for (int i : i_list) {
    if (i < 1) throw ConfigError("iteration counts must be >= 1, got " + std::to_string(i));
  }
  if (!alpha_overrides.empty() && alpha_overrides.size() != 1 &&
      alpha_overrides.size() != i_list.size()) {
    throw ConfigError("alpha overrides must hold one value or one per iteration count");
  }
  auto all_positive = [](const std::vector<double>& v) {
    for (double a : v) {
      if (!(a > 0.0) || !std::isfinite(a)) return false;
    }
    return true;
  };
  if (!all_positive(alpha_overrides) || !all_positive(alpha_list) || !all_positive(alpha_grid)) {
    throw ConfigError("alpha values must be positive and finite");
  }
  if (i_max < 1) throw ConfigError("i_max must be >= 1");
  if (!(tau >= 1.0)) throw ConfigError("tau must be >= 1");
  if (rule.i < 1) throw ConfigError("rule iteration count must be >= 1");
}

namespace {

using Clock = std::chrono::steady_clock;

/// Per-ell Arnoldi data, built on first use.
struct Reduction {
  ArnoldiDecomposition dec;
  Vector y_reduced;
  HessenbergSvd svd;
  double h_ell = 0.0;
};

class ReductionCache {
 public:
  explicit ReductionCache(const Problem& p) : problem_(p) {}

  const Reduction& get(Index ell) {
    auto it = cache_.find(ell);
    if (it != cache_.end()) return it->second;
    Reduction r;
    r.dec = arnoldi(*problem_.op, problem_.y_delta, ell);
    r.y_reduced = r.dec.reduce(problem_.y_delta);
    r.svd = hessenberg_svd(r.dec.hessenberg, r.y_reduced);
    r.h_ell = approximation_gap(*problem_.op, r.dec);
    ++built_;
    return cache_.emplace(ell, std::move(r)).first->second;
  }

  std::size_t built() const { return built_; }

 private:
  const Problem& problem_;
  std::map<Index, Reduction> cache_;
  std::size_t built_ = 0;
};

TableRow base_row(const Problem& p, Index ell, int i, std::string rule) {
  TableRow row;
  row.problem = p.label;
  row.n = p.op->dim();
  row.xi = p.xi;
  row.seed = p.seed;
  row.ell = ell;
  row.i = i;
  row.rule = std::move(rule);
  return row;
}

void mark_infeasible(TableRow& row) {
  row.alpha = std::nan("");
  row.rel_error = std::nan("");
  row.residual = std::nan("");
  row.flag = "infeasible";
}

void fill_solution(TableRow& row, const ExperimentSpec& spec, const Problem& p,
                   const Reduction& r, double alpha, int i) {
  const auto start = Clock::now();
  const SolveReport rep = iat_report(*p.op, r.dec, p.y_delta, alpha, i, p.x_dagger);
  const auto stop = Clock::now();
  row.alpha = alpha;
  row.rel_error = rep.relative_error.value_or(std::nan(""));
  row.residual = rep.residual_norm;
  if (spec.record_timing) {
    row.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  }
}

/// Alpha under `rule` at iteration count i; nullopt when infeasible.
std::optional<double> select_alpha(ParamRule rule, int i, const Problem& p, const Reduction& r) {
  rule.i = i;
  try {
    return choose_alpha(rule, r.svd, r.h_ell, p.delta, p.x_dagger.norm(), r.dec, r.y_reduced).alpha;
  } catch (const InfeasibleError&) {
    return std::nullopt;
  }
}

std::string rule_label(const ParamRule& rule) { return rule.name(); }

}  // namespace

RunResult run_table(const ExperimentSpec& spec) {
  const Problem p = make_problem(spec.problem);
  return run_table(spec, p);
}

RunResult run_table(const ExperimentSpec& spec, const Problem& p) {
  spec.validate(p.op->dim());
  RunResult result;
  if (spec.i_list.empty()) return result;
  ReductionCache cache(p);
  const ParamRule baseline = ParamRule::at_baseline(spec.rule.form);

  for (Index ell : spec.ell_list) {
    const Reduction& r = cache.get(ell);
    for (std::size_t k = 0; k < spec.i_list.size(); ++k) {
      const int i = spec.i_list[k];
      std::optional<double> alpha;
      std::string label = rule_label(spec.rule);
      if (!spec.alpha_overrides.empty()) {
        alpha = spec.alpha_overrides.size() == 1 ? spec.alpha_overrides[0] : spec.alpha_overrides[k];
        label = "fixed_alpha";
      } else {
        alpha = select_alpha(spec.rule, i, p, r);
      }
      TableRow row = base_row(p, ell, i, label);
      if (alpha) {
        fill_solution(row, spec, p, r, *alpha, i);
      } else {
        mark_infeasible(row);
      }
      result.rows.push_back(std::move(row));
    }
    if (spec.at_baseline) {
      TableRow row = base_row(p, ell, 1, "at");
      if (auto alpha = select_alpha(baseline, 1, p, r)) {
        fill_solution(row, spec, p, r, *alpha, 1);
      } else {
        mark_infeasible(row);
      }
      result.rows.push_back(std::move(row));
    }
  }
  result.decompositions_built = cache.built();
  return result;
}

RunResult run_alpha_sweep(const ExperimentSpec& spec, const std::vector<double>& alpha_grid, int i) {
  const Problem p = make_problem(spec.problem);
  return run_alpha_sweep(spec, p, alpha_grid, i);
}

RunResult run_alpha_sweep(const ExperimentSpec& spec, const Problem& p,
                          const std::vector<double>& alpha_grid, int i) {
  spec.validate(p.op->dim());
  if (i < 1) throw ConfigError("sweep iteration count must be >= 1");
  for (std::size_t k = 0; k < alpha_grid.size(); ++k) {
    if (!(alpha_grid[k] > 0.0) || !std::isfinite(alpha_grid[k])) {
      throw ConfigError("alpha grid must be positive and finite");
    }
    if (k > 0 && !(alpha_grid[k] > alpha_grid[k - 1])) {
      throw ConfigError("alpha grid must be strictly increasing");
    }
  }
  RunResult result;
  ReductionCache cache(p);

  auto curve = [&](Index ell, const ParamRule& rule, int iters, const std::string& label) {
    const Reduction& r = cache.get(ell);
    for (double alpha : alpha_grid) {
      TableRow row = base_row(p, ell, iters, label);
      fill_solution(row, spec, p, r, alpha, iters);
      result.rows.push_back(std::move(row));
    }
    TableRow marker = base_row(p, ell, iters, label);
    if (auto alpha = select_alpha(rule, iters, p, r)) {
      fill_solution(marker, spec, p, r, *alpha, iters);
      marker.flag = "selected";
    } else {
      mark_infeasible(marker);
    }
    result.rows.push_back(std::move(marker));
  };

  for (Index ell : spec.ell_list) {
    curve(ell, spec.rule, i, rule_label(spec.rule));
    if (spec.at_baseline) curve(ell, ParamRule::at_baseline(spec.rule.form), 1, "at");
  }
  result.decompositions_built = cache.built();
  return result;
}

RunResult run_discrepancy_table(const ExperimentSpec& spec, const std::vector<double>& alpha_list) {
  const Problem p = make_problem(spec.problem);
  return run_discrepancy_table(spec, p, alpha_list);
}

RunResult run_discrepancy_table(const ExperimentSpec& spec, const Problem& p,
                                const std::vector<double>& alpha_list) {
  spec.validate(p.op->dim());
  if (!(p.delta > 0.0)) throw ConfigError("discrepancy runs need a positive noise level");
  for (double a : alpha_list) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("alpha values must be positive and finite");
  }
  RunResult result;
  ReductionCache cache(p);
  const DiscrepancyOptions options{spec.i_max, spec.tau};
  for (Index ell : spec.ell_list) {
    const Reduction& r = cache.get(ell);
    for (double alpha : alpha_list) {
      const auto start = Clock::now();
      const SolveReport rep = discrepancy_run(*p.op, r.dec, p.y_delta, alpha, p.delta, options,
                                              p.x_dagger);
      const auto stop = Clock::now();
      TableRow row = base_row(p, ell, rep.iterations, "discrepancy");
      row.alpha = alpha;
      row.rel_error = rep.relative_error.value_or(std::nan(""));
      row.residual = rep.residual_norm;
      if (spec.record_timing) {
        row.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
      }
      if (!rep.converged) row.flag = "unconverged";
      result.rows.push_back(std::move(row));
    }
  }
  result.decompositions_built = cache.built();
  return result;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json();
}

}  // namespace

std::string rows_to_csv(const std::vector<TableRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += r.problem + ',' + std::to_string(r.n) + ',' + fmt(r.xi) + ',' + std::to_string(r.seed) +
           ',' + std::to_string(r.ell) + ',' + std::to_string(r.i) + ',' + r.rule + ',' +
           fmt(r.alpha) + ',' + fmt(r.rel_error) + ',' + fmt(r.residual) + ',' + fmt(r.wall_ms) +
           ',' + r.flag + '\n';
  }
  return out;
}

std::string rows_to_json(const std::vector<TableRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"problem", r.problem},
                   {"n", r.n},
                   {"xi", r.xi},
                   {"seed", r.seed},
                   {"ell", r.ell},
                   {"i", r.i},
                   {"rule", r.rule},
                   {"alpha", number_or_null(r.alpha)},
                   {"rel_error", number_or_null(r.rel_error)},
                   {"residual", number_or_null(r.residual)},
                   {"wall_ms", r.wall_ms},
                   {"flag", r.flag}});
  }
  return arr.dump(2) + '\n';
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) {
    throw ArgumentError("log_grid: need 0 < lo <= hi and count >= 1");
  }
  if (count == 1) return {lo};
  std::vector<double> grid(static_cast<std::size_t>(count));
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / (count - 1);
  for (int k = 0; k < count; ++k) grid[static_cast<std::size_t>(k)] = std::exp(a + step * k);
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

ParamRule rule_from_json(const json& j, PhiForm form) {
  ParamRule rule;
  rule.form = form;
  std::string name;
  json params = json::object();
  if (j.is_string()) {
    name = j.get<std::string>();
  } else if (j.is_object()) {
    reject_unknown(j, {"name", "C", "E", "E_scale", "D", "max_sweeps", "alpha_rtol"}, "rule");
    name = j.at("name").get<std::string>();
    params = j;
  } else {
    throw ConfigError("rule must be a string or an object");
  }
  if (name == "fixed_e" || name == "iat") {
    FixedE r;
    r.C = params.value("C", r.C);
    r.E_scale = params.value("E_scale", r.E_scale);
    if (params.contains("E")) r.E = params.at("E").get<double>();
    rule.variant = r;
  } else if (name == "at") {
    FixedE r{1.0, 3.0, std::nullopt};
    r.C = params.value("C", r.C);
    rule.variant = r;
  } else if (name == "adaptive_e") {
    AdaptiveE r;
    r.C = params.value("C", r.C);
    r.D = params.value("D", r.D);
    r.max_sweeps = params.value("max_sweeps", r.max_sweeps);
    r.alpha_rtol = params.value("alpha_rtol", r.alpha_rtol);
    rule.variant = r;
  } else if (name == "heuristic") {
    rule.variant = Heuristic{};
  } else {
    throw ConfigError("unknown rule '" + name + "'");
  }
  return rule;
}

std::vector<double> grid_from_json(const json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  reject_unknown(j, {"lo", "hi", "count"}, "alpha_grid");
  return log_grid(j.at("lo").get<double>(), j.at("hi").get<double>(), j.at("count").get<int>());
}

}  // namespace

ExperimentSpec spec_from_json(const std::string& text) {
  ExperimentSpec spec;
  try {
    const json doc = json::parse(text);
    if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
    reject_unknown(doc,
                   {"problem", "ell", "iters", "rule", "phi_form", "at_baseline", "alpha",
                    "alpha_list", "alpha_grid", "i_max", "tau", "timing", "out", "format"},
                   "configuration");
    if (doc.contains("problem")) {
      const json& pj = doc.at("problem");
      reject_unknown(pj, {"name", "n", "xi", "seed", "blur_band", "blur_sigma"}, "problem");
      if (pj.contains("name")) spec.problem.kind = problem_kind_from_string(pj.at("name").get<std::string>());
      spec.problem.size = pj.value("n", spec.problem.size);
      spec.problem.xi = pj.value("xi", spec.problem.xi);
      spec.problem.seed = pj.value("seed", spec.problem.seed);
      spec.problem.blur_band = pj.value("blur_band", spec.problem.blur_band);
      spec.problem.blur_sigma = pj.value("blur_sigma", spec.problem.blur_sigma);
    }
    if (doc.contains("ell")) spec.ell_list = doc.at("ell").get<std::vector<Index>>();
    if (doc.contains("iters")) spec.i_list = doc.at("iters").get<std::vector<int>>();
    const PhiForm form = doc.contains("phi_form")
                             ? phi_form_from_string(doc.at("phi_form").get<std::string>())
                             : PhiForm::diagonal;
    spec.rule = doc.contains("rule") ? rule_from_json(doc.at("rule"), form) : ParamRule::iat(1, form);
    spec.at_baseline = doc.value("at_baseline", false);
    if (doc.contains("alpha")) spec.alpha_overrides = doc.at("alpha").get<std::vector<double>>();
    if (doc.contains("alpha_list")) spec.alpha_list = doc.at("alpha_list").get<std::vector<double>>();
    if (doc.contains("alpha_grid")) spec.alpha_grid = grid_from_json(doc.at("alpha_grid"));
    spec.i_max = doc.value("i_max", spec.i_max);
    spec.tau = doc.value("tau", spec.tau);
    spec.record_timing = doc.value("timing", false);
    spec.out_path = doc.value("out", std::string());
    const std::string format = doc.value("format", std::string("csv"));
    if (format == "csv") {
      spec.format = OutputFormat::csv;
    } else if (format == "json") {
      spec.format = OutputFormat::json;
    } else {
      throw ConfigError("format must be csv or json");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

}  // namespace iat
