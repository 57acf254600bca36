#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iat/paramselect.hpp"
#include "iat/problems.hpp"

namespace iat {

/// Invalid experiment configuration. The command-line tool maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json };

struct ExperimentSpec {
  ProblemSpec problem;
  std::vector<Index> ell_list;
  std::vector<int> i_list;
  /// Rule used to pick alpha; its `i` is replaced by each entry of i_list.
  ParamRule rule = ParamRule::iat(1);
  /// Also emit classical AT rows (E = 3 ||x_dagger||, i = 1) per ell.
  bool at_baseline = false;
  /// When non-empty, table cells use these alphas instead of the rule.
  std::vector<double> alpha_overrides;
  std::vector<double> alpha_list;  // discrepancy runs
  std::vector<double> alpha_grid;  // alpha sweeps
  int i_max = 5000;
  double tau = 1.0;
  /// Wall times are recorded only on request so that output stays byte-stable.
  bool record_timing = false;
  std::string out_path;
  OutputFormat format = OutputFormat::csv;

  /// Throws ConfigError. `dim` is the operator dimension.
  void validate(Index dim) const;
};

struct TableRow {
  std::string problem;
  Index n = 0;
  double xi = 0.0;
  std::uint64_t seed = 0;
  Index ell = 0;
  int i = 0;
  std::string rule;
  double alpha = 0.0;
  double rel_error = 0.0;
  double residual = 0.0;
  double wall_ms = 0.0;
  std::string flag;  // "", "infeasible", "unconverged", "selected"
};

struct RunResult {
  std::vector<TableRow> rows;
  std::size_t decompositions_built = 0;
};

/// Alpha selected by `rule` at every (ell, i) with the resulting iterate.
RunResult run_table(const ExperimentSpec& spec);

/// Relative error over `alpha_grid` at iteration count i for each ell, plus a
/// row flagged "selected" at the rule's alpha. With at_baseline the AT curve
/// (i = 1) and its own selected point are appended.
RunResult run_alpha_sweep(const ExperimentSpec& spec, const std::vector<double>& alpha_grid,
                          int i);

/// Discrepancy-principle stopping index and error for each alpha and ell.
RunResult run_discrepancy_table(const ExperimentSpec& spec,
                                const std::vector<double>& alpha_list);

/// Same as above on an already generated problem.
RunResult run_table(const ExperimentSpec& spec, const Problem& problem);
RunResult run_alpha_sweep(const ExperimentSpec& spec, const Problem& problem,
                          const std::vector<double>& alpha_grid, int i);
RunResult run_discrepancy_table(const ExperimentSpec& spec, const Problem& problem,
                                const std::vector<double>& alpha_list);

inline constexpr const char* kCsvHeader =
    "problem,n,xi,seed,ell,i,rule,alpha,rel_error,residual,wall_ms,flag";

std::string rows_to_csv(const std::vector<TableRow>& rows);
std::string rows_to_json(const std::vector<TableRow>& rows);

/// Geometric grid of `count` points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int count);

/// Parses a JSON configuration document. Throws ConfigError.
ExperimentSpec spec_from_json(const std::string& text);

}  // namespace iat
