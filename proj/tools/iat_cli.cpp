#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "iat/arnoldi.hpp"
#include "iat/experiment.hpp"
#include "iat/io.hpp"
#include "iat/paramselect.hpp"
#include "iat/problems.hpp"

namespace fs = std::filesystem;
using namespace iat;

namespace {

constexpr int kConfigExit = 2;

struct Flags {
  std::string config;
  std::string problem;
  long long n = 0;
  double xi = 0.0;
  std::uint64_t seed = 0;
  std::vector<long long> ell;
  std::vector<int> iters;
  std::string rule;
  std::string phi_form;
  std::vector<double> alpha;
  std::string grid;
  int i_max = 0;
  double tau = 0.0;
  std::string out;
  std::string format;
  bool at_baseline = false;
  bool timing = false;
};

struct Options {
  CLI::Option* problem = nullptr;
  CLI::Option* n = nullptr;
  CLI::Option* xi = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* ell = nullptr;
  CLI::Option* iters = nullptr;
  CLI::Option* rule = nullptr;
  CLI::Option* phi_form = nullptr;
  CLI::Option* alpha = nullptr;
  CLI::Option* grid = nullptr;
  CLI::Option* i_max = nullptr;
  CLI::Option* tau = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* format = nullptr;
  CLI::Option* at_baseline = nullptr;
  CLI::Option* timing = nullptr;
};

Options add_problem_flags(CLI::App* cmd, Flags& f) {
  Options o;
  cmd->add_option("--config", f.config, "JSON configuration; flags override its fields")
      ->check(CLI::ExistingFile);
  o.problem = cmd->add_option("--problem", f.problem, "phillips | baart | blur");
  o.n = cmd->add_option("--n", f.n, "problem size (image side for blur)");
  o.xi = cmd->add_option("--xi", f.xi, "relative noise level");
  o.seed = cmd->add_option("--seed", f.seed, "noise seed");
  o.out = cmd->add_option("--out", f.out, "output path (stdout when omitted)");
  return o;
}

void add_run_flags(CLI::App* cmd, Flags& f, Options& o) {
  o.ell = cmd->add_option("--ell", f.ell, "Arnoldi steps, comma separated")->delimiter(',');
  o.iters = cmd->add_option("--iters", f.iters, "iteration counts, comma separated")->delimiter(',');
  o.rule = cmd->add_option("--rule", f.rule, "fixed_e | adaptive_e | heuristic | at");
  o.phi_form = cmd->add_option("--phi-form", f.phi_form, "diagonal | literal");
  o.format = cmd->add_option("--format", f.format, "csv | json");
  o.at_baseline = cmd->add_flag("--at-baseline", f.at_baseline, "add classical AT rows");
  o.timing = cmd->add_flag("--timing", f.timing, "record wall times");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentSpec build_spec(const Flags& f, const Options& o) {
  ExperimentSpec spec = f.config.empty() ? ExperimentSpec{} : spec_from_json(read_file(f.config));
  try {
    if (o.problem && *o.problem) spec.problem.kind = problem_kind_from_string(f.problem);
    if (o.n && *o.n) spec.problem.size = f.n;
    if (o.xi && *o.xi) spec.problem.xi = f.xi;
    if (o.seed && *o.seed) spec.problem.seed = f.seed;
    if (o.ell && *o.ell) spec.ell_list.assign(f.ell.begin(), f.ell.end());
    if (o.iters && *o.iters) spec.i_list = f.iters;
    if (o.phi_form && *o.phi_form) spec.rule.form = phi_form_from_string(f.phi_form);
    if (o.rule && *o.rule) {
      nlohmann::json j;
      j["rule"] = f.rule;
      j["phi_form"] = to_string(spec.rule.form);
      spec.rule = spec_from_json(j.dump()).rule;
    }
    if (o.at_baseline && *o.at_baseline) spec.at_baseline = true;
    if (o.timing && *o.timing) spec.record_timing = true;
    if (o.i_max && *o.i_max) spec.i_max = f.i_max;
    if (o.tau && *o.tau) spec.tau = f.tau;
    if (o.out && *o.out) spec.out_path = f.out;
    if (o.format && *o.format) {
      if (f.format == "csv") {
        spec.format = OutputFormat::csv;
      } else if (f.format == "json") {
        spec.format = OutputFormat::json;
      } else {
        throw ConfigError("--format must be csv or json");
      }
    }
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  if (spec.problem.size < 2) throw ConfigError("--n must be >= 2");
  if (!(spec.problem.xi >= 0.0)) throw ConfigError("--xi must be >= 0");
  return spec;
}

std::vector<double> parse_grid(const std::string& text) {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
  char c1 = 0;
  char c2 = 0;
  std::istringstream in(text);
  if (!(in >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || !in.eof()) {
    throw ConfigError("--grid expects lo:hi:count, got '" + text + "'");
  }
  try {
    return log_grid(lo, hi, count);
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

void emit_rows(const ExperimentSpec& spec, const RunResult& result) {
  emit(spec.format == OutputFormat::json ? rows_to_json(result.rows) : rows_to_csv(result.rows),
       spec.out_path);
}

template <typename Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  writer(out);
}

void run_generate(const ExperimentSpec& spec) {
  if (spec.out_path.empty()) throw ConfigError("generate needs --out DIR");
  const fs::path dir = spec.out_path;
  fs::create_directories(dir);
  const Problem p = make_problem(spec.problem);
  write_file(dir / "operator.txt", [&](std::ostream& o) { write_matrix_text(o, p.op->to_dense()); });
  write_file(dir / "x_dagger.txt", [&](std::ostream& o) { write_vector_text(o, p.x_dagger); });
  write_file(dir / "y.txt", [&](std::ostream& o) { write_vector_text(o, p.y); });
  write_file(dir / "y_delta.txt", [&](std::ostream& o) { write_vector_text(o, p.y_delta); });
  nlohmann::json manifest = {{"label", p.label},
                             {"size", spec.problem.size},
                             {"n", p.op->dim()},
                             {"xi", p.xi},
                             {"seed", p.seed},
                             {"delta", p.delta},
                             {"files", {"operator.txt", "x_dagger.txt", "y.txt", "y_delta.txt"}}};
  if (spec.problem.kind == ProblemKind::blur) {
    manifest["blur_band"] = spec.problem.blur_band;
    manifest["blur_sigma"] = spec.problem.blur_sigma;
  }
  write_file(dir / "manifest.json", [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
}

struct DecomposeFlags {
  std::string matrix;
  std::string rhs;
  long long ell = 0;
  std::string out;
};

void run_decompose(const DecomposeFlags& f) {
  std::shared_ptr<const DenseOperator> op;
  Vector b;
  try {
    op = load_dense_operator(f.matrix);
    b = read_vector(f.rhs);
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
  if (b.size() != op->dim()) throw ConfigError("--rhs length does not match the matrix");
  if (f.ell < 1 || f.ell > op->dim()) throw ConfigError("--ell must lie in [1, n]");
  const ArnoldiDecomposition dec = arnoldi(*op, b, f.ell);
  const Vector y_reduced = dec.reduce(b);
  const HessenbergSvd svd = hessenberg_svd(dec.hessenberg, y_reduced);
  nlohmann::json summary = {{"n", op->dim()},
                            {"ell", f.ell},
                            {"steps", dec.steps},
                            {"breakdown", dec.breakdown},
                            {"beta", dec.beta},
                            {"h_ell", approximation_gap(*op, dec)},
                            {"rank", svd.rank},
                            {"projected_norm", svd.y_hat_norm()}};
  if (!f.out.empty()) {
    write_file(f.out, [&](std::ostream& o) { write_decomposition(o, dec); });
    summary["out"] = f.out;
  }
  std::cout << summary.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arnoldi-Tikhonov and iterated Arnoldi-Tikhonov regularization"};
  app.require_subcommand(1);

  Flags gen_flags;
  auto* gen = app.add_subcommand("generate", "write a test problem to a directory");
  Options gen_opts = add_problem_flags(gen, gen_flags);

  Flags table_flags;
  auto* table = app.add_subcommand("table", "relative errors at rule-selected alphas");
  Options table_opts = add_problem_flags(table, table_flags);
  add_run_flags(table, table_flags, table_opts);
  table_opts.alpha = table->add_option("--alpha", table_flags.alpha,
                                       "fixed alphas instead of the rule (one, or one per --iters)")
                         ->delimiter(',');

  Flags sweep_flags;
  auto* sweep = app.add_subcommand("sweep-alpha", "relative error over a geometric alpha grid");
  Options sweep_opts = add_problem_flags(sweep, sweep_flags);
  add_run_flags(sweep, sweep_flags, sweep_opts);
  sweep_opts.grid = sweep->add_option("--grid", sweep_flags.grid, "lo:hi:count (default 1e-3:1e4:50)");
  sweep_opts.alpha = sweep->add_option("--alpha", sweep_flags.alpha, "explicit grid, comma separated")
                         ->delimiter(',');

  Flags disc_flags;
  auto* disc = app.add_subcommand("discrepancy", "iterate until the discrepancy principle holds");
  Options disc_opts = add_problem_flags(disc, disc_flags);
  add_run_flags(disc, disc_flags, disc_opts);
  disc_opts.alpha = disc->add_option("--alpha", disc_flags.alpha, "alphas, comma separated")->delimiter(',');
  disc_opts.i_max = disc->add_option("--i-max", disc_flags.i_max, "iteration cap");
  disc_opts.tau = disc->add_option("--tau", disc_flags.tau, "stop when residual <= tau delta");

  DecomposeFlags dec_flags;
  auto* decompose = app.add_subcommand("decompose", "Arnoldi decomposition of a matrix file");
  decompose->add_option("--matrix", dec_flags.matrix, "matrix file (text or binary)")->required();
  decompose->add_option("--rhs", dec_flags.rhs, "vector text file")->required();
  decompose->add_option("--ell", dec_flags.ell, "Arnoldi steps")->required();
  decompose->add_option("--out", dec_flags.out, "binary decomposition dump");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (*gen) {
      run_generate(build_spec(gen_flags, gen_opts));
    } else if (*table) {
      ExperimentSpec spec = build_spec(table_flags, table_opts);
      if (*table_opts.alpha) spec.alpha_overrides = table_flags.alpha;
      emit_rows(spec, run_table(spec));
    } else if (*sweep) {
      ExperimentSpec spec = build_spec(sweep_flags, sweep_opts);
      if (*sweep_opts.alpha) spec.alpha_grid = sweep_flags.alpha;
      if (*sweep_opts.grid) spec.alpha_grid = parse_grid(sweep_flags.grid);
      if (spec.alpha_grid.empty()) spec.alpha_grid = log_grid(1e-3, 1e4, 50);
      if (spec.i_list.size() > 1) throw ConfigError("sweep-alpha takes a single --iters value");
      const int i = spec.i_list.empty() ? spec.rule.i : spec.i_list.front();
      emit_rows(spec, run_alpha_sweep(spec, spec.alpha_grid, i));
    } else if (*disc) {
      ExperimentSpec spec = build_spec(disc_flags, disc_opts);
      if (*disc_opts.alpha) spec.alpha_list = disc_flags.alpha;
      if (spec.alpha_list.empty()) throw ConfigError("discrepancy needs --alpha");
      emit_rows(spec, run_discrepancy_table(spec, spec.alpha_list));
    } else if (*decompose) {
      run_decompose(dec_flags);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const ArgumentError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
