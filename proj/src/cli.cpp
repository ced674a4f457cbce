#include "specreg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "specreg/bench.hpp"
#include "specreg/config.hpp"
#include "specreg/error.hpp"
#include "specreg/io.hpp"
#include "specreg/penalty.hpp"
#include "specreg/selection.hpp"

namespace specreg::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string csv;
  unsigned threads = 0;
};

struct LoadedProblem {
  ExperimentConfig cfg;
  std::optional<DecomposedDesign> design;
  std::optional<std::vector<double>> raw_y;
};

LoadedProblem load(const CommonOptions& opts) {
  LoadedProblem lp{load_config(opts.config), std::nullopt, std::nullopt};
  if (opts.seed) lp.cfg.seed = *opts.seed;
  if (const auto* m = std::get_if<MatrixSource>(&lp.cfg.problem)) {
    lp.design = decompose_design(io::read_matrix_csv(m->x), lp.cfg.rank_tol);
    if (m->y) lp.raw_y = io::read_vector_csv(*m->y);
  }
  return lp;
}

Spectrum spectrum_of(const LoadedProblem& lp) {
  if (lp.design) return lp.design->spectrum();
  if (const auto* model = std::get_if<SpectralModel>(&lp.cfg.problem)) return model->spectrum;
  return std::get<SpectralData>(lp.cfg.problem).spectrum;
}

PenaltyTable table_of(const LoadedProblem& lp, const Spectrum& spectrum) {
  const auto grid = resolve_grid(lp.cfg.grid, lp.cfg.family, spectrum);
  return build_penalty_table(lp.cfg.family, grid, spectrum, lp.cfg.gamma);
}

const SpectralModel& require_model(const LoadedProblem& lp, const std::string& command) {
  const auto* model = std::get_if<SpectralModel>(&lp.cfg.problem);
  if (!model) throw InvalidArgument("config error: `" + command + "` needs a model or generator problem");
  return *model;
}

void emit(const CommonOptions& opts, std::ostream& out, const std::string& text) {
  if (opts.out.empty()) {
    out << text;
  } else {
    io::write_text(opts.out, text);
  }
}

json summary_json(const SummaryStats& s) {
  return {{"mean", s.mean},     {"variance", s.variance}, {"standard_error", s.standard_error},
          {"median", s.median}, {"q90", s.q90},           {"q95", s.q95},
          {"q99", s.q99}};
}

int cmd_decompose(const CommonOptions& opts, std::ostream& out) {
  const auto lp = load(opts);
  if (!lp.design) throw InvalidArgument("config error: `decompose` needs a matrix problem");
  const auto& spectrum = lp.design->spectrum();
  json j;
  j["n"] = lp.design->n();
  j["p"] = lp.design->p();
  j["effective_rank"] = spectrum.effective_rank();
  j["eigenvalues"] = std::vector<double>(spectrum.eigenvalues().begin(), spectrum.eigenvalues().end());
  if (lp.raw_y) {
    const auto data = to_spectral(*lp.design, *lp.raw_y);
    j["y"] = data.y;
    j["orthogonal_residual2"] = data.orthogonal_residual2;
    j["orthogonal_dof"] = data.orthogonal_dof;
  }
  emit(opts, out, j.dump(2) + "\n");
  return kOk;
}

int cmd_penalty_table(const CommonOptions& opts, std::ostream& out) {
  const auto lp = load(opts);
  const auto spectrum = spectrum_of(lp);
  const auto table = table_of(lp, spectrum);
  std::ostringstream os;
  os << "alpha,pen_u,pen_cv,D,mu,q_plus,pen_total,h_lambda_norm2,one_minus_h_norm2,max_h_over_lambda\n";
  for (const auto& r : table.rows) {
    const double fields[] = {r.alpha,     r.pen_u,          r.pen_cv,            r.d,
                             r.mu,        r.q_plus,         r.pen_total,         r.h_lambda_norm2,
                             r.one_minus_h_norm2, r.max_h_over_lambda};
    for (std::size_t i = 0; i < std::size(fields); ++i) os << (i ? "," : "") << io::format_double(fields[i]);
    os << "\n";
  }
  emit(opts, out, os.str());
  return kOk;
}

int cmd_select(const CommonOptions& opts, std::ostream& out) {
  const auto lp = load(opts);
  const auto& cfg = lp.cfg;
  std::optional<SpectralData> data;
  std::optional<double> sigma2 = cfg.sigma2;
  if (lp.design) {
    if (!lp.raw_y) throw InvalidArgument("config error: `select` on a matrix problem needs problem.matrix.y");
    data = to_spectral(*lp.design, *lp.raw_y);
  } else if (const auto* model = std::get_if<SpectralModel>(&cfg.problem)) {
    RandomStream stream(cfg.seed, 0);
    data = simulate_observation(*model, stream);
    if (!sigma2) sigma2 = model->sigma * model->sigma;
  } else {
    data = std::get<SpectralData>(cfg.problem);
  }
  const auto table = table_of(lp, data->spectrum);

  SelectionOptions sel;
  sel.mode = cfg.mode;
  sel.penalty = cfg.penalty;
  sel.include_orthogonal_residual = cfg.include_orthogonal_residual;
  if (cfg.mode == NoiseMode::known) {
    if (!sigma2) throw InvalidArgument("config error: known-sigma mode needs 'sigma2'");
    sel.sigma2 = *sigma2;
  }
  const auto result = select_alpha(*data, table, sel);

  json j;
  j["alpha_hat"] = result.alpha_hat;
  j["alpha_hat_index"] = result.alpha_hat_index;
  j["sigma_hat2"] = result.sigma_hat2 ? json(*result.sigma_hat2) : json(nullptr);
  j["contrasts"] = result.contrasts;
  j["estimate"] = result.estimate;
  if (lp.design) j["coefficients"] = reconstruct_estimate(*lp.design, result.estimate);
  emit(opts, out, j.dump(2) + "\n");
  return kOk;
}

int cmd_bench(const CommonOptions& opts, std::ostream& out) {
  const auto lp = load(opts);
  const auto& cfg = lp.cfg;
  const auto& model = require_model(lp, "bench");
  const auto table = table_of(lp, model.spectrum);

  BenchConfig bc;
  bc.selection.mode = cfg.mode;
  bc.selection.penalty = cfg.penalty;
  bc.replications = cfg.replications;
  bc.seed = cfg.seed;
  bc.threads = opts.threads;
  const auto report = mc_run(model, table, bc);

  json j;
  j["replications"] = report.replications;
  j["seed"] = report.seed;
  j["family"] = to_string(cfg.family.kind);
  j["mode"] = to_string(cfg.mode);
  j["penalty"] = to_string(cfg.penalty);
  j["gamma"] = cfg.gamma;
  j["grid"] = table.profile.alphas;
  j["empirical_risk"] = report.empirical_risk;
  j["empirical_risk_se"] = report.empirical_risk_se;
  j["r_beta"] = report.r_beta;
  j["oracle_alpha_index"] = report.oracle_alpha_index;
  j["oracle_ratio"] = report.oracle_ratio;
  j["loss"] = summary_json(report.loss);
  j["alpha_hat_histogram"] = report.alpha_hat_histogram;
  j["sigma_hat2"] = report.sigma_hat2 ? json{{"mean", report.sigma_hat2->mean},
                                             {"variance", report.sigma_hat2->variance}}
                                      : json(nullptr);
  j["excess_sup"] = summary_json(report.excess_sup);
  j["d_ref"] = report.d_ref;
  j["psi"] = report.psi;
  const auto bound = theorem_bound(report.r_beta, model.sigma * model.sigma, report.d_ref, report.psi,
                                   cfg.gamma, cfg.bound_constant);
  j["bound_constant"] = cfg.bound_constant;
  j["theorem_bound"] = bound ? json(*bound) : json(nullptr);
  emit(opts, out, j.dump(2) + "\n");

  std::string csv_path = opts.csv;
  if (csv_path.empty() && !opts.out.empty()) {
    csv_path = fs::path(opts.out).replace_extension(".replications.csv").string();
  }
  if (!csv_path.empty()) {
    std::ostringstream os;
    os << "rep,alpha_hat_index,loss,sigma_hat2,excess_sup\n";
    for (const auto& r : report.records) {
      os << r.rep << "," << r.alpha_hat_index << "," << io::format_double(r.loss) << ","
         << io::format_double(r.sigma_hat2) << "," << io::format_double(r.excess_sup) << "\n";
    }
    io::write_text(csv_path, os.str());
  }
  return kOk;
}

int cmd_check(const CommonOptions& opts, std::ostream& out) {
  const auto lp = load(opts);
  const auto spectrum = spectrum_of(lp);
  const auto table = table_of(lp, spectrum);
  const auto ordering = check_ordered(table.profile);
  const auto conditions = check_conditions(table, spectrum);
  const auto prop7 = verify_prop7(table);

  std::ostringstream os;
  os << "family " << to_string(lp.cfg.family.kind) << ", " << table.rows.size() << " grid points, p = "
     << spectrum.effective_rank() << "\n";
  os << (ordering.ordered() ? "PASS" : "FAIL") << " ordered smoother";
  if (!ordering.ordered()) os << ": " << ordering.violation->describe();
  os << "\n";
  os << (conditions.passed() ? "PASS" : "FAIL") << " conditions: c2_hat = " << io::format_double(conditions.c2_hat)
     << " (row " << conditions.argmin_row << ")\n";
  os << (prop7.passed() ? "PASS" : "FAIL") << " penalty inequalities: " << prop7.rows_checked << " rows, "
     << prop7.pairs_checked << " pairs; violations a=" << prop7.failures_a << " b=" << prop7.failures_b
     << " c=" << prop7.failures_c << " d=" << prop7.failures_d << "\n";
  for (const auto& m : prop7.messages) os << "  " << m << "\n";
  os << "psi = " << io::format_double(table.psi) << "\n";
  emit(opts, out, os.str());
  return ordering.ordered() && conditions.passed() && prop7.passed() ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive spectral regularization: penalties, selection and Monte Carlo benchmarks", "specreg"};
  app.require_subcommand(1);
  CommonOptions opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "Experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", opts.seed, "Override the configured master seed");
    sub->add_option("--out", opts.out, "Output file (default: stdout)");
  };
  auto* decompose = app.add_subcommand("decompose", "Spectrum (and spectral data) of a raw design");
  auto* table = app.add_subcommand("penalty-table", "Penalty quantities per grid point as CSV");
  auto* select = app.add_subcommand("select", "Data-driven choice of alpha");
  auto* bench = app.add_subcommand("bench", "Monte Carlo benchmark of the selector");
  auto* check = app.add_subcommand("check", "Ordering, conditions and penalty inequalities");
  for (auto* sub : {decompose, table, select, bench, check}) add_common(sub);
  bench->add_option("--csv", opts.csv, "Per-replication CSV (default: <out>.replications.csv)");
  bench->add_option("--threads", opts.threads, "Worker threads (0 = hardware concurrency)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kConfigError;
  }

  try {
    if (decompose->parsed()) return cmd_decompose(opts, out);
    if (table->parsed()) return cmd_penalty_table(opts, out);
    if (select->parsed()) return cmd_select(opts, out);
    if (bench->parsed()) return cmd_bench(opts, out);
    return cmd_check(opts, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace specreg::cli
