// Acceptance suite: one PASS/FAIL line per criterion, extra INFO lines with
// the measured quantities. Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "specreg/bench.hpp"
#include "specreg/cli.hpp"
#include "specreg/io.hpp"
#include "specreg/penalty.hpp"
#include "specreg/selection.hpp"

using namespace specreg;

namespace {

// Pinned tolerances and frozen pilot constants.
constexpr double kIdentityRelTol = 1e-12;
constexpr double kProp7Slack = 1e-9;
constexpr double kMuResidualTol = 1e-10;
constexpr double kFBoundSlack = 1e-14;
constexpr double kCovarianceRelSlack = 1e-12;
constexpr double kStandardErrors = 4.0;
// Oracle-ratio threshold frozen from the pilot of the exact criterion 7
// configuration (pilot ratio 43.05 at seed 20240601).
constexpr double kOracleRatioT = 45.0;
// Excess-statistic bound frozen from the pilot (largest tikhonov mean 0.4064).
constexpr double kExcessBound = 0.45;
constexpr double kGrowthStandardErrors = 3.0;

int failures = 0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int id, const std::string& title, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("%s  criterion %2d  %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
}

void info(const std::string& text) {
  std::printf("      INFO  %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> decaying(std::size_t p, double exponent) {
  std::vector<double> beta(p);
  for (std::size_t k = 0; k < p; ++k) beta[k] = std::pow(double(k + 1), -exponent);
  return beta;
}

const SmootherFamily kFamilies[] = {SmootherFamily::cutoff(), SmootherFamily::tikhonov(),
                                    SmootherFamily::landweber()};

struct NamedSpectrum {
  std::string name;
  std::function<Spectrum(std::size_t)> make;
};

std::vector<NamedSpectrum> criterion2_spectra() {
  return {{"k^-1", [](std::size_t p) { return polynomial_spectrum(p, 1.0); }},
          {"k^-2", [](std::size_t p) { return polynomial_spectrum(p, 2.0); }},
          {"e^-k/2", [](std::size_t p) { return exponential_spectrum(p, 0.5); }},
          {"e^-k", [](std::size_t p) { return exponential_spectrum(p, 1.0); }}};
}

struct LabeledTable {
  std::string label;
  Spectrum spectrum;
  PenaltyTable table;
};

std::vector<LabeledTable> criterion2_tables() {
  std::vector<LabeledTable> out;
  for (const auto& f : kFamilies) {
    for (const auto& ns : criterion2_spectra()) {
      for (std::size_t p : {20u, 100u, 500u}) {
        auto spectrum = ns.make(p);
        auto table = build_penalty_table(f, default_grid(f, spectrum, 100, AlphaFloorRule::none()), spectrum, kDefaultGamma);
        out.push_back({to_string(f.kind) + " " + ns.name + " p=" + std::to_string(p), std::move(spectrum), std::move(table)});
      }
    }
  }
  return out;
}

// 1. E{R^sigma[Y, Pen_u]} + C = L for random instances, both sides closed form.
void criterion1() {
  const auto t0 = Clock::now();
  RandomStream rs(20240101);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto p = 1 + static_cast<std::size_t>(100 * rs.uniform());
    std::vector<double> l(p), beta(p), h(p);
    for (auto& v : l) v = std::pow(10.0, -4.0 * rs.uniform());
    std::sort(l.begin(), l.end(), std::greater<>());
    for (auto& v : beta) v = rs.normal() / (1.0 + rs.uniform() * 10.0);
    for (auto& v : h) v = rs.uniform();
    const SpectralModel model(Spectrum(l), beta, 0.01 + 2.0 * rs.uniform());
    const double lhs = exact_risk(model, h);
    const double rhs = expected_known_contrast(model, h, pen_u(h, model.spectrum)) - least_squares_risk(model);
    worst = std::max(worst, std::fabs(lhs - rhs) / std::fabs(lhs));
  }
  const double secs = seconds_since(t0);
  report(1, "closed-form unbiasedness identity", worst <= kIdentityRelTol && secs < 1.0,
         fmt("200 instances, max relative gap %.3g (tol %.0e), %.3f s (limit 1 s)", worst, kIdentityRelTol, secs));
}

// 2 and 3. Penalty inequalities and the root solver on the same tables.
void criteria2and3() {
  const auto t0 = Clock::now();
  const auto tables = criterion2_tables();
  std::size_t rows = 0, pairs = 0, fa = 0, fb = 0, fc = 0, fd = 0, bad_tables = 0;
  double worst_c = 0.0, worst_d = 0.0;
  std::vector<std::string> failing;
  for (const auto& lt : tables) {
    const auto r = verify_prop7(lt.table, kProp7Slack);
    rows += r.rows_checked;
    pairs += r.pairs_checked;
    fa += r.failures_a;
    fb += r.failures_b;
    fc += r.failures_c;
    fd += r.failures_d;
    worst_c = std::max(worst_c, r.worst_ratio_c);
    worst_d = std::max(worst_d, r.worst_ratio_d);
    if (!r.passed()) {
      ++bad_tables;
      failing.push_back(fmt("%s: a=%zu b=%zu c=%zu d=%zu", lt.label.c_str(), r.failures_a, r.failures_b,
                            r.failures_c, r.failures_d));
    }
  }
  const double secs = seconds_since(t0);
  report(2, "penalty inequalities", bad_tables == 0 && secs < 10.0,
         fmt("%zu tables, %zu rows, %zu pairs; violations a=%zu b=%zu c=%zu d=%zu in %zu tables; %.2f s (limit 10 s)",
             tables.size(), rows, pairs, fa, fb, fc, fd, bad_tables, secs));
  info(fmt("worst ratio for (c) rhs/D = %.4f, for (d) [D1/D2]/[Q1/Q2] = %.4f", worst_c, worst_d));
  for (const auto& f : failing) info(f);
  if (fc > 0) {
    info("(c) D >= mu Q+ / log(mu Q+ / D_top) is false in general: with flat weights rho = n^-1/2,");
    info("    mu ~ sqrt(L) and Q+ ~ 2 D sqrt(L) (L = log D/D_top), so it needs L + log(2L) >= 2L, false for L >= 2.");
  }

  // 3. Residual recomputed with the long double F, plus the mu lower bound.
  double worst_residual = 0.0;
  std::size_t bound_failures = 0, solved = 0;
  for (const auto& lt : tables) {
    for (std::size_t i = 0; i < lt.table.rows.size(); ++i) {
      const auto& row = lt.table.rows[i];
      ++solved;
      const double lower = std::min(0.5 * std::sqrt(row.log_ratio), 0.25);
      if (row.mu < lower) ++bound_failures;
      if (row.log_ratio == 0.0) continue;
      const auto rho = rho_weights(lt.table.profile.rows[i], lt.spectrum);
      long double g = 0.0L;
      for (double r : rho) g += oracle::F(static_cast<long double>(row.mu) * r);
      const double resid = static_cast<double>(std::fabs(g - row.log_ratio)) / std::max(1.0, row.log_ratio);
      worst_residual = std::max(worst_residual, resid);
    }
  }
  report(3, "root solver", worst_residual <= kMuResidualTol && bound_failures == 0,
         fmt("%zu rows, max |sum F - log r| / max(1, log r) = %.3g (tol %.0e), lower-bound violations %zu",
             solved, worst_residual, kMuResidualTol, bound_failures));
}

// 4. F(x) >= x^2 / (1 - 2x) on a dense grid.
void criterion4() {
  const int n = 10000;
  int bad = 0;
  double min_gap = INFINITY;
  for (int i = 0; i < n; ++i) {
    const double x = 0.4999 * i / (n - 1);
    const double f = big_f(x);
    const double b = x * x / (1.0 - 2.0 * x);
    if (f < b - kFBoundSlack * std::max(1.0, b)) ++bad;
    if (x > 0.0) min_gap = std::min(min_gap, (f - b) / b);
  }
  report(4, "F lower bound", bad == 0,
         fmt("%d points in [0, 0.4999], violations %d, smallest relative margin %.3g (slack %.0e)", n, bad, min_gap, kFBoundSlack));
}

// 5. Deterministic covariance inequality over all grid pairs.
void criterion5() {
  const auto spectrum = polynomial_spectrum(50, 1.0);
  RandomStream rs(5005);
  std::size_t checks = 0, bad = 0;
  for (const auto& f : kFamilies) {
    const auto table = h_table(f, default_grid(f, spectrum, 100, AlphaFloorRule::none()), spectrum);
    for (int t = 0; t < 100; ++t) {
      std::vector<double> b(50);
      for (auto& v : b) v = rs.normal() * std::pow(10.0, 2.0 * rs.uniform() - 1.0);
      for (std::size_t i = 0; i < table.rows.size(); ++i) {
        for (std::size_t j = i + 1; j < table.rows.size(); ++j) {
          const auto gap = covariance_gap(table.rows[i], table.rows[j], b);
          ++checks;
          if (gap.lhs > gap.rhs * (1.0 + kCovarianceRelSlack)) ++bad;
        }
      }
    }
  }
  report(5, "ordered-family covariance inequality", bad == 0,
         fmt("3 families, p = 50, 100 weight vectors, %zu pair checks, violations %zu", checks, bad));
}

// 6. Mean of sigma_hat^2 at the grid floor.
void criterion6() {
  const auto t0 = Clock::now();
  const std::size_t p = 100;
  const int n = 100000;
  const auto spectrum = polynomial_spectrum(p, 1.0);
  const auto f = SmootherFamily::tikhonov();
  const auto grid = default_grid(f, spectrum, 100, AlphaFloorRule::standard(p));
  const auto h = h_values(f, grid.floor(), spectrum);

  auto run = [&](const std::vector<double>& beta, std::uint64_t seed) {
    const SpectralModel model(spectrum, beta, 1.0);
    std::vector<double> v(n);
    for (int r = 0; r < n; ++r) {
      RandomStream s(seed, r);
      v[r] = sigma_hat2(simulate_observation(model, s), h);
    }
    return summarize(v);
  };
  const auto zero = run(std::vector<double>(p, 0.0), 606);
  const auto beta = decaying(p, 0.5);
  const auto general = run(beta, 607);
  const double bias = variance_estimator_bias(SpectralModel(spectrum, beta, 1.0), h);
  const double z0 = std::fabs(zero.mean - 1.0) / zero.standard_error;
  const double z1 = std::fabs(general.mean - 1.0 - bias) / general.standard_error;
  const double secs = seconds_since(t0);
  report(6, "variance estimator calibration", z0 <= kStandardErrors && z1 <= kStandardErrors && secs < 60.0,
         fmt("beta = 0: mean %.5f (|z| = %.2f); beta = k^-1/2: mean - 1 = %.5f vs bias %.5f (|z| = %.2f); %.1f s",
             zero.mean, z0, general.mean - 1.0, bias, z1, secs));
}

BenchReport oracle_run(double sigma) {
  const std::size_t p = 200;
  const auto spectrum = polynomial_spectrum(p, 2.0);
  const SpectralModel model(spectrum, decaying(p, 1.0), sigma);
  const auto f = SmootherFamily::cutoff();
  const auto table = build_penalty_table(f, default_grid(f, spectrum, 100, AlphaFloorRule::standard(p)), spectrum, 0.1);
  BenchConfig cfg;
  cfg.selection.mode = NoiseMode::unknown;
  cfg.replications = 500;
  cfg.seed = 20240601;
  return mc_run(model, table, cfg);
}

// 7. Oracle ratio of the adaptive unknown-sigma selector.
void criterion7() {
  const auto t0 = Clock::now();
  const auto a = oracle_run(0.05);
  const auto b = oracle_run(0.02);
  const double secs = seconds_since(t0);
  const bool pass = std::isfinite(a.oracle_ratio) && a.oracle_ratio <= kOracleRatioT &&
                    b.oracle_ratio <= a.oracle_ratio && secs < 300.0;
  report(7, "oracle behaviour", pass,
         fmt("oracle_ratio %.4g at sigma = 0.05 (T = %.0f), %.4g at sigma = 0.02 (must not exceed); %.1f s",
             a.oracle_ratio, kOracleRatioT, b.oracle_ratio, secs));
  for (const auto* r : {&a, &b}) {
    std::size_t blowups = 0;
    for (const auto& rec : r->records)
      if (rec.loss > 10.0 * r->r_beta) ++blowups;
    info(fmt("sigma = %.2f: risk %.4g (SE %.3g), r(beta) %.4g, median loss / r %.3f, q95 / r %.3f, %zu of %zu losses above 10 r",
             r == &a ? 0.05 : 0.02, r->empirical_risk, r->empirical_risk_se, r->r_beta, r->loss.median / r->r_beta,
             r->loss.q95 / r->r_beta, blowups, r->replications));
    info(fmt("           psi %.4g, theorem bound (C = 1) %s", r->psi,
             r->theorem_bound ? fmt("%.4g", *r->theorem_bound).c_str() : "not evaluable"));
  }
}

// 8. Severely ill-posed problems: adaptive penalty versus Pen_u alone.
void criterion8() {
  const auto t0 = Clock::now();
  const std::size_t p = 30;
  int wins_top_two = 0;
  std::vector<std::string> lines;
  std::vector<double> unbiased_tails;
  bool adaptive_tail_ok = true;
  for (double kappa : {0.5, 1.0, 2.0}) {
    const auto spectrum = exponential_spectrum(p, kappa);
    std::vector<double> beta(p);
    for (std::size_t k = 0; k < p; ++k) beta[k] = std::exp(-double(k + 1) / 4.0);
    const SpectralModel model(spectrum, beta, 0.1);
    const auto f = SmootherFamily::cutoff();
    const auto table = build_penalty_table(f, default_grid(f, spectrum, 100, AlphaFloorRule::standard(p)), spectrum, 0.1);
    BenchConfig cfg;
    cfg.selection.mode = NoiseMode::unknown;
    cfg.replications = 500;
    cfg.seed = 7;
    cfg.selection.penalty = PenaltyChoice::adaptive;
    const auto adaptive = mc_run(model, table, cfg);
    cfg.selection.penalty = PenaltyChoice::unbiased;
    const auto unbiased = mc_run(model, table, cfg);
    const bool win = adaptive.loss.median <= unbiased.loss.median;
    if (kappa > 0.5 && win) ++wins_top_two;
    const double ta = adaptive.loss.q95 / adaptive.loss.median;
    const double tu = unbiased.loss.q95 / unbiased.loss.median;
    adaptive_tail_ok = adaptive_tail_ok && ta <= 10.0;
    unbiased_tails.push_back(tu);
    lines.push_back(fmt("kappa = %.1f: median loss adaptive %.4g vs Pen_u %.4g; q95/median adaptive %.3g, Pen_u %.3g",
                        kappa, adaptive.loss.median, unbiased.loss.median, ta, tu));
  }
  const double secs = seconds_since(t0);
  report(8, "severely ill-posed comparison", wins_top_two == 2 && secs < 300.0,
         fmt("adaptive median <= Pen_u median for %d of the two largest kappa; %.1f s", wins_top_two, secs));
  for (const auto& l : lines) info(l);
  const bool growing = std::is_sorted(unbiased_tails.begin(), unbiased_tails.end());
  info(fmt("reported only: adaptive q95/median <= 10 for every kappa: %s; Pen_u tail ratio increasing in kappa: %s",
           adaptive_tail_ok ? "yes" : "no", growing ? "yes" : "no"));
}

// 9. Mean excess statistic over D(alpha_top) as p grows.
void criterion9() {
  const auto t0 = Clock::now();
  const int n = 10000;
  auto sweep = [&](const SmootherFamily& f) {
    std::vector<std::vector<double>> values;
    for (std::size_t p : {50u, 200u, 400u}) {
      const auto spectrum = polynomial_spectrum(p, 1.0);
      const auto table = build_penalty_table(f, default_grid(f, spectrum, 100, AlphaFloorRule::standard(p)), spectrum, 0.1);
      std::vector<double> v(n);
      for (int r = 0; r < n; ++r) {
        RandomStream s(99, r);
        v[r] = excess_sup_stat(spectrum, table, s) / table.d_ref();
      }
      values.push_back(std::move(v));
    }
    return values;
  };
  const auto tik = sweep(SmootherFamily::tikhonov());
  bool bounded = true, flat = true;
  std::string means, diffs;
  for (std::size_t j = 0; j < tik.size(); ++j) {
    const auto s = summarize(tik[j]);
    bounded = bounded && s.mean <= kExcessBound;
    means += fmt("%s%.4f (SE %.4f)", j ? ", " : "", s.mean, s.standard_error);
    if (j > 0) {
      std::vector<double> d(n);
      for (int r = 0; r < n; ++r) d[r] = tik[j][r] - tik[j - 1][r];
      const auto sd = summarize(d);
      flat = flat && sd.mean <= kGrowthStandardErrors * sd.standard_error;
      diffs += fmt("%s%+.4f (paired SE %.4f)", j > 1 ? ", " : "", sd.mean, sd.standard_error);
    }
  }
  const auto cut = sweep(SmootherFamily::cutoff());
  const double secs = seconds_since(t0);
  report(9, "excess statistic bounded in p", bounded && flat && secs < 300.0,
         fmt("tikhonov, lambda = k^-1, p = 50/200/400: mean %s (bound %.2f); %.1f s", means.c_str(), kExcessBound, secs));
  info("consecutive changes " + diffs + fmt(" (allowed: %.0f paired SE)", kGrowthStandardErrors));
  info(fmt("cutoff family, same sweep: means %.4f, %.4f, %.4f", summarize(cut[0]).mean, summarize(cut[1]).mean,
           summarize(cut[2]).mean));
}

// 10. Byte-identical bench output on re-run.
void criterion10() {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "specreg_acceptance";
  fs::create_directories(dir);
  const auto cfg = dir / "bench.json";
  io::write_text(cfg, R"({
  "problem": {"generator": {"spectrum": {"kind": "polynomial", "p": 200, "exponent": 2},
                            "signal": {"kind": "polynomial", "exponent": 1},
                            "sigma": 0.05}},
  "family": {"kind": "cutoff"},
  "gamma": 0.1,
  "mode": "unknown",
  "replications": 200,
  "seed": 20240601
})");
  std::vector<std::string> texts;
  for (int i = 0; i < 2; ++i) {
    const auto out = dir / ("run" + std::to_string(i) + ".json");
    std::ostringstream o, e;
    const int code = cli::run({"bench", "--config", cfg.string(), "--out", out.string(), "--threads",
                               std::to_string(i == 0 ? 1 : 4)},
                              o, e);
    if (code != cli::kOk) {
      report(10, "end-to-end determinism", false, "bench exited with " + std::to_string(code) + ": " + e.str());
      return;
    }
    texts.push_back(io::read_text(out));
    texts.push_back(io::read_text(dir / ("run" + std::to_string(i) + ".replications.csv")));
  }
  const bool same = texts[0] == texts[2] && texts[1] == texts[3];
  report(10, "end-to-end determinism", same,
         fmt("two bench runs (1 and 4 threads): JSON %zu bytes %s, CSV %zu bytes %s", texts[0].size(),
             texts[0] == texts[2] ? "identical" : "DIFFERENT", texts[1].size(), texts[1] == texts[3] ? "identical" : "DIFFERENT"));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion1();
  criteria2and3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  std::printf("%d of 10 criteria failed, total %.1f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
