#include "specreg/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "specreg/error.hpp"

namespace specreg {

namespace {

void check_sizes(const SpectralModel& model, std::span<const double> h) {
  if (h.size() != model.coefficients.size()) {
    throw InvalidArgument("dimension error: h length != number of coefficients");
  }
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double exact_risk(const SpectralModel& model, std::span<const double> h) {
  check_sizes(model, h);
  const auto& l = model.spectrum;
  const long double s2 = static_cast<long double>(model.sigma) * model.sigma;
  long double bias = 0.0L;
  long double var = 0.0L;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const long double r = 1.0L - h[k];
    bias += r * r * model.coefficients[k] * model.coefficients[k];
    var += static_cast<long double>(h[k]) * h[k] / l[k];
  }
  return static_cast<double>(bias + s2 * var);
}

double expected_known_contrast(const SpectralModel& model, std::span<const double> h, double pen) {
  check_sizes(model, h);
  const auto& l = model.spectrum;
  const long double s2 = static_cast<long double>(model.sigma) * model.sigma;
  long double sum = 0.0L;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const long double r = 1.0L - h[k];
    const long double b = model.coefficients[k];
    sum += r * r * (b * b + s2 / l[k]);
  }
  return static_cast<double>(sum + s2 * pen);
}

double least_squares_risk(const SpectralModel& model) {
  long double s = 0.0L;
  for (double l : model.spectrum.eigenvalues()) s += 1.0L / l;
  return static_cast<double>(static_cast<long double>(model.sigma) * model.sigma * s);
}

double variance_estimator_bias(const SpectralModel& model, std::span<const double> h) {
  check_sizes(model, h);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double w = (1.0 - h[k]) * (1.0 - h[k]);
    num += w * model.spectrum[k] * model.coefficients[k] * model.coefficients[k];
    den += w;
  }
  if (!(den > 0.0)) throw NumericalError("variance estimation impossible: ||1 - h||^2 = 0");
  return num / den;
}

std::optional<double> rbar(const SpectralModel& model, std::span<const double> h, double pen_total,
                           double q_plus, double gamma) {
  check_sizes(model, h);
  if (!(one_minus_h_norm2(h) > 0.0)) return std::nullopt;
  const double s2 = model.sigma * model.sigma;
  return exact_risk(model, h) + (1.0 + gamma) * s2 * q_plus +
         pen_total * variance_estimator_bias(model, h);
}

RiskProfile risk_profile(const SpectralModel& model, const PenaltyTable& table, PenaltyChoice choice) {
  if (table.rows.empty()) throw InvalidArgument("invalid input: empty penalty table");
  RiskProfile profile;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& h = table.profile.rows[i];
    const auto& row = table.rows[i];
    const bool adaptive = choice == PenaltyChoice::adaptive;
    profile.exact_risk.push_back(exact_risk(model, h));
    const auto value = rbar(model, h, row_penalty(row, choice), adaptive ? row.q_plus : 0.0, table.gamma);
    profile.rbar.push_back(value.value_or(std::numeric_limits<double>::infinity()));
  }
  const auto best = oracle_risk(profile);
  profile.r = best.r;
  profile.oracle_index = best.index;
  return profile;
}

OracleRisk oracle_risk(const RiskProfile& profile) {
  if (profile.rbar.empty()) throw InvalidArgument("invalid input: empty risk profile");
  OracleRisk best{profile.rbar[0], 0};
  for (std::size_t i = 1; i < profile.rbar.size(); ++i) {
    if (profile.rbar[i] < best.r) best = {profile.rbar[i], i};
  }
  return best;
}

double big_r(double x) { return x / std::log(x); }

std::optional<double> theorem_bound(double r, double sigma2, double d_ref, double psi_value,
                                    double gamma, double constant) {
  if (constant == 0.0) return r;
  if (!(sigma2 > 0.0) || !(d_ref > 0.0) || !(gamma > 0.0) || !(r > 0.0)) return std::nullopt;
  const double slack = 1.0 - constant * psi_value / gamma;
  const double x = r / (sigma2 * gamma * d_ref) + 1.0 / std::pow(gamma, 4);
  const double log_signal = std::log(r / (sigma2 * d_ref));
  if (!(slack > 0.0) || !(x > std::exp(1.0)) || !(log_signal > 0.0)) return std::nullopt;
  const double leading = (1.0 + constant * psi_value + constant / std::sqrt(log_signal)) * r;
  const double remainder = constant * sigma2 * d_ref / (slack + std::sqrt(gamma)) * big_r(x);
  return leading + remainder;
}

double excess_sup_stat(const Spectrum& spectrum, const PenaltyTable& table, std::span<const double> xi) {
  if (xi.size() != spectrum.effective_rank()) throw InvalidArgument("dimension error: noise length != effective rank");
  double sup = 0.0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& h = table.profile.rows[i];
    double eta = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
      eta += (2.0 * h[k] - h[k] * h[k]) / spectrum[k] * (xi[k] * xi[k] - 1.0);
    }
    sup = std::max(sup, eta - (1.0 + table.gamma) * table.rows[i].q_plus);
  }
  return sup;
}

double excess_sup_stat(const Spectrum& spectrum, const PenaltyTable& table, RandomStream& stream) {
  const auto xi = draw_noise(stream, spectrum.effective_rank());
  return excess_sup_stat(spectrum, table, xi);
}

SummaryStats summarize(std::span<const double> values) {
  SummaryStats s;
  const auto n = values.size();
  if (n == 0) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.variance = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
  s.standard_error = std::sqrt(s.variance / static_cast<double>(n));
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  s.median = quantile_sorted(sorted, 0.5);
  s.q90 = quantile_sorted(sorted, 0.9);
  s.q95 = quantile_sorted(sorted, 0.95);
  s.q99 = quantile_sorted(sorted, 0.99);
  return s;
}

BenchReport mc_run(const SpectralModel& model, const PenaltyTable& table, const BenchConfig& config) {
  if (config.replications < 1) throw InvalidArgument("invalid input: replications must be >= 1");
  if (table.profile.rows.empty() || table.profile.rows.front().size() != model.spectrum.effective_rank()) {
    throw InvalidArgument("dimension error: penalty table does not match the model spectrum");
  }
  auto selection = config.selection;
  if (selection.mode == NoiseMode::known) selection.sigma2 = model.sigma * model.sigma;
  const double d_ref = table.d_ref();

  std::vector<ReplicationRecord> records(config.replications);
  auto run_one = [&](std::size_t rep) {
    RandomStream stream(config.seed, rep);
    const auto noise = draw_noise(stream, model.spectrum.effective_rank());
    const auto data = observe(model, noise);
    const auto sel = select_alpha(data, table, selection);
    double loss = 0.0;
    for (std::size_t k = 0; k < sel.estimate.size(); ++k) {
      const double e = model.coefficients[k] - sel.estimate[k];
      loss += e * e;
    }
    auto& rec = records[rep];
    rec.rep = rep;
    rec.alpha_hat_index = sel.alpha_hat_index;
    rec.loss = loss;
    rec.sigma_hat2 = sel.sigma_hat2.value_or(std::numeric_limits<double>::quiet_NaN());
    rec.excess_sup = excess_sup_stat(model.spectrum, table, noise) / d_ref;
  };

  // Each replication owns its stream and its output slot, so the schedule
  // cannot change any result.
  unsigned threads = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.replications));
  if (threads <= 1) {
    for (std::size_t rep = 0; rep < config.replications; ++rep) run_one(rep);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t rep = t; rep < config.replications; rep += threads) run_one(rep);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  BenchReport report;
  report.replications = config.replications;
  report.seed = config.seed;
  report.d_ref = d_ref;
  report.psi = table.psi;
  report.alpha_hat_histogram.assign(table.rows.size(), 0);
  std::vector<double> losses, sigmas, excess;
  losses.reserve(records.size());
  excess.reserve(records.size());
  for (const auto& rec : records) {
    losses.push_back(rec.loss);
    excess.push_back(rec.excess_sup);
    if (!std::isnan(rec.sigma_hat2)) sigmas.push_back(rec.sigma_hat2);
    ++report.alpha_hat_histogram[rec.alpha_hat_index];
  }
  report.loss = summarize(losses);
  report.empirical_risk = report.loss.mean;
  report.empirical_risk_se = report.loss.standard_error;
  report.excess_sup = summarize(excess);
  if (!sigmas.empty()) report.sigma_hat2 = summarize(sigmas);

  const auto profile = risk_profile(model, table, selection.penalty);
  report.r_beta = profile.r;
  report.oracle_alpha_index = profile.oracle_index;
  report.oracle_ratio = report.empirical_risk / profile.r;
  report.theorem_bound =
      theorem_bound(profile.r, model.sigma * model.sigma, d_ref, table.psi, table.gamma, 1.0);
  report.records = std::move(records);
  return report;
}

}  // namespace specreg
