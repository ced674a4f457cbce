#include "specreg/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "specreg/error.hpp"

namespace specreg {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kBracketShrink = 1e-12;
constexpr int kMaxBisections = 60;

void check_sizes(std::span<const double> h, const Spectrum& spectrum) {
  if (h.size() != spectrum.effective_rank()) {
    throw InvalidArgument("dimension error: h length " + std::to_string(h.size()) +
                          " != effective rank " + std::to_string(spectrum.effective_rank()));
  }
}

// w(k) = (2h - h^2) / lambda and its Euclidean norm, computed with scaling so
// that severely ill-posed spectra (lambda ~ 1e-200) do not overflow w^2.
struct ScaledWeights {
  std::vector<double> w;
  double wmax = 0.0;
  double scaled_sum2 = 0.0;  // sum (w / wmax)^2

  double norm() const { return wmax * std::sqrt(scaled_sum2); }
};

ScaledWeights tilde_weights(std::span<const double> h, const Spectrum& spectrum) {
  check_sizes(h, spectrum);
  ScaledWeights s;
  s.w.resize(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    s.w[k] = (2.0 * h[k] - h[k] * h[k]) / spectrum[k];
    s.wmax = std::max(s.wmax, s.w[k]);
  }
  if (s.wmax > 0.0) {
    for (double v : s.w) s.scaled_sum2 += (v / s.wmax) * (v / s.wmax);
  }
  return s;
}

// Taylor series F(x) = sum_{n>=2} (n-1)/n 2^{n-1} x^n, used where the closed
// form cancels (F(x) ~ x^2 while its terms are ~ x).
double big_f_series(double x) {
  double term = 2.0 * x * x;  // 2^{n-1} x^n at n = 2
  double sum = 0.0;
  for (int n = 2; n < 60; ++n) {
    const double add = term * (n - 1) / n;
    sum += add;
    if (add < 1e-17 * sum) break;
    term *= 2.0 * x;
  }
  return sum;
}

double objective(std::span<const double> rho, double mu) {
  double g = 0.0;
  for (double r : rho) g += big_f(mu * r);
  return g;
}

}  // namespace

double pen_u(std::span<const double> h, const Spectrum& spectrum) {
  check_sizes(h, spectrum);
  double s = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) s += h[k] / spectrum[k];
  return 2.0 * s;
}

double pen_cv(std::span<const double> h) {
  double s = 0.0;
  for (double v : h) s += v;
  return 2.0 * s;
}

double d_of_alpha(std::span<const double> h, const Spectrum& spectrum) {
  return kSqrt2 * tilde_weights(h, spectrum).norm();
}

std::vector<double> rho_weights(std::span<const double> h, const Spectrum& spectrum) {
  auto s = tilde_weights(h, spectrum);
  if (!(s.wmax > 0.0)) throw NumericalError("degenerate smoother: h is identically zero");
  const double root = std::sqrt(s.scaled_sum2);
  for (auto& v : s.w) v = (v / s.wmax) / root;
  return std::move(s.w);
}

double big_f(double x) {
  if (!(x >= 0.0) || !(x < 0.5)) throw InvalidArgument("domain error: F(x) requires 0 <= x < 1/2");
  if (x < 0.01) return big_f_series(x);
  const double one_minus = 1.0 - 2.0 * x;
  return 0.5 * std::log1p(-2.0 * x) + x + 2.0 * x * x / one_minus;
}

MuSolution solve_mu(std::span<const double> h, const Spectrum& spectrum, double log_ratio) {
  const auto rho = rho_weights(h, spectrum);
  if (std::isnan(log_ratio)) throw InvalidArgument("invalid input: log_ratio is NaN");
  MuSolution sol;
  if (log_ratio < 0.0) {
    sol.clamped = true;
    log_ratio = 0.0;
  }
  if (log_ratio == 0.0) return sol;

  const double rmax = *std::max_element(rho.begin(), rho.end());
  double lo = 0.0;
  double hi = (1.0 - kBracketShrink) / (2.0 * rmax);
  double g_hi = objective(rho, hi);
  if (!(g_hi >= log_ratio)) {
    throw NumericalError("root not bracketed: log(D/D_top) = " + std::to_string(log_ratio) +
                         " exceeds the F bracket limit");
  }
  double g_lo = 0.0;
  for (; sol.iterations < kMaxBisections; ++sol.iterations) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g = objective(rho, mid);
    if (g < log_ratio) {
      lo = mid;
      g_lo = g;
    } else {
      hi = mid;
      g_hi = g;
    }
  }
  if (log_ratio - g_lo <= g_hi - log_ratio) {
    sol.mu = lo;
    sol.residual = log_ratio - g_lo;
  } else {
    sol.mu = hi;
    sol.residual = g_hi - log_ratio;
  }
  if (sol.residual > 1e-10 * std::max(1.0, log_ratio)) {
    throw NumericalError("mu solver did not converge: residual " + std::to_string(sol.residual));
  }
  return sol;
}

QPlusDetail q_plus_detail(std::span<const double> h, const Spectrum& spectrum, double d_ref) {
  if (!(d_ref > 0.0) || !std::isfinite(d_ref)) throw InvalidArgument("invalid input: D reference must be positive");
  QPlusDetail out;
  out.d = d_of_alpha(h, spectrum);
  out.log_ratio = std::log(out.d / d_ref);
  out.mu = solve_mu(h, spectrum, out.log_ratio);
  out.log_ratio = std::max(out.log_ratio, 0.0);
  if (out.mu.mu == 0.0) return out;
  const auto rho = rho_weights(h, spectrum);
  double s = 0.0;
  for (double r : rho) s += r * r / (1.0 - 2.0 * out.mu.mu * r);
  out.q_plus = 2.0 * out.d * out.mu.mu * s;
  return out;
}

double q_plus(std::span<const double> h, const Spectrum& spectrum, double d_ref) {
  return q_plus_detail(h, spectrum, d_ref).q_plus;
}

void validate_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 0.25)) {
    throw InvalidArgument("invalid input: gamma must lie in (0, 1/4), got " + std::to_string(gamma));
  }
}

double total_pen(std::span<const double> h, const Spectrum& spectrum, double gamma, double d_ref) {
  validate_gamma(gamma);
  return pen_u(h, spectrum) + (1.0 + gamma) * q_plus(h, spectrum, d_ref);
}

PenaltyTable build_penalty_table(const SmootherTable& profile, const Spectrum& spectrum, double gamma) {
  validate_gamma(gamma);
  if (profile.rows.empty() || profile.rows.size() != profile.alphas.size()) {
    throw InvalidArgument("invalid input: smoother table is empty or misaligned");
  }
  PenaltyTable table;
  table.gamma = gamma;
  table.profile = profile;
  const double d_ref = d_of_alpha(profile.rows.back(), spectrum);
  if (!(d_ref > 0.0)) throw NumericalError("degenerate smoother: D(alpha_top) = 0");

  table.rows.reserve(profile.rows.size());
  for (std::size_t i = 0; i < profile.rows.size(); ++i) {
    const auto& h = profile.rows[i];
    PenaltyRow row;
    row.alpha = profile.alphas[i];
    row.pen_u = pen_u(h, spectrum);
    row.pen_cv = pen_cv(h);
    const auto q = q_plus_detail(h, spectrum, d_ref);
    row.d = q.d;
    row.mu = q.mu.mu;
    row.mu_residual = q.mu.residual;
    row.mu_clamped = q.mu.clamped;
    row.log_ratio = q.log_ratio;
    row.q_plus = q.q_plus;
    row.pen_total = row.pen_u + (1.0 + gamma) * row.q_plus;
    for (std::size_t k = 0; k < h.size(); ++k) {
      const double r = 1.0 - h[k];
      row.h_lambda_norm2 += h[k] * h[k] / spectrum[k];
      row.one_minus_h_norm2 += r * r;
      row.one_minus_h_sq_norm2 += r * r * r * r;
      row.max_h_over_lambda = std::max(row.max_h_over_lambda, h[k] / spectrum[k]);
    }
    table.rows.push_back(row);
  }
  table.psi = table.rows.front().one_minus_h_norm2 > 0.0 ? psi(table)
                                                         : std::numeric_limits<double>::infinity();
  return table;
}

PenaltyTable build_penalty_table(const SmootherFamily& family, const AlphaGrid& grid,
                                 const Spectrum& spectrum, double gamma) {
  return build_penalty_table(h_table(family, grid, spectrum), spectrum, gamma);
}

double psi(const PenaltyTable& table) {
  if (table.rows.empty()) throw InvalidArgument("invalid input: empty penalty table");
  const auto& floor_row = table.rows.front();
  const auto& top_row = table.rows.back();
  if (!(floor_row.one_minus_h_norm2 > 0.0)) {
    throw NumericalError("variance estimation impossible at alpha_floor: ||1 - h|| = 0");
  }
  // Range of the residual variance scale over the grid; >= 1 for ordered families.
  const double spread = top_row.one_minus_h_norm2 / floor_row.one_minus_h_norm2;
  const double loglog = std::log(std::log1p(spread));
  const double iterated = std::sqrt(std::max(loglog, 0.0));
  const double pen_term = std::log1p(floor_row.pen_total / top_row.pen_total);
  return (iterated + pen_term) / std::sqrt(floor_row.one_minus_h_norm2);
}

ConditionsReport check_conditions(const PenaltyTable& table, const Spectrum& spectrum) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  ConditionsReport report;
  report.c2_hat = kInf;
  if (!table.profile.rows.empty() && table.profile.rows.front().size() != spectrum.effective_rank()) {
    throw InvalidArgument("dimension error: penalty table does not match the spectrum");
  }
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const double half_pen_u = 0.5 * row.pen_u;
    const double first = half_pen_u > 0.0 ? row.h_lambda_norm2 / half_pen_u : kInf;
    const double spread_term = row.log_ratio > 0.0 ? row.h_lambda_norm2 / row.log_ratio : kInf;
    const double second = row.d > 0.0 ? (spread_term + row.max_h_over_lambda) / row.d : kInf;
    report.first_ratio.push_back(first);
    report.second_ratio.push_back(second);
    const double m = std::min(first, second);
    if (m < report.c2_hat) {
      report.c2_hat = m;
      report.argmin_row = i;
    }
  }
  return report;
}

Prop7Report verify_prop7(const PenaltyTable& table, double slack) {
  constexpr std::size_t kMaxMessages = 20;
  Prop7Report report;
  const double d_ref = table.d_ref();
  auto note = [&](const std::string& what, std::size_t i, double lhs, double rhs) {
    if (report.messages.size() >= kMaxMessages) return;
    std::ostringstream os;
    os.precision(17);
    os << what << " at row " << i << " (alpha=" << table.rows[i].alpha << "): " << lhs << " vs " << rhs;
    report.messages.push_back(os.str());
  };
  // a >= b up to relative slack.
  auto geq = [slack](double a, double b) { return a >= b - slack * std::max(std::abs(a), std::abs(b)); };

  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const double log_r = row.log_ratio;
    ++report.rows_checked;

    const double by_sqrt = row.d * std::sqrt(log_r);
    const double by_mu = row.mu > 0.0 ? row.d * log_r / row.mu : 0.0;
    const double lower_q = std::max(by_sqrt, by_mu);
    if (!geq(row.q_plus, lower_q)) {
      ++report.failures_a;
      note("(a) Q+ >= D max{sqrt(log r), log r / mu}", i, row.q_plus, lower_q);
    }

    const double lower_mu = std::min(0.5 * std::sqrt(log_r), 0.25);
    if (!geq(row.mu, lower_mu)) {
      ++report.failures_b;
      note("(b) mu >= min{sqrt(log r)/2, 1/4}", i, row.mu, lower_mu);
    }

    if (log_r >= 2.0) {
      ++report.rows_with_large_ratio;
      const double mq = row.mu * row.q_plus;
      const double l = std::log(mq / d_ref);
      // log <= 0 makes the right side nonpositive, so the bound holds trivially.
      if (l > 0.0) {
        const double rhs = mq / l;
        report.worst_ratio_c = std::max(report.worst_ratio_c, rhs / row.d);
        if (!geq(row.d, rhs)) {
          ++report.failures_c;
          note("(c) D >= mu Q+ / log(mu Q+ / D_top)", i, row.d, rhs);
        }
      }
    }
  }
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = i + 1; j < table.rows.size(); ++j) {
      const auto& a = table.rows[i];
      const auto& b = table.rows[j];
      if (!(b.q_plus > 0.0)) continue;
      ++report.pairs_checked;
      const double lhs = a.d / b.d;
      const double rhs = a.q_plus / b.q_plus;
      report.worst_ratio_d = std::max(report.worst_ratio_d, lhs / rhs);
      if (!geq(rhs, lhs)) {
        ++report.failures_d;
        note("(d) D(a1)/D(a2) <= Q+(a1)/Q+(a2) with a2 = row " + std::to_string(j), i, lhs, rhs);
      }
    }
  }
  return report;
}

}  // namespace specreg
