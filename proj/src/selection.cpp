#include "specreg/selection.hpp"

#include <cmath>

#include "specreg/error.hpp"

namespace specreg {

namespace {

void check_sizes(const SpectralData& data, std::span<const double> h) {
  if (h.size() != data.y.size()) {
    throw InvalidArgument("dimension error: h length " + std::to_string(h.size()) +
                          " != data length " + std::to_string(data.y.size()));
  }
}

}  // namespace

std::string to_string(NoiseMode mode) { return mode == NoiseMode::known ? "known" : "unknown"; }

NoiseMode noise_mode_from_string(const std::string& name) {
  if (name == "known") return NoiseMode::known;
  if (name == "unknown") return NoiseMode::unknown;
  throw InvalidArgument("invalid input: mode must be 'known' or 'unknown', got '" + name + "'");
}

std::string to_string(PenaltyChoice choice) {
  return choice == PenaltyChoice::adaptive ? "adaptive" : "unbiased";
}

PenaltyChoice penalty_choice_from_string(const std::string& name) {
  if (name == "adaptive") return PenaltyChoice::adaptive;
  if (name == "unbiased") return PenaltyChoice::unbiased;
  throw InvalidArgument("invalid input: penalty must be 'adaptive' or 'unbiased', got '" + name + "'");
}

double smoothing_residual2(const SpectralData& data, std::span<const double> h) {
  check_sizes(data, h);
  double s = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double r = (1.0 - h[k]) * data.y[k];
    s += r * r;
  }
  return s;
}

double contrast_known_sigma(const SpectralData& data, std::span<const double> h, double pen, double sigma2) {
  if (!(sigma2 >= 0.0)) throw InvalidArgument("invalid input: sigma2 must be nonnegative");
  return smoothing_residual2(data, h) + sigma2 * pen;
}

double sigma_hat2(const SpectralData& data, std::span<const double> h, bool include_orthogonal_residual) {
  check_sizes(data, h);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double w = (1.0 - h[k]) * (1.0 - h[k]);
    num += data.spectrum[k] * w * data.y[k] * data.y[k];
    den += w;
  }
  if (include_orthogonal_residual) {
    num += data.orthogonal_residual2;
    den += static_cast<double>(data.orthogonal_dof);
  }
  if (!(den > 0.0)) throw NumericalError("variance estimation impossible: ||1 - h||^2 = 0");
  return num / den;
}

double contrast_unknown_sigma(const SpectralData& data, std::span<const double> h, double pen,
                              bool include_orthogonal_residual) {
  return smoothing_residual2(data, h) + sigma_hat2(data, h, include_orthogonal_residual) * pen;
}

double row_penalty(const PenaltyRow& row, PenaltyChoice choice) {
  return choice == PenaltyChoice::adaptive ? row.pen_total : row.pen_u;
}

SelectionResult select_alpha(const SpectralData& data, const PenaltyTable& table,
                             const SelectionOptions& options) {
  const auto& rows = table.rows;
  const auto& profile = table.profile.rows;
  if (rows.empty()) throw InvalidArgument("invalid input: empty grid");
  if (profile.size() != rows.size()) throw InvalidArgument("invalid input: grid and penalty table misaligned");

  SelectionResult result;
  result.contrasts.resize(rows.size());
  std::vector<double> sigma_hats(rows.size(), 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double pen = row_penalty(rows[i], options.penalty);
    if (options.mode == NoiseMode::known) {
      result.contrasts[i] = contrast_known_sigma(data, profile[i], pen, options.sigma2);
    } else {
      sigma_hats[i] = sigma_hat2(data, profile[i], options.include_orthogonal_residual);
      result.contrasts[i] = smoothing_residual2(data, profile[i]) + sigma_hats[i] * pen;
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (result.contrasts[i] <= result.contrasts[best]) best = i;
  }
  result.alpha_hat_index = best;
  result.alpha_hat = rows[best].alpha;
  if (options.mode == NoiseMode::unknown) result.sigma_hat2 = sigma_hats[best];
  const auto& h = profile[best];
  result.estimate.resize(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) result.estimate[k] = h[k] * data.y[k];
  return result;
}

CovarianceGap covariance_gap(std::span<const double> h_a, std::span<const double> h_b,
                             std::span<const double> weights) {
  if (h_a.size() != h_b.size() || h_a.size() != weights.size()) {
    throw InvalidArgument("dimension error: covariance_gap arguments differ in length");
  }
  CovarianceGap gap;
  // (1 - h_b)^2 - (1 - h_a)^2 = (h_a - h_b)(2 - h_a - h_b), summed termwise to avoid cancellation.
  double diff = 0.0;
  for (std::size_t k = 0; k < h_a.size(); ++k) {
    const double b2 = weights[k] * weights[k];
    const double d = h_a[k] - h_b[k];
    gap.lhs += d * d * b2;
    diff += d * (2.0 - h_a[k] - h_b[k]) * b2;
  }
  gap.rhs = std::abs(diff);
  return gap;
}

}  // namespace specreg
