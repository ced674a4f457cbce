#include "specreg/smoothers.hpp"

#include <algorithm>
#include <cmath>

#include "specreg/error.hpp"

namespace specreg {

namespace {

// Absolute slack for comparisons between h values, which all live in [0, 1].
constexpr double kOrderTol = 1e-14;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double landweber_step(const SmootherFamily& family, const Spectrum& spectrum) {
  const double tau = family.tau.value_or(1.0 / spectrum.largest());
  if (!std::isfinite(tau) || !(tau > 0.0)) throw InvalidArgument("invalid input: landweber step must be positive");
  // tau * lambda(1) can exceed 1 by an ulp when tau defaults to 1 / lambda(1).
  if (tau * spectrum.largest() > 1.0 + 1e-12) {
    throw InvalidArgument("unstable step: landweber tau * lambda(1) > 1");
  }
  return tau;
}

// ceil(1 / alpha) as a real number, at least 1. 1 / (1 / m) may land an ulp
// above m; snap those back before taking ceil.
double index_parameter(double alpha) {
  const double q = 1.0 / alpha;
  const double nearest = std::round(q);
  const double m = std::abs(q - nearest) <= 1e-9 * std::max(1.0, q) ? nearest : std::ceil(q);
  return std::max(m, 1.0);
}

}  // namespace

std::string to_string(SmootherKind kind) {
  switch (kind) {
    case SmootherKind::cutoff: return "cutoff";
    case SmootherKind::tikhonov: return "tikhonov";
    case SmootherKind::landweber: return "landweber";
  }
  return "unknown";
}

SmootherKind smoother_kind_from_string(const std::string& name) {
  if (name == "cutoff") return SmootherKind::cutoff;
  if (name == "tikhonov") return SmootherKind::tikhonov;
  if (name == "landweber") return SmootherKind::landweber;
  throw InvalidArgument("invalid input: unknown smoother family '" + name + "'");
}

AlphaGrid::AlphaGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidArgument("invalid input: empty alpha grid");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || !(values_[i] > 0.0)) {
      throw InvalidArgument("invalid input: grid values must be positive and finite");
    }
    if (i > 0 && !(values_[i] > values_[i - 1])) {
      throw InvalidArgument("invalid input: grid values must be strictly increasing");
    }
  }
}

std::size_t cutoff_index(double alpha) {
  return static_cast<std::size_t>(std::min(index_parameter(alpha), 1e18));
}

std::vector<double> h_values(const SmootherFamily& family, double alpha, const Spectrum& spectrum) {
  if (!std::isfinite(alpha) || !(alpha > 0.0)) throw InvalidArgument("invalid input: alpha must be positive");
  const auto p = spectrum.effective_rank();
  std::vector<double> h(p);
  switch (family.kind) {
    case SmootherKind::cutoff: {
      const auto m = cutoff_index(alpha);
      for (std::size_t k = 0; k < p; ++k) h[k] = (k + 1 <= m) ? 1.0 : 0.0;
      break;
    }
    case SmootherKind::tikhonov:
      for (std::size_t k = 0; k < p; ++k) h[k] = clamp01(spectrum[k] / (spectrum[k] + alpha));
      break;
    case SmootherKind::landweber: {
      const double tau = landweber_step(family, spectrum);
      const double m = index_parameter(alpha);
      for (std::size_t k = 0; k < p; ++k) {
        // 1 - (1 - tau lambda)^m, evaluated without cancellation for small tau lambda.
        const double base = std::min(tau * spectrum[k], 1.0);
        h[k] = clamp01(-std::expm1(m * std::log1p(-base)));
      }
      break;
    }
  }
  return h;
}

SmootherTable h_table(const SmootherFamily& family, const AlphaGrid& grid, const Spectrum& spectrum) {
  SmootherTable table;
  table.alphas.assign(grid.values().begin(), grid.values().end());
  table.rows.reserve(grid.size());
  for (double a : grid.values()) table.rows.push_back(h_values(family, a, spectrum));
  return table;
}

std::string OrderingViolation::describe() const {
  const auto i1 = std::to_string(alpha_index_1);
  const auto i2 = std::to_string(alpha_index_2);
  switch (kind) {
    case Kind::not_monotone_in_lambda:
      return "h at grid index " + i1 + " increases from k=" + std::to_string(k + 1) +
             " to k=" + std::to_string(k_prime + 1);
    case Kind::crossing:
      return "profiles at grid indices " + i1 + " and " + i2 + " cross: h_" + i1 + " < h_" + i2 +
             " at k=" + std::to_string(k_prime + 1) + " but h_" + i1 + " > h_" + i2 +
             " at k=" + std::to_string(k + 1);
    case Kind::wrong_direction:
      return "grid index " + i1 + " smooths more than larger grid index " + i2 + " at k=" +
             std::to_string(k + 1);
  }
  return "unknown violation";
}

OrderingReport check_ordered(const SmootherTable& table) {
  using Kind = OrderingViolation::Kind;
  const auto m = table.rows.size();
  for (std::size_t i = 0; i < m; ++i) {
    const auto& h = table.rows[i];
    for (std::size_t k = 0; k + 1 < h.size(); ++k) {
      if (h[k + 1] > h[k] + kOrderTol) return {OrderingViolation{Kind::not_monotone_in_lambda, i, i, k, k + 1}};
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto& a = table.rows[i];
      const auto& b = table.rows[j];
      std::optional<std::size_t> a_below, a_above;
      for (std::size_t k = 0; k < a.size() && !(a_below && a_above); ++k) {
        if (!a_below && a[k] < b[k] - kOrderTol) a_below = k;
        if (!a_above && a[k] > b[k] + kOrderTol) a_above = k;
      }
      if (a_below && a_above) return {OrderingViolation{Kind::crossing, i, j, *a_above, *a_below}};
      if (a_below) return {OrderingViolation{Kind::wrong_direction, i, j, *a_below, *a_below}};
    }
  }
  return {};
}

OrderingReport check_ordered(const SmootherFamily& family, const AlphaGrid& grid,
                             const Spectrum& spectrum) {
  return check_ordered(h_table(family, grid, spectrum));
}

AlphaFloorRule AlphaFloorRule::standard(std::size_t p) {
  return {std::max(10.0, static_cast<double>(p) / 10.0)};
}

double one_minus_h_norm2(std::span<const double> h) {
  double s = 0.0;
  for (double v : h) s += (1.0 - v) * (1.0 - v);
  return s;
}

AlphaGrid apply_floor(const SmootherFamily& family, const AlphaGrid& grid, const Spectrum& spectrum,
                      const AlphaFloorRule& floor_rule) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto h = h_values(family, grid[i], spectrum);
    if (one_minus_h_norm2(h) >= floor_rule.min_residual_norm2) {
      return AlphaGrid({grid.values().begin() + static_cast<std::ptrdiff_t>(i), grid.values().end()});
    }
  }
  throw NumericalError("alpha floor infeasible: no grid point has ||1 - h||^2 >= " +
                       std::to_string(floor_rule.min_residual_norm2));
}

AlphaGrid default_grid(const SmootherFamily& family, const Spectrum& spectrum, std::size_t points,
                       const AlphaFloorRule& floor_rule) {
  if (points < 2) throw InvalidArgument("invalid input: grid needs at least 2 points");
  std::vector<double> values;
  if (family.kind == SmootherKind::cutoff) {
    const auto p = spectrum.effective_rank();
    for (std::size_t m = p; m >= 1; --m) values.push_back(1.0 / static_cast<double>(m));
  } else {
    const double lo = spectrum.smallest() / 10.0;
    const double hi = 10.0 * spectrum.largest();
    const double step = std::log(hi / lo) / static_cast<double>(points - 1);
    values.resize(points);
    for (std::size_t i = 0; i < points; ++i) values[i] = lo * std::exp(step * static_cast<double>(i));
    values.front() = lo;
    values.back() = hi;
  }
  return apply_floor(family, AlphaGrid(std::move(values)), spectrum, floor_rule);
}

}  // namespace specreg
