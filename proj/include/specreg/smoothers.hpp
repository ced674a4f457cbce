#pragma once

// Ordered spectral smoother families h_alpha(k) = H_alpha(lambda(k)) in [0, 1].
//
// Convention throughout: larger alpha means more smoothing, so h_alpha is
// pointwise nonincreasing in alpha and lim_{alpha -> 0} h_alpha = 1.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "specreg/spectral.hpp"

namespace specreg {

enum class SmootherKind { cutoff, tikhonov, landweber };

std::string to_string(SmootherKind kind);
SmootherKind smoother_kind_from_string(const std::string& name);

struct SmootherFamily {
  SmootherKind kind = SmootherKind::tikhonov;
  // Landweber relaxation step; 1 / lambda(1) when unset.
  std::optional<double> tau;

  static SmootherFamily cutoff() { return {SmootherKind::cutoff, std::nullopt}; }
  static SmootherFamily tikhonov() { return {SmootherKind::tikhonov, std::nullopt}; }
  static SmootherFamily landweber(std::optional<double> step = std::nullopt) {
    return {SmootherKind::landweber, step};
  }
};

/// Strictly increasing positive grid alpha_floor = a_1 < ... < a_M = alpha_top.
class AlphaGrid {
 public:
  explicit AlphaGrid(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  double floor() const { return values_.front(); }
  double top() const { return values_.back(); }

 private:
  std::vector<double> values_;
};

/// h profiles evaluated on a grid: rows[i][k] = h_{alpha_i}(k).
struct SmootherTable {
  std::vector<double> alphas;
  std::vector<std::vector<double>> rows;
};

// Number of retained components for the cutoff family, ceil(1/alpha).
std::size_t cutoff_index(double alpha);

std::vector<double> h_values(const SmootherFamily& family, double alpha, const Spectrum& spectrum);

SmootherTable h_table(const SmootherFamily& family, const AlphaGrid& grid, const Spectrum& spectrum);

struct OrderingViolation {
  enum class Kind {
    not_monotone_in_lambda,  // h_{alpha_1}(k) < h_{alpha_1}(k + 1) although lambda(k) >= lambda(k + 1)
    crossing,                // profiles alpha_1, alpha_2 cross: one is larger at k, the other at k_prime
    wrong_direction,         // alpha_1 < alpha_2 but h_{alpha_1}(k) < h_{alpha_2}(k)
  };
  Kind kind;
  std::size_t alpha_index_1;
  std::size_t alpha_index_2;
  std::size_t k;
  std::size_t k_prime;

  std::string describe() const;
};

struct OrderingReport {
  std::optional<OrderingViolation> violation;
  bool ordered() const { return !violation.has_value(); }
};

OrderingReport check_ordered(const SmootherTable& table);
OrderingReport check_ordered(const SmootherFamily& family, const AlphaGrid& grid,
                             const Spectrum& spectrum);

/// alpha_floor is the smallest grid point with ||1 - h||^2 >= min_residual_norm2.
struct AlphaFloorRule {
  double min_residual_norm2 = 0.0;

  static AlphaFloorRule none() { return {0.0}; }
  // ||1 - h_{alpha_floor}||^2 >= max(10, p / 10).
  static AlphaFloorRule standard(std::size_t p);
};

AlphaGrid default_grid(const SmootherFamily& family, const Spectrum& spectrum, std::size_t points,
                       const AlphaFloorRule& floor_rule);

// Drops leading grid points violating the floor rule.
AlphaGrid apply_floor(const SmootherFamily& family, const AlphaGrid& grid, const Spectrum& spectrum,
                      const AlphaFloorRule& floor_rule);

// Sum_k (1 - h(k))^2.
double one_minus_h_norm2(std::span<const double> h);

}  // namespace specreg
