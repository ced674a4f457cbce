#pragma once

// Spectral coordinates of the linear model Y = X beta + sigma xi.
//
// With X^T X psi_k = lambda(k) psi_k, the observation reduces to
//   y(k) = <X^T Y, psi_k> / lambda(k) = beta(k) + sigma xi'(k) / sqrt(lambda(k)),
// with xi'(k) iid standard normal. Everything downstream works on {lambda, y}.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

#include "specreg/random.hpp"

namespace specreg {

/// Eigenvalues of X^T X in nonincreasing order, all strictly positive.
/// Only retained (non-truncated) eigenvalues are stored.
class Spectrum {
 public:
  explicit Spectrum(std::vector<double> eigenvalues);

  std::span<const double> eigenvalues() const { return eigenvalues_; }
  double operator[](std::size_t k) const { return eigenvalues_[k]; }
  std::size_t effective_rank() const { return eigenvalues_.size(); }
  std::size_t size() const { return eigenvalues_.size(); }
  double largest() const { return eigenvalues_.front(); }
  double smallest() const { return eigenvalues_.back(); }

  friend bool operator==(const Spectrum&, const Spectrum&) = default;

 private:
  std::vector<double> eigenvalues_;
};

// lambda(k) = k^-exponent, k = 1..p.
Spectrum polynomial_spectrum(std::size_t p, double exponent);
// lambda(k) = exp(-kappa k), k = 1..p.
Spectrum exponential_spectrum(std::size_t p, double kappa);

/// Thin SVD of a design matrix X = U S V^T, truncated to the retained rank.
/// The basis vectors psi_k are the columns of V and lambda(k) = s_k^2.
class DecomposedDesign {
 public:
  DecomposedDesign(Spectrum spectrum, Eigen::MatrixXd basis, Eigen::MatrixXd left,
                   std::size_t n);

  const Spectrum& spectrum() const { return spectrum_; }
  // p x r, orthonormal columns psi_1..psi_r.
  const Eigen::MatrixXd& basis() const { return basis_; }
  // n x r left singular vectors.
  const Eigen::MatrixXd& left() const { return left_; }
  std::size_t n() const { return n_; }
  std::size_t p() const { return static_cast<std::size_t>(basis_.rows()); }

 private:
  Spectrum spectrum_;
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd left_;
  std::size_t n_;
};

/// Simulation ground truth in spectral coordinates.
struct SpectralModel {
  SpectralModel(Spectrum spectrum, std::vector<double> coefficients, double sigma);

  Spectrum spectrum;
  std::vector<double> coefficients;  // beta(k) = <beta, psi_k>
  double sigma;
};

/// An observation y(k) paired with its spectrum.
struct SpectralData {
  SpectralData(Spectrum spectrum, std::vector<double> y);

  Spectrum spectrum;
  std::vector<double> y;
  // Squared norm of Y projected on the orthogonal complement of range(X) and
  // its dimension n - r. Only populated when the data came from a raw design.
  double orthogonal_residual2 = 0.0;
  std::size_t orthogonal_dof = 0;
};

DecomposedDesign decompose_design(const Eigen::MatrixXd& x, double rank_tol = 1e-12);

SpectralData to_spectral(const DecomposedDesign& design, std::span<const double> y);

// r independent standard normal draws xi'(1..r).
std::vector<double> draw_noise(RandomStream& stream, std::size_t r);

// y(k) = beta(k) + sigma * noise(k) / sqrt(lambda(k)).
SpectralData observe(const SpectralModel& model, std::span<const double> noise);

SpectralData simulate_observation(const SpectralModel& model, RandomStream& stream);

// sum_k filtered(k) psi_k, a length-p coefficient vector.
std::vector<double> reconstruct_estimate(const DecomposedDesign& design,
                                         std::span<const double> filtered);

}  // namespace specreg
