#include "specreg/spectral.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <string>

#include "specreg/error.hpp"

namespace specreg {

Spectrum::Spectrum(std::vector<double> eigenvalues) : eigenvalues_(std::move(eigenvalues)) {
  if (eigenvalues_.empty()) throw InvalidArgument("invalid input: empty spectrum");
  for (std::size_t k = 0; k < eigenvalues_.size(); ++k) {
    const double l = eigenvalues_[k];
    if (!std::isfinite(l) || !(l > 0.0)) {
      throw InvalidArgument("invalid input: eigenvalue " + std::to_string(k + 1) +
                            " is not a positive finite number");
    }
    if (k > 0 && l > eigenvalues_[k - 1]) {
      throw InvalidArgument("invalid input: eigenvalues must be nonincreasing");
    }
  }
}

Spectrum polynomial_spectrum(std::size_t p, double exponent) {
  if (p == 0) throw InvalidArgument("invalid input: p must be positive");
  if (!(exponent >= 0.0)) throw InvalidArgument("invalid input: exponent must be >= 0");
  std::vector<double> l(p);
  for (std::size_t k = 0; k < p; ++k) l[k] = std::pow(static_cast<double>(k + 1), -exponent);
  return Spectrum(std::move(l));
}

Spectrum exponential_spectrum(std::size_t p, double kappa) {
  if (p == 0) throw InvalidArgument("invalid input: p must be positive");
  if (!(kappa >= 0.0)) throw InvalidArgument("invalid input: kappa must be >= 0");
  std::vector<double> l(p);
  for (std::size_t k = 0; k < p; ++k) l[k] = std::exp(-kappa * static_cast<double>(k + 1));
  return Spectrum(std::move(l));
}

DecomposedDesign::DecomposedDesign(Spectrum spectrum, Eigen::MatrixXd basis,
                                   Eigen::MatrixXd left, std::size_t n)
    : spectrum_(std::move(spectrum)), basis_(std::move(basis)), left_(std::move(left)), n_(n) {
  const auto r = static_cast<Eigen::Index>(spectrum_.effective_rank());
  if (basis_.cols() != r || left_.cols() != r || left_.rows() != static_cast<Eigen::Index>(n_)) {
    throw InvalidArgument("dimension error: decomposition factors do not match the spectrum");
  }
}

SpectralModel::SpectralModel(Spectrum s, std::vector<double> beta, double sigma_)
    : spectrum(std::move(s)), coefficients(std::move(beta)), sigma(sigma_) {
  if (coefficients.size() != spectrum.effective_rank()) {
    throw InvalidArgument("dimension error: coefficients length " +
                          std::to_string(coefficients.size()) + " != effective rank " +
                          std::to_string(spectrum.effective_rank()));
  }
  for (double b : coefficients) {
    if (!std::isfinite(b)) throw InvalidArgument("invalid input: non-finite coefficient");
  }
  if (!std::isfinite(sigma) || sigma < 0.0) {
    throw InvalidArgument("invalid input: sigma must be a nonnegative finite number");
  }
}

SpectralData::SpectralData(Spectrum s, std::vector<double> y_) : spectrum(std::move(s)), y(std::move(y_)) {
  if (y.size() != spectrum.effective_rank()) {
    throw InvalidArgument("dimension error: y length " + std::to_string(y.size()) +
                          " != effective rank " + std::to_string(spectrum.effective_rank()));
  }
}

DecomposedDesign decompose_design(const Eigen::MatrixXd& x, double rank_tol) {
  const auto n = x.rows();
  const auto p = x.cols();
  if (p < 1 || n < p) throw InvalidArgument("invalid input: design must satisfy n >= p >= 1");
  if (!x.allFinite()) throw InvalidArgument("invalid input: design has non-finite entries");
  if (!(rank_tol >= 0.0 && rank_tol < 1.0)) throw InvalidArgument("invalid input: rank_tol must lie in [0, 1)");
  if (x.cwiseAbs().maxCoeff() == 0.0) throw NumericalError("degenerate design: all entries are zero");

  // Singular values of X directly; forming X^T X would square the condition number.
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();

  const double top = s(0) * s(0);
  std::vector<double> lambda;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    const double l = s(k) * s(k);
    if (!(l > 0.0) || l < rank_tol * top) break;
    lambda.push_back(l);
  }
  const auto r = static_cast<Eigen::Index>(lambda.size());
  return DecomposedDesign(Spectrum(std::move(lambda)), svd.matrixV().leftCols(r),
                          svd.matrixU().leftCols(r), static_cast<std::size_t>(n));
}

SpectralData to_spectral(const DecomposedDesign& design, std::span<const double> y) {
  if (y.size() != design.n()) {
    throw InvalidArgument("dimension error: Y has length " + std::to_string(y.size()) +
                          ", design has n = " + std::to_string(design.n()));
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw InvalidArgument("invalid input: Y has non-finite entries");
  }
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  // <X^T Y, psi_k> / lambda(k) = <Y, u_k> s_k / s_k^2 = <Y, u_k> / s_k.
  const Eigen::VectorXd proj = design.left().transpose() * yv;
  const auto& spectrum = design.spectrum();
  std::vector<double> coords(spectrum.effective_rank());
  for (std::size_t k = 0; k < coords.size(); ++k) {
    coords[k] = proj(static_cast<Eigen::Index>(k)) / std::sqrt(spectrum[k]);
  }
  SpectralData data(spectrum, std::move(coords));
  data.orthogonal_residual2 = (yv - design.left() * proj).squaredNorm();
  data.orthogonal_dof = design.n() - spectrum.effective_rank();
  return data;
}

std::vector<double> draw_noise(RandomStream& stream, std::size_t r) { return stream.normals(r); }

SpectralData observe(const SpectralModel& model, std::span<const double> noise) {
  const auto& spectrum = model.spectrum;
  if (noise.size() != spectrum.effective_rank()) {
    throw InvalidArgument("dimension error: noise length != effective rank");
  }
  std::vector<double> y(noise.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    y[k] = model.coefficients[k] + model.sigma * noise[k] / std::sqrt(spectrum[k]);
  }
  return SpectralData(spectrum, std::move(y));
}

SpectralData simulate_observation(const SpectralModel& model, RandomStream& stream) {
  const auto noise = draw_noise(stream, model.spectrum.effective_rank());
  return observe(model, noise);
}

std::vector<double> reconstruct_estimate(const DecomposedDesign& design,
                                         std::span<const double> filtered) {
  if (filtered.size() != design.spectrum().effective_rank()) {
    throw InvalidArgument("dimension error: filtered length != effective rank");
  }
  const Eigen::Map<const Eigen::VectorXd> f(filtered.data(), static_cast<Eigen::Index>(filtered.size()));
  const Eigen::VectorXd beta = design.basis() * f;
  return {beta.data(), beta.data() + beta.size()};
}

}  // namespace specreg
