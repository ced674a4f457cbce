#pragma once

// Experiment configuration: a single JSON document.
//
// {
//   "problem": one of
//       {"model": {"eigenvalues": [...], "coefficients": [...], "sigma": s}}
//       {"model_file": "problem.json"}                         same record in a file
//       {"data": {"eigenvalues": [...], "y": [...]}}           observed spectral data
//       {"matrix": {"x": "X.csv", "y": "Y.csv"}}               raw design (y optional)
//       {"generator": {"spectrum": {"kind": "polynomial", "p": 200, "exponent": 2}
//                                | {"kind": "exponential", "p": 30, "kappa": 1},
//                      "signal": {"kind": "polynomial", "exponent": 1, "scale": 1}
//                              | {"kind": "exponential", "rate": 0.25, "scale": 1}
//                              | {"kind": "zero"} | {"kind": "explicit", "values": [...]},
//                      "sigma": 0.05}}
//   "family": {"kind": "cutoff" | "tikhonov" | "landweber", "tau": optional},
//   "grid": [explicit alphas] | {"points": M, "floor": "standard" | "none" | number},
//   "gamma": 0.1, "mode": "unknown" | "known", "penalty": "adaptive" | "unbiased",
//   "sigma2": known noise variance for `select` on observed data,
//   "include_orthogonal_residual": false, "rank_tol": 1e-12, "bound_constant": 1,
//   "replications": 1, "seed": 0
// }
//
// Relative file paths resolve against the directory holding the config file.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "specreg/selection.hpp"
#include "specreg/smoothers.hpp"
#include "specreg/spectral.hpp"

namespace specreg {

struct MatrixSource {
  std::filesystem::path x;
  std::optional<std::filesystem::path> y;
};

using ProblemSource = std::variant<SpectralModel, SpectralData, MatrixSource>;

struct GridSpec {
  std::optional<std::vector<double>> values;
  std::size_t points = 100;
  // Empty means AlphaFloorRule::standard(p).
  std::optional<AlphaFloorRule> floor;
};

struct ExperimentConfig {
  explicit ExperimentConfig(ProblemSource source) : problem(std::move(source)) {}

  ProblemSource problem;
  SmootherFamily family;
  GridSpec grid;
  double gamma = 0.1;
  NoiseMode mode = NoiseMode::unknown;
  PenaltyChoice penalty = PenaltyChoice::adaptive;
  std::optional<double> sigma2;
  bool include_orthogonal_residual = false;
  double rank_tol = 1e-12;
  double bound_constant = 1.0;
  std::size_t replications = 1;
  std::uint64_t seed = 0;
};

// Throws InvalidArgument on any schema violation.
ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// {"eigenvalues": [...], "coefficients": [...], "sigma": s}
SpectralModel parse_spectral_model(const std::string& json_text);

AlphaGrid resolve_grid(const GridSpec& spec, const SmootherFamily& family, const Spectrum& spectrum);

}  // namespace specreg
