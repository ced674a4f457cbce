#include "specreg/config.hpp"

#include <cmath>
#include <set>

#include "json.hpp"
#include "specreg/error.hpp"
#include "specreg/io.hpp"

namespace specreg {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument("config error: " + where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw InvalidArgument("config error: unknown key '" + key + "' in " + where);
  }
}

double get_number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw InvalidArgument("config error: " + where + " is missing '" + key + "'");
  if (!j.at(key).is_number()) throw InvalidArgument("config error: " + where + "." + key + " must be a number");
  return j.at(key).get<double>();
}

std::size_t get_count(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw InvalidArgument("config error: " + where + " is missing '" + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw InvalidArgument("config error: " + where + "." + key + " must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

std::vector<double> get_numbers(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw InvalidArgument("config error: " + where + "." + key + " must be an array of numbers");
  }
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw InvalidArgument("config error: " + where + "." + key + " must hold numbers only");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string get_string(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw InvalidArgument("config error: " + where + "." + key + " must be a string");
  }
  return j.at(key).get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

SpectralModel model_from_json(const json& j, const std::string& where) {
  reject_unknown_keys(j, {"eigenvalues", "coefficients", "sigma"}, where);
  return SpectralModel(Spectrum(get_numbers(j, "eigenvalues", where)), get_numbers(j, "coefficients", where),
                       get_number(j, "sigma", where));
}

Spectrum generator_spectrum(const json& j) {
  const std::string where = "problem.generator.spectrum";
  const auto kind = get_string(j, "kind", where);
  if (kind == "polynomial") {
    reject_unknown_keys(j, {"kind", "p", "exponent"}, where);
    return polynomial_spectrum(get_count(j, "p", where), get_number(j, "exponent", where));
  }
  if (kind == "exponential") {
    reject_unknown_keys(j, {"kind", "p", "kappa"}, where);
    return exponential_spectrum(get_count(j, "p", where), get_number(j, "kappa", where));
  }
  throw InvalidArgument("config error: unknown spectrum kind '" + kind + "'");
}

std::vector<double> generator_signal(const json& j, std::size_t p) {
  const std::string where = "problem.generator.signal";
  const auto kind = get_string(j, "kind", where);
  std::vector<double> beta(p, 0.0);
  const double scale = j.contains("scale") ? get_number(j, "scale", where) : 1.0;
  if (kind == "polynomial") {
    reject_unknown_keys(j, {"kind", "exponent", "scale"}, where);
    const double e = get_number(j, "exponent", where);
    for (std::size_t k = 0; k < p; ++k) beta[k] = scale * std::pow(static_cast<double>(k + 1), -e);
  } else if (kind == "exponential") {
    reject_unknown_keys(j, {"kind", "rate", "scale"}, where);
    const double rate = get_number(j, "rate", where);
    for (std::size_t k = 0; k < p; ++k) beta[k] = scale * std::exp(-rate * static_cast<double>(k + 1));
  } else if (kind == "zero") {
    reject_unknown_keys(j, {"kind"}, where);
  } else if (kind == "explicit") {
    reject_unknown_keys(j, {"kind", "values"}, where);
    beta = get_numbers(j, "values", where);
  } else {
    throw InvalidArgument("config error: unknown signal kind '" + kind + "'");
  }
  return beta;
}

ProblemSource problem_from_json(const json& j, const std::filesystem::path& base) {
  reject_unknown_keys(j, {"model", "model_file", "data", "matrix", "generator"}, "problem");
  if (j.size() != 1) throw InvalidArgument("config error: problem must name exactly one source");
  if (j.contains("model")) return model_from_json(j.at("model"), "problem.model");
  if (j.contains("model_file")) {
    return parse_spectral_model(io::read_text(resolve(base, get_string(j, "model_file", "problem"))));
  }
  if (j.contains("data")) {
    const auto& d = j.at("data");
    reject_unknown_keys(d, {"eigenvalues", "y"}, "problem.data");
    return SpectralData(Spectrum(get_numbers(d, "eigenvalues", "problem.data")), get_numbers(d, "y", "problem.data"));
  }
  if (j.contains("matrix")) {
    const auto& m = j.at("matrix");
    reject_unknown_keys(m, {"x", "y"}, "problem.matrix");
    MatrixSource src{resolve(base, get_string(m, "x", "problem.matrix")), std::nullopt};
    if (m.contains("y")) src.y = resolve(base, get_string(m, "y", "problem.matrix"));
    return src;
  }
  const auto& g = j.at("generator");
  reject_unknown_keys(g, {"spectrum", "signal", "sigma"}, "problem.generator");
  if (!g.contains("spectrum") || !g.contains("signal")) {
    throw InvalidArgument("config error: problem.generator needs 'spectrum' and 'signal'");
  }
  auto spectrum = generator_spectrum(g.at("spectrum"));
  auto beta = generator_signal(g.at("signal"), spectrum.effective_rank());
  return SpectralModel(std::move(spectrum), std::move(beta), get_number(g, "sigma", "problem.generator"));
}

GridSpec grid_from_json(const json& j) {
  GridSpec spec;
  if (j.is_array()) {
    spec.values = get_numbers(json{{"grid", j}}, "grid", "config");
    spec.floor = AlphaFloorRule::none();
    return spec;
  }
  reject_unknown_keys(j, {"points", "floor"}, "grid");
  if (j.contains("points")) spec.points = get_count(j, "points", "grid");
  if (j.contains("floor")) {
    const auto& f = j.at("floor");
    if (f.is_number()) {
      spec.floor = AlphaFloorRule{f.get<double>()};
    } else if (f.is_string() && f.get<std::string>() == "none") {
      spec.floor = AlphaFloorRule::none();
    } else if (!(f.is_string() && f.get<std::string>() == "standard")) {
      throw InvalidArgument("config error: grid.floor must be 'standard', 'none' or a number");
    }
  }
  return spec;
}

}  // namespace

SpectralModel parse_spectral_model(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config error: malformed JSON: ") + e.what());
  }
  return model_from_json(j, "spectral problem");
}

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config error: malformed JSON: ") + e.what());
  }
  reject_unknown_keys(j, {"problem", "family", "grid", "gamma", "mode", "penalty", "sigma2",
                          "include_orthogonal_residual", "rank_tol", "bound_constant", "replications", "seed"},
                      "config");
  if (!j.contains("problem")) throw InvalidArgument("config error: missing 'problem'");
  ExperimentConfig cfg(problem_from_json(j.at("problem"), base_dir));

  if (j.contains("family")) {
    const auto& f = j.at("family");
    reject_unknown_keys(f, {"kind", "tau"}, "family");
    cfg.family.kind = smoother_kind_from_string(get_string(f, "kind", "family"));
    if (f.contains("tau")) cfg.family.tau = get_number(f, "tau", "family");
  }
  if (j.contains("grid")) cfg.grid = grid_from_json(j.at("grid"));
  if (j.contains("gamma")) cfg.gamma = get_number(j, "gamma", "config");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 0.25)) throw InvalidArgument("config error: gamma must lie in (0, 1/4)");
  if (j.contains("mode")) cfg.mode = noise_mode_from_string(get_string(j, "mode", "config"));
  if (j.contains("penalty")) cfg.penalty = penalty_choice_from_string(get_string(j, "penalty", "config"));
  if (j.contains("sigma2")) {
    cfg.sigma2 = get_number(j, "sigma2", "config");
    if (!(*cfg.sigma2 >= 0.0)) throw InvalidArgument("config error: sigma2 must be nonnegative");
  }
  if (j.contains("include_orthogonal_residual")) {
    if (!j.at("include_orthogonal_residual").is_boolean()) {
      throw InvalidArgument("config error: include_orthogonal_residual must be a boolean");
    }
    cfg.include_orthogonal_residual = j.at("include_orthogonal_residual").get<bool>();
  }
  if (j.contains("rank_tol")) cfg.rank_tol = get_number(j, "rank_tol", "config");
  if (j.contains("bound_constant")) cfg.bound_constant = get_number(j, "bound_constant", "config");
  if (j.contains("replications")) cfg.replications = get_count(j, "replications", "config");
  if (cfg.replications < 1) throw InvalidArgument("config error: replications must be >= 1");
  if (j.contains("seed")) cfg.seed = get_count(j, "seed", "config");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(io::read_text(path), path.parent_path());
}

AlphaGrid resolve_grid(const GridSpec& spec, const SmootherFamily& family, const Spectrum& spectrum) {
  const auto rule = spec.floor.value_or(AlphaFloorRule::standard(spectrum.effective_rank()));
  if (spec.values) return apply_floor(family, AlphaGrid(*spec.values), spectrum, rule);
  return default_grid(family, spectrum, spec.points, rule);
}

}  // namespace specreg
