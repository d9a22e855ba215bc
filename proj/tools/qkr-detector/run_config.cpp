#include "run_config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace cli {

namespace {

const std::set<std::string> kKnownKeys = {
    "K",           "epsilon_c",      "epsilon",        "delta",        "hbar",
    "n_levels",    "t_max",          "qubit_init",     "detector_init", "experiment",
    "output",      "sweep_parameter", "sweep_values",  "husimi_t",     "husimi_spin",
    "conditional_mode", "grid_theta", "grid_p",        "box_theta",    "box_p",
    "box_side",    "lyapunov_orbits", "lyapunov_steps", "seed",        "bloch_init",
};

template <class T>
T get(const nlohmann::json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("key '") + key + "' is missing or has the wrong type");
  }
}

template <class T>
void get_if(const nlohmann::json& doc, const char* key, T& out) {
  if (doc.contains(key)) out = get<T>(doc, key);
}

template <class T>
void get_if(const nlohmann::json& doc, const char* key, std::optional<T>& out) {
  if (doc.contains(key)) out = get<T>(doc, key);
}

}  // namespace

RunConfig parse_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a flat JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kKnownKeys.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }

  RunConfig cfg;
  cfg.K = get<double>(doc, "K");
  cfg.delta = get<double>(doc, "delta");
  cfg.n_levels = get<std::int64_t>(doc, "n_levels");
  cfg.t_max = get<std::int64_t>(doc, "t_max");
  get_if(doc, "epsilon_c", cfg.epsilon_c);
  get_if(doc, "epsilon", cfg.epsilon);
  if (cfg.epsilon_c.has_value() == cfg.epsilon.has_value()) {
    throw ConfigError("give exactly one of 'epsilon_c' and 'epsilon'");
  }
  get_if(doc, "hbar", cfg.hbar);

  if (doc.contains("qubit_init")) {
    const auto q = get<std::vector<double>>(doc, "qubit_init");
    if (q.size() != 4) throw ConfigError("'qubit_init' must be [re_alpha, im_alpha, re_beta, im_beta]");
    const double norm2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3];
    const double off = std::abs(std::sqrt(norm2) - 1.0);
    if (!std::isfinite(norm2) || off >= 1e-6) {
      throw ConfigError("'qubit_init' is not normalized (|alpha|^2 + |beta|^2 = " + std::to_string(norm2) + ")");
    }
    const double s = 1.0 / std::sqrt(norm2);
    cfg.qubit = {q[0] * s, q[1] * s, q[2] * s, q[3] * s};
    cfg.renormalized_qubit = off > 1e-12;
  }
  if (doc.contains("detector_init")) {
    const auto d = get<std::vector<double>>(doc, "detector_init");
    if (d.size() != 2) throw ConfigError("'detector_init' must be [theta0, p0]");
    cfg.theta0 = d[0];
    cfg.p0 = d[1];
  }
  get_if(doc, "experiment", cfg.experiment);
  get_if(doc, "output", cfg.output);
  get_if(doc, "sweep_parameter", cfg.sweep_parameter);
  get_if(doc, "sweep_values", cfg.sweep_values);
  get_if(doc, "husimi_t", cfg.husimi_t);
  get_if(doc, "husimi_spin", cfg.husimi_spin);
  get_if(doc, "conditional_mode", cfg.conditional_mode);
  get_if(doc, "grid_theta", cfg.grid_theta);
  get_if(doc, "grid_p", cfg.grid_p);
  get_if(doc, "box_theta", cfg.box_theta);
  get_if(doc, "box_p", cfg.box_p);
  get_if(doc, "box_side", cfg.box_side);
  get_if(doc, "lyapunov_orbits", cfg.lyapunov_orbits);
  get_if(doc, "lyapunov_steps", cfg.lyapunov_steps);
  get_if(doc, "seed", cfg.seed);
  if (doc.contains("bloch_init")) {
    const auto b = get<std::vector<double>>(doc, "bloch_init");
    if (b.size() != 3) throw ConfigError("'bloch_init' must be [x, y, z]");
    cfg.bloch_init = std::array<double, 3>{b[0], b[1], b[2]};
  }
  if (cfg.husimi_spin != "up" && cfg.husimi_spin != "down") {
    throw ConfigError("'husimi_spin' must be \"up\" or \"down\"");
  }
  (void)conditional_mode_code(cfg.conditional_mode);

  // Validates the physics parameters now rather than at first use.
  (void)Params(cfg);
  cfg.canonical = doc.dump();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

Params::Params(const RunConfig& cfg) {
  const double hbar = 2.0 * 3.14159265358979323846 / static_cast<double>(cfg.n_levels);
  const double h = cfg.hbar.value_or(hbar);
  const double eps_c = cfg.epsilon_c.has_value() ? *cfg.epsilon_c : *cfg.epsilon * h;
  if (qkr_params_create(cfg.K, eps_c, cfg.delta, h, cfg.n_levels, cfg.t_max, &handle_) != QKR_OK) {
    throw ConfigError(qkr_last_error());
  }
}

qkr_params_values Params::values() const {
  qkr_params_values v{};
  qkr_params_get(handle_, &v);
  return v;
}

int conditional_mode_code(const std::string& mode) {
  if (mode == "component") return QKR_MODE_COMPONENT;
  if (mode == "separate") return QKR_MODE_SEPARATE;
  throw ConfigError("'conditional_mode' must be \"component\" or \"separate\"");
}

}  // namespace cli
