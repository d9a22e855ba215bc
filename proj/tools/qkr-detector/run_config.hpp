#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qkrdet/qkrdet.h"

namespace cli {

// Invalid configuration or command line; maps to exit status 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  double K = 0.0;
  std::optional<double> epsilon_c;
  std::optional<double> epsilon;
  double delta = 0.0;
  std::optional<double> hbar;
  std::int64_t n_levels = 0;
  std::int64_t t_max = 0;
  qkr_qubit qubit{1.0, 0.0, 0.0, 0.0};
  double theta0 = 3.14159265358979323846;
  double p0 = 0.0;
  std::string experiment;
  std::string output;

  std::string sweep_parameter = "epsilon";
  std::vector<double> sweep_values;

  std::int64_t husimi_t = 0;
  std::string husimi_spin = "up";
  std::string conditional_mode = "component";
  std::size_t grid_theta = 128;
  std::size_t grid_p = 128;

  double box_theta = 3.14159265358979323846;
  double box_p = 0.0;
  double box_side = 0.0;

  std::int64_t lyapunov_orbits = 100;
  std::int64_t lyapunov_steps = 10000;
  std::uint64_t seed = 1;

  std::optional<std::array<double, 3>> bloch_init;

  // Canonical (key-sorted) dump of the parsed document, the input of config-sha.
  std::string canonical;
  bool renormalized_qubit = false;
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

// Owning wrapper around the C parameter handle.
class Params {
 public:
  explicit Params(const RunConfig& cfg);
  Params(const Params&) = delete;
  Params& operator=(const Params&) = delete;
  ~Params() { qkr_params_destroy(handle_); }

  const qkr_params* get() const noexcept { return handle_; }
  qkr_params_values values() const;

 private:
  qkr_params* handle_ = nullptr;
};

int conditional_mode_code(const std::string& mode);

}  // namespace cli
