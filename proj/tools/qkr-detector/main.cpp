#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "io.hpp"
#include "qkrdet/qkrdet.h"
#include "run_config.hpp"

namespace {

namespace fs = std::filesystem;
using cli::ConfigError;
using cli::num;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitFit = 3;

// A C API failure that is not a configuration problem.
struct ApiError : std::runtime_error {
  qkr_status status;
  ApiError(qkr_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void check(qkr_status s) {
  if (s == QKR_OK) return;
  if (s == QKR_ERR_INVALID_ARGUMENT || s == QKR_ERR_DIMENSION_TOO_LARGE) throw ConfigError(qkr_last_error());
  throw ApiError(s, qkr_last_error());
}

template <class T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using Trajectory = std::unique_ptr<qkr_trajectory, Deleter<qkr_trajectory, qkr_trajectory_destroy>>;
using Sweep = std::unique_ptr<qkr_sweep, Deleter<qkr_sweep, qkr_sweep_destroy>>;
using Husimi = std::unique_ptr<qkr_husimi, Deleter<qkr_husimi, qkr_husimi_destroy>>;

std::string join(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

struct Context {
  cli::RunConfig cfg;
  fs::path out;
  unsigned threads = 1;
  std::string sha;
};

int cmd_evolve(const Context& ctx) {
  const cli::Params params(ctx.cfg);
  qkr_trajectory* raw = nullptr;
  check(qkr_evolve(params.get(), ctx.cfg.qubit, ctx.cfg.theta0, ctx.cfg.p0, &raw));
  const Trajectory traj(raw);
  cli::AtomicFile file(ctx.out);
  file.line(cli::provenance_line(ctx.sha)).line("t,re_rho01,im_rho01,abs_rho01,rho00,rho11,p2,purity");
  for (std::size_t i = 0; i < qkr_trajectory_length(traj.get()); ++i) {
    qkr_record r{};
    check(qkr_trajectory_record(traj.get(), i, &r));
    file.line(join({std::to_string(r.t), num(r.rho01_re), num(r.rho01_im), num(std::hypot(r.rho01_re, r.rho01_im)),
                    num(r.rho00), num(r.rho11), num(r.p2), num(r.purity)}));
  }
  file.commit();
  return kExitOk;
}

int cmd_sweep(const Context& ctx) {
  if (ctx.cfg.sweep_values.empty()) throw ConfigError("'sweep_values' must list at least one value");
  const cli::Params params(ctx.cfg);
  qkr_sweep* raw = nullptr;
  check(qkr_sweep_run(params.get(), ctx.cfg.qubit, ctx.cfg.theta0, ctx.cfg.p0, ctx.cfg.sweep_parameter.c_str(),
                      ctx.cfg.sweep_values.data(), ctx.cfg.sweep_values.size(), ctx.threads, &raw));
  const Sweep sweep(raw);
  cli::AtomicFile file(ctx.out);
  file.line(cli::provenance_line(ctx.sha)).line("value,gamma1,gamma2,flag");
  bool missing = false;
  for (std::size_t i = 0; i < qkr_sweep_length(sweep.get()); ++i) {
    qkr_sweep_row row{};
    check(qkr_sweep_get(sweep.get(), i, &row));
    missing = missing || std::isnan(row.gamma1) || std::isnan(row.gamma2);
    file.line(join({num(row.value), num(row.gamma1), num(row.gamma2), qkr_sweep_flag_string(row.flags)}));
  }
  file.commit();
  return missing ? kExitFit : kExitOk;
}

int cmd_husimi(const Context& ctx) {
  const cli::Params params(ctx.cfg);
  const int spin = ctx.cfg.husimi_spin == "up" ? QKR_SPIN_UP : QKR_SPIN_DOWN;
  const int mode = cli::conditional_mode_code(ctx.cfg.conditional_mode);
  qkr_husimi* raw = nullptr;
  check(qkr_husimi_conditional(params.get(), ctx.cfg.qubit, ctx.cfg.theta0, ctx.cfg.p0, ctx.cfg.husimi_t, spin, mode,
                               ctx.cfg.grid_theta, ctx.cfg.grid_p, &raw));
  const Husimi h(raw);
  std::size_t n_theta = 0, n_p = 0;
  check(qkr_husimi_dims(h.get(), &n_theta, &n_p));
  std::vector<double> values(n_theta * n_p);
  check(qkr_husimi_values(h.get(), values.data(), values.size()));

  cli::AtomicFile file(ctx.out);
  file.line(cli::provenance_line(ctx.sha));
  // Row j is p = -pi + j * 2 pi / n_p, so momentum increases downward.
  for (std::size_t j = 0; j < n_p; ++j) {
    std::string line;
    for (std::size_t i = 0; i < n_theta; ++i) {
      if (i) line += ',';
      line += num(values[j * n_theta + i]);
    }
    file.line(line);
  }
  file.commit();

  double total = 0.0;
  for (double v : values) total += v;
  nlohmann::ordered_json meta;
  meta["csv"] = ctx.out.filename().string();
  meta["rows"] = "p";
  meta["columns"] = "theta";
  meta["n_theta"] = n_theta;
  meta["n_p"] = n_p;
  meta["theta_min"] = 0.0;
  meta["theta_step"] = 2.0 * M_PI / static_cast<double>(n_theta);
  meta["p_min"] = -M_PI;
  meta["p_step"] = 2.0 * M_PI / static_cast<double>(n_p);
  meta["t"] = ctx.cfg.husimi_t;
  meta["spin"] = ctx.cfg.husimi_spin;
  meta["conditional_mode"] = ctx.cfg.conditional_mode;
  meta["hbar"] = params.values().hbar;
  meta["total"] = total;
  auto meta_path = ctx.out;
  meta_path.replace_extension(".meta.json");
  cli::write_json(meta_path, ctx.sha, meta);
  return kExitOk;
}

int cmd_wd(const Context& ctx) {
  if (!(ctx.cfg.box_side > 0.0)) throw ConfigError("'box_side' must be positive");
  const cli::Params params(ctx.cfg);
  const auto n = static_cast<std::size_t>(ctx.cfg.t_max + 1);
  std::vector<double> up(n), down(n);
  const qkr_box box{ctx.cfg.box_theta, ctx.cfg.box_p, ctx.cfg.box_side, ctx.cfg.grid_theta, ctx.cfg.grid_p};
  check(qkr_wd_series(params.get(), ctx.cfg.qubit, ctx.cfg.theta0, ctx.cfg.p0, box,
                      cli::conditional_mode_code(ctx.cfg.conditional_mode), up.data(), down.data(), n));
  cli::AtomicFile file(ctx.out);
  file.line(cli::provenance_line(ctx.sha)).line("t,wd_up,wd_down");
  for (std::size_t t = 0; t < n; ++t) file.line(join({std::to_string(t), num(up[t]), num(down[t])}));
  file.commit();
  return kExitOk;
}

int cmd_lyapunov(const Context& ctx) {
  double lambda = 0.0;
  check(qkr_lyapunov(ctx.cfg.K, ctx.cfg.lyapunov_orbits, ctx.cfg.lyapunov_steps, ctx.cfg.seed, &lambda));
  nlohmann::ordered_json doc;
  doc["K"] = ctx.cfg.K;
  doc["n_orbits"] = ctx.cfg.lyapunov_orbits;
  doc["n_steps"] = ctx.cfg.lyapunov_steps;
  doc["seed"] = ctx.cfg.seed;
  doc["lambda"] = lambda;
  doc["ln_half_K"] = std::log(ctx.cfg.K / 2.0);
  cli::write_json(ctx.out, ctx.sha, doc);
  return kExitOk;
}

int cmd_channel(const Context& ctx) {
  const cli::Params params(ctx.cfg);
  const double eps = params.values().epsilon;
  const double delta = ctx.cfg.delta;
  std::array<double, 3> b0{};
  if (ctx.cfg.bloch_init) {
    b0 = *ctx.cfg.bloch_init;
  } else {
    // Bloch vector of alpha|0> + beta|1>: x - i y = 2 rho01, z = rho00 - rho11.
    const auto& q = ctx.cfg.qubit;
    const double r01_re = q.alpha_re * q.beta_re + q.alpha_im * q.beta_im;
    const double r01_im = q.alpha_im * q.beta_re - q.alpha_re * q.beta_im;
    b0 = {2.0 * r01_re, -2.0 * r01_im,
          q.alpha_re * q.alpha_re + q.alpha_im * q.alpha_im - q.beta_re * q.beta_re - q.beta_im * q.beta_im};
  }
  const auto n = static_cast<std::size_t>(ctx.cfg.t_max + 1);
  std::vector<double> map(3 * n);
  check(qkr_channel_map(b0.data(), eps, delta, ctx.cfg.t_max, map.data(), n));
  cli::AtomicFile file(ctx.out);
  file.line(cli::provenance_line(ctx.sha))
      .line("t,map_x,map_y,map_z,map_abs_rho01,map_rho11,cont_x,cont_y,cont_z");
  for (std::size_t t = 0; t < n; ++t) {
    double c[3];
    check(qkr_channel_continuous(b0.data(), eps, delta, static_cast<double>(t), c));
    const double x = map[3 * t], y = map[3 * t + 1], z = map[3 * t + 2];
    file.line(join({std::to_string(t), num(x), num(y), num(z), num(0.5 * std::hypot(x, y)), num(0.5 * (1.0 - z)),
                    num(c[0]), num(c[1]), num(c[2])}));
  }
  file.commit();
  return kExitOk;
}

int cmd_fidelity(const Context& ctx) {
  const cli::Params params(ctx.cfg);
  const auto n = static_cast<std::size_t>(ctx.cfg.t_max + 1);
  std::vector<double> re(n), im(n);
  check(qkr_fidelity_series(params.get(), ctx.cfg.theta0, ctx.cfg.p0, re.data(), im.data(), n));
  cli::AtomicFile file(ctx.out);
  file.line(cli::provenance_line(ctx.sha)).line("t,re_f,im_f,abs_f");
  for (std::size_t t = 0; t < n; ++t) {
    file.line(join({std::to_string(t), num(re[t]), num(im[t]), num(std::hypot(re[t], im[t]))}));
  }
  file.commit();
  return kExitOk;
}

struct FitOptions {
  std::string input;
  std::string kind = "exp";
  std::string column;
  double delta = std::nan("");
};

int cmd_fit(const FitOptions& opt, const fs::path& out) {
  const cli::CsvTable table = cli::read_csv(opt.input);
  const std::string column = opt.column.empty() ? (opt.kind == "exp" ? "abs_rho01" : "rho11") : opt.column;
  const std::vector<double> series = table.column(column);
  const std::string sha = table.config_sha.empty() ? cli::sha256_hex(opt.input) : table.config_sha;

  qkr_fit fit{};
  qkr_status status = QKR_OK;
  if (opt.kind == "exp") {
    status = qkr_fit_exp_decay(series.data(), series.size(), &fit);
  } else {
    if (!std::isfinite(opt.delta)) throw ConfigError("--kind sine needs --delta (frequency guess is 2 delta)");
    status = qkr_fit_damped_sine(series.data(), series.size(), 2.0 * opt.delta, &fit);
  }
  if (status != QKR_OK && status != QKR_ERR_NON_DECAYING) check(status);

  const bool ok = status == QKR_OK && fit.converged;
  nlohmann::ordered_json doc;
  doc["kind"] = opt.kind;
  doc["column"] = column;
  if (status == QKR_OK) {
    doc["rate"] = fit.rate;
    doc["amplitude"] = fit.amplitude;
    doc["window_lo"] = fit.t_lo;
    doc["window_hi"] = fit.t_hi;
    doc["rms_residual"] = fit.rms_residual;
    if (opt.kind == "sine") {
      doc["frequency"] = fit.frequency;
      doc["phase"] = fit.phase;
      doc["iterations"] = fit.iterations;
    }
  } else {
    for (const char* key : {"rate", "amplitude", "window_lo", "window_hi", "rms_residual"}) doc[key] = nullptr;
    doc["error"] = qkr_last_error();
  }
  doc["converged"] = ok;
  cli::write_json(out, sha, doc);
  return ok ? kExitOk : kExitFit;
}

void print_error(const char* kind, const std::string& message) {
  nlohmann::json err;
  err["error"] = kind;
  err["message"] = message;
  std::cerr << err.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qubit coupled to a quantum kicked rotator used as a detector"};
  app.set_version_flag("--version", std::string("qkr-detector ") + qkr_version());
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  FitOptions fit_opt;

  const std::vector<std::pair<std::string, std::string>> sim_commands = {
      {"evolve", "coupled evolution: reduced density matrix and <p^2> per kick"},
      {"sweep", "Gamma1 and Gamma2 over a list of parameter values"},
      {"husimi", "Husimi distribution of a conditional detector state"},
      {"wd", "Husimi box integral per kick for both spin components"},
      {"lyapunov", "classical standard-map Lyapunov exponent"},
      {"channel", "phase-damping map and its continuous-time solution"},
      {"fidelity", "fidelity amplitude between the K + eps_c and K - eps_c rotators"},
      {"run", "dispatch on the config's 'experiment' key"},
  };
  for (const auto& [name, help] : sim_commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "flat JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "output path (defaults to the config's 'output')");
    sub->add_option("--threads", threads, "worker threads for sweep")->check(CLI::PositiveNumber);
  }
  auto* fit = app.add_subcommand("fit", "fit a decay to one column of a CSV produced by this tool");
  fit->add_option("--in", fit_opt.input, "input CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--out", out_path, "output JSON")->required();
  fit->add_option("--kind", fit_opt.kind, "exp or sine")->check(CLI::IsMember({"exp", "sine"}));
  fit->add_option("--column", fit_opt.column, "column to fit (abs_rho01 for exp, rho11 for sine)");
  fit->add_option("--delta", fit_opt.delta, "qubit rotation angle per kick, for --kind sine");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return kExitConfig;
  }

  try {
    if (fit->parsed()) return cmd_fit(fit_opt, out_path);

    Context ctx;
    ctx.cfg = cli::load_config(config_path);
    ctx.sha = cli::sha256_hex(ctx.cfg.canonical);
    ctx.threads = threads;
    if (ctx.cfg.renormalized_qubit) std::cerr << "warning: qubit_init renormalized\n";
    const std::string given = out_path.empty() ? ctx.cfg.output : out_path;
    if (given.empty()) throw ConfigError("no output path: pass --out or set 'output'");
    ctx.out = given;

    std::string command = app.get_subcommands().front()->get_name();
    if (command == "run") {
      if (ctx.cfg.experiment.empty()) throw ConfigError("'run' needs the config key 'experiment'");
      command = ctx.cfg.experiment;
    } else if (!ctx.cfg.experiment.empty() && ctx.cfg.experiment != command) {
      throw ConfigError("config 'experiment' is '" + ctx.cfg.experiment + "' but the subcommand is '" + command + "'");
    }
    if (command == "evolve") return cmd_evolve(ctx);
    if (command == "sweep") return cmd_sweep(ctx);
    if (command == "husimi") return cmd_husimi(ctx);
    if (command == "wd") return cmd_wd(ctx);
    if (command == "lyapunov") return cmd_lyapunov(ctx);
    if (command == "channel") return cmd_channel(ctx);
    if (command == "fidelity") return cmd_fidelity(ctx);
    throw ConfigError("unknown experiment '" + command + "'");
  } catch (const ConfigError& e) {
    print_error("config", e.what());
    return kExitConfig;
  } catch (const ApiError& e) {
    print_error(qkr_status_name(e.status), e.what());
    return kExitFailure;
  } catch (const std::exception& e) {
    print_error("runtime", e.what());
    return kExitFailure;
  }
}
