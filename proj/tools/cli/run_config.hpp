#pragma once

#include <algorithm>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "bhdimer/bhdimer.hpp"
#include "output.hpp"

namespace cli {

/// Every tunable of every subcommand. Options live on the top-level app, so
/// one flat key=value file serves all commands; flags override the file.
struct RunConfig {
  std::string command;
  bhdimer::ModelParams model{1.0, 0.0, 0.5, 0.2};
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  double max_step = 0.01;
  std::string method = "dopri45";
  std::optional<double> t_end;
  std::string out;
  std::string seed_grid = "4x6";
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());

  double g_min = -2.0, g_max = 2.0, k_min = -3.0, k_max = 3.0;
  int resolution = 400;

  std::string states = "0.2939,0,0.4045;0.4755,0,0.1545;-0.4755,0,0.1545";

  double theta = std::numbers::pi / 3.0;
  double phi = 0.0;
  std::vector<int> n_list{20, 40, 80, 160};
  int particles = 20;
  int samples = 201;

  std::vector<int> criteria;

  [[nodiscard]] bhdimer::IntegratorConfig integrator() const {
    bhdimer::IntegratorConfig cfg{rel_tol, abs_tol, max_step};
    if (method == "rk4") {
      cfg.method = bhdimer::Method::RungeKutta4;
    } else if (method != "dopri45") {
      throw bhdimer::DomainError("method must be rk4 or dopri45");
    }
    cfg.validate();
    return cfg;
  }

  [[nodiscard]] double t_end_or(double fallback) const {
    const double t = t_end.value_or(fallback);
    if (!(t > 0.0)) throw bhdimer::DomainError("t-end must be positive");
    return t;
  }

  [[nodiscard]] std::string out_or(const std::string& fallback) const {
    return out.empty() ? fallback : out;
  }

  void register_options(CLI::App& app) {
    app.set_config("--config", "", "Flat key=value file (# comments); flags take precedence");
    app.add_option("--out", out, "Output file or directory");
    app.add_option("--v", model.v, "Tunnelling amplitude v")->capture_default_str();
    app.add_option("--g", model.g, "Interaction g (real part)")->capture_default_str();
    app.add_option("--k", model.k, "Interaction loss k (imaginary part)")->capture_default_str();
    app.add_option("--epsilon", model.epsilon, "On-site energy offset")->capture_default_str();
    app.add_option("--rel-tol", rel_tol, "Relative tolerance")->capture_default_str();
    app.add_option("--abs-tol", abs_tol, "Absolute tolerance")->capture_default_str();
    app.add_option("--max-step", max_step, "Largest time step")->capture_default_str();
    app.add_option("--method", method, "dopri45 or rk4")->capture_default_str();
    app.add_option("--t-end", t_end, "Final time");
    app.add_option("--seed-grid", seed_grid, "Portrait seeds as THETAxPHI counts")->capture_default_str();
    app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--g-min", g_min, "regions: lower g")->capture_default_str();
    app.add_option("--g-max", g_max, "regions: upper g")->capture_default_str();
    app.add_option("--k-min", k_min, "regions: lower k")->capture_default_str();
    app.add_option("--k-max", k_max, "regions: upper k")->capture_default_str();
    app.add_option("--resolution", resolution, "regions: grid points per axis")->capture_default_str();
    app.add_option("--states", states, "decay: initial states \"sx,sy,sz;...\" (quote in config files)")->capture_default_str();
    app.add_option("--theta", theta, "compare/lindblad: polar angle of the coherent state");
    app.add_option("--phi", phi, "compare/lindblad: azimuth of the coherent state");
    app.add_option("--n-list", n_list, "compare: ascending particle numbers")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--n", particles, "lindblad: initial particle number")->capture_default_str();
    app.add_option("--samples", samples, "lindblad: output rows")->capture_default_str();
    app.add_option("--criteria", criteria, "verify: criterion ids (default all)");
  }

  [[nodiscard]] json echo() const {
    return {{"command", command},
            {"v", model.v},
            {"g", model.g},
            {"k", model.k},
            {"epsilon", model.epsilon},
            {"rel_tol", rel_tol},
            {"abs_tol", abs_tol},
            {"max_step", max_step},
            {"method", method},
            {"t_end", t_end ? json(*t_end) : json(nullptr)},
            {"seed_grid", seed_grid},
            {"g_min", g_min},
            {"g_max", g_max},
            {"k_min", k_min},
            {"k_max", k_max},
            {"resolution", resolution},
            {"states", states},
            {"theta", theta},
            {"phi", phi},
            {"n_list", n_list},
            {"n", particles},
            {"samples", samples}};
  }
};

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

inline double parse_double(const std::string& s) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw bhdimer::DomainError("not a number: '" + s + "'");
  }
  if (s.find_first_not_of(" \t", used) != std::string::npos) {
    throw bhdimer::DomainError("not a number: '" + s + "'");
  }
  return x;
}

inline int parse_int(const std::string& s) {
  const double x = parse_double(s);
  if (x != static_cast<int>(x)) throw bhdimer::DomainError("not an integer: '" + s + "'");
  return static_cast<int>(x);
}

}  // namespace cli
