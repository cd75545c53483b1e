#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "bhdimer/bhdimer.hpp"
#include "criteria.hpp"
#include "output.hpp"
#include "pool.hpp"
#include "run_config.hpp"

namespace cli {

namespace fs = std::filesystem;
using namespace bhdimer;

inline constexpr double kSphereDriftLimit = 1e-6;
inline constexpr double kTraceLimit = 1e-8;

inline json meta(const RunConfig& cfg, json extra = json::object()) {
  json m{{"tool", "bhdimer_cli"},
         {"version", kVersion},
         {"modules",
          {{"core", kVersion},
           {"dynamics", kVersion},
           {"fixed_points", kVersion},
           {"coherent", kVersion},
           {"manybody", kVersion},
           {"lindblad", kVersion}}},
         {"config", cfg.echo()}};
  m.update(extra);
  return m;
}

inline json to_json(const BlochState& s) { return {s.sx, s.sy, s.sz, s.n}; }
inline json to_json(const cplx& z) { return {z.real(), z.imag()}; }

inline json to_json(const FixedPointRecord& r) {
  return {{"family", to_string(r.family)},
          {"position", {r.position.sx, r.position.sy, r.position.sz}},
          {"y_root", r.y_root ? json(*r.y_root) : json(nullptr)},
          {"tangent_eigenvalues", {to_json(r.tangent_eigenvalues[0]), to_json(r.tangent_eigenvalues[1])}},
          {"spectrum", {to_json(r.spectrum[0]), to_json(r.spectrum[1]), to_json(r.spectrum[2])}},
          {"stability", to_string(r.stability)},
          {"residual", r.residual}};
}

inline json to_json(const FixedPointCatalog& c) {
  json points = json::array();
  for (const auto& r : c.points) points.push_back(to_json(r));
  const auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  return {{"region", region_number(c.region)},
          {"P", c.discriminant.P},
          {"y_plus", opt(c.discriminant.y_plus)},
          {"y_minus", opt(c.discriminant.y_minus)},
          {"degenerate", c.degenerate},
          {"points", points}};
}

/// Bloch field for the chosen parameters: the complex-interaction field
/// (which needs epsilon = 0) or, for k = 0, the Hermitian one.
inline BlochField mean_field_for(const ModelParams& p) {
  if (p.k == 0.0) return BlochField::Hermitian;
  p.require_symmetric("complex interaction");
  return BlochField::ComplexInteraction;
}

inline void check_sphere(const BlochState& s, const std::string& what) {
  if (std::abs(std::sqrt(s.radius2()) - 0.5) > kSphereDriftLimit) {
    throw InvariantViolation(what + ": state left the Bloch sphere");
  }
}

/// Seeds from "AxB": A polar rows at theta = pi (i + 1/2) / A and B azimuths
/// phi = 2 pi j / B.
inline std::vector<std::pair<double, double>> seed_angles(const std::string& grid) {
  const auto parts = split(grid, 'x');
  if (parts.size() != 2) throw DomainError("seed-grid must look like 4x6");
  const int nt = parse_int(parts[0]), np = parse_int(parts[1]);
  if (nt < 1 || np < 1 || nt * np > 100000) throw DomainError("seed-grid counts out of range");
  std::vector<std::pair<double, double>> seeds;
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < np; ++j) {
      seeds.emplace_back(std::numbers::pi * (i + 0.5) / nt, 2.0 * std::numbers::pi * j / np);
    }
  }
  return seeds;
}

inline void write_trajectory(const fs::path& path, const Trajectory<BlochState>& traj) {
  CsvWriter csv(path, {"t", "sx", "sy", "sz", "n"});
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj.states[i];
    csv.row({traj.times[i], s.sx, s.sy, s.sz, s.n});
  }
  csv.close();
}

inline int cmd_regions(const RunConfig& cfg) {
  if (cfg.resolution < 2) throw DomainError("resolution must be at least 2");
  if (!(cfg.g_max > cfg.g_min) || !(cfg.k_max > cfg.k_min)) {
    throw DomainError("empty g or k range");
  }
  const int n = cfg.resolution;
  auto axis = [n](double lo, double hi, int i) { return lo + (hi - lo) * i / (n - 1); };
  struct Cell {
    double g, k, P;
    int region, count;
  };
  const auto rows = parallel_map<std::vector<Cell>>(n, cfg.threads, [&](std::size_t i) {
    std::vector<Cell> row;
    const double g = axis(cfg.g_min, cfg.g_max, static_cast<int>(i));
    for (int j = 0; j < n; ++j) {
      const double k = axis(cfg.k_min, cfg.k_max, j);
      const auto cat = fixed_point_catalog(g, k);
      row.push_back({g, k, cat.discriminant.P, region_number(cat.region),
                     static_cast<int>(cat.points.size())});
    }
    return row;
  });
  const fs::path out = cfg.out_or("regions.csv");
  CsvWriter csv(out, {"g", "k", "region_id", "num_fixed_points", "P"});
  int histogram[7] = {};
  for (const auto& row : rows) {
    for (const auto& c : row) {
      csv.row({c.g, c.k, double(c.region), double(c.count), c.P});
      if (c.count >= 0 && c.count <= 6) ++histogram[c.count];
    }
  }
  csv.close();
  write_meta(out, meta(cfg, {{"region_ids", "1, 2, 3; 0 marks |P| <= 1e-12"}}));
  std::printf("regions: %d cells, counts 2:%d 4:%d 6:%d -> %s\n", n * n, histogram[2],
              histogram[4], histogram[6], out.string().c_str());
  return 0;
}

inline int cmd_fixed_points(const RunConfig& cfg) {
  const auto cat = fixed_point_catalog(cfg.model);
  const fs::path out = cfg.out_or("fixed_points.json");
  json doc = to_json(cat);
  doc["meta"] = meta(cfg);
  write_json(out, doc);
  for (const auto& r : cat.points) {
    std::printf("%-13s %-10s (% .7f, % .7f, % .7f)\n", to_string(r.family),
                to_string(r.stability), r.position.sx, r.position.sy, r.position.sz);
  }
  return 0;
}

inline int cmd_portrait(const RunConfig& cfg) {
  const ModelParams p = cfg.model;
  p.validate();
  const BlochField field = mean_field_for(p);
  const IntegratorConfig icfg = cfg.integrator();
  const double t_end = cfg.t_end_or(40.0);
  const auto seeds = seed_angles(cfg.seed_grid);
  const fs::path dir = cfg.out_or("portrait");

  json index{{"meta", meta(cfg, {{"field", to_string(field)}, {"t_end", t_end}})}};
  std::optional<FixedPointCatalog> cat;
  if (p.v == 1.0 && p.epsilon == 0.0) {
    cat = fixed_point_catalog(p);
    index["fixed_points"] = to_json(*cat);
    const auto search = find_limit_cycle(p);
    if (search.cycle) {
      const auto& c = *search.cycle;
      write_trajectory(dir / "limit_cycle.csv", c.orbit);
      index["limit_cycle"] = {{"file", "limit_cycle.csv"},
                              {"period", c.period},
                              {"section_point", to_json(c.section_point)},
                              {"closure_residual", c.closure_residual},
                              {"analytic", c.analytic},
                              {"stable", c.stable}};
    } else {
      index["limit_cycle"] = {{"diagnostic", search.diagnostic}};
    }
  } else {
    index["fixed_points"] = nullptr;
    index["limit_cycle"] = nullptr;
    index["note"] = "fixed-point catalog needs v = 1 and epsilon = 0";
  }

  struct SeedResult {
    json entry;
    bool drifted = false;
  };
  const auto results = parallel_map<SeedResult>(seeds.size(), cfg.threads, [&](std::size_t i) {
    const auto [theta, phi] = seeds[i];
    const BlochState s0 = BlochState::from_angles(theta, phi);
    char name[32];
    std::snprintf(name, sizeof name, "seed_%03zu.csv", i);
    SeedResult r;
    r.entry = {{"index", i}, {"theta", theta}, {"phi", phi}, {"initial", to_json(s0)},
               {"file", name}};
    try {
      const auto traj = integrate(field, s0, p, t_end, icfg);
      write_trajectory(dir / name, traj);
      r.entry["status"] = "ok";
      r.entry["final"] = to_json(traj.back());
      r.drifted = std::abs(std::sqrt(traj.back().radius2()) - 0.5) > kSphereDriftLimit;
      json target = nullptr;
      if (cat) {
        std::vector<BlochState> points;
        for (const auto& fp : cat->points) points.push_back(fp.position);
        if (const auto hit = detect_convergence(traj, points, 1e-3)) {
          target = to_string(cat->points[*hit].family);
        }
      }
      r.entry["converged_to"] = target;
    } catch (const IntegrationError& e) {
      r.entry["status"] = "failed";
      r.entry["error"] = e.what();
      r.entry["t_last"] = e.t_last();
    }
    return r;
  });

  int failed = 0;
  bool drifted = false;
  index["seeds"] = json::array();
  for (const auto& r : results) {
    index["seeds"].push_back(r.entry);
    failed += r.entry["status"] == "failed";
    drifted = drifted || r.drifted;
  }
  write_json(dir / "index.json", index);
  std::printf("portrait: %zu seeds, %d failed -> %s\n", seeds.size(), failed, dir.string().c_str());
  if (drifted) throw InvariantViolation("portrait: a trajectory left the Bloch sphere");
  return 0;
}

inline int cmd_decay(const RunConfig& cfg) {
  const ModelParams p = cfg.model;
  p.validate();
  const BlochField field = mean_field_for(p);
  const IntegratorConfig icfg = cfg.integrator();
  const double t_end = cfg.t_end_or(40.0);
  std::vector<BlochState> given;
  for (const auto& item : split(cfg.states, ';')) {
    const auto c = split(item, ',');
    if (c.size() != 3) throw DomainError("each state needs sx,sy,sz");
    given.push_back({parse_double(c[0]), parse_double(c[1]), parse_double(c[2]), 1.0});
  }
  if (given.empty()) throw DomainError("no initial states");

  const fs::path base = cfg.out_or("decay.csv");
  for (std::size_t i = 0; i < given.size(); ++i) {
    const BlochState s0 = given[i].projected_to_sphere();
    fs::path out = base;
    if (given.size() > 1) {
      out = base.parent_path() /
            (base.stem().string() + "_" + std::to_string(i) + base.extension().string());
    }
    const auto traj = integrate(field, s0, p, t_end, icfg);
    CsvWriter csv(out, {"t", "sz", "n", "n_reduced"});
    for (std::size_t j = 0; j < traj.size(); ++j) {
      const double t = traj.times[j];
      const auto& s = traj.states[j];
      csv.row({t, s.sz, s.n, s.n * std::exp(p.k * t)});
    }
    csv.close();
    write_meta(out, meta(cfg, {{"field", to_string(field)},
                               {"t_end", t_end},
                               {"initial_given", to_json(given[i])},
                               {"initial_used", to_json(s0)},
                               {"note", "initial state rescaled onto |s| = 1/2"}}));
    check_sphere(traj.back(), "decay");
    std::printf("decay: s0 = (%.6f, %.6f, %.6f) n(t_end) = %.6e -> %s\n", s0.sx, s0.sy, s0.sz,
                traj.back().n, out.string().c_str());
  }
  return 0;
}

inline int cmd_compare(const RunConfig& cfg) {
  const ModelParams p = cfg.model;
  p.validate();
  const BlochField field = mean_field_for(p);
  const IntegratorConfig icfg = cfg.integrator();
  const double t_end = cfg.t_end_or(1.0);
  const CoherentAngles angles{cfg.theta, cfg.phi};
  angles.validate();
  const std::vector<int>& Ns = cfg.n_list;
  if (Ns.empty()) throw DomainError("n-list is empty");
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    if (Ns[i] < 1) throw DomainError("particle numbers must be positive");
    if (Ns[i] > kMaxDenseN) throw SizeError("compare: N above 2000");
    if (i > 0 && Ns[i] <= Ns[i - 1]) throw DomainError("n-list must be ascending");
  }

  const BlochState mf = propagate(field, BlochState::from_angles(cfg.theta, cfg.phi), p, t_end, icfg);
  const auto errs = parallel_map<std::array<double, 4>>(Ns.size(), cfg.threads, [&](std::size_t i) {
    const auto mb = ManyBodyParams::from_scaled(Ns[i], p);
    const auto end = propagate_fock({coherent_fock(Ns[i], angles), 0.0}, mb, t_end, icfg);
    const BlochState q = mp_bloch(end.unit, end.log_norm);
    return std::array<double, 4>{std::abs(q.sx - mf.sx), std::abs(q.sy - mf.sy),
                                 std::abs(q.sz - mf.sz), std::abs(q.n - mf.n)};
  });

  // Least-squares slope of log(max error) against log N.
  json exponent = nullptr;
  if (Ns.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    bool ok = true;
    for (std::size_t i = 0; i < Ns.size(); ++i) {
      const double e = *std::max_element(errs[i].begin(), errs[i].end());
      if (!(e > 0.0)) ok = false;
      const double x = std::log(double(Ns[i])), y = std::log(e);
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double n = double(Ns.size());
    if (ok) exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }

  const fs::path out = cfg.out_or("compare.csv");
  CsvWriter csv(out, {"N", "err_sx", "err_sy", "err_sz", "err_n"});
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    csv.row({double(Ns[i]), errs[i][0], errs[i][1], errs[i][2], errs[i][3]});
    std::printf("N = %5d  err = %.3e %.3e %.3e %.3e\n", Ns[i], errs[i][0], errs[i][1],
                errs[i][2], errs[i][3]);
  }
  csv.close();
  write_meta(out, meta(cfg, {{"field", to_string(field)},
                             {"t_end", t_end},
                             {"mean_field_end", to_json(mf)},
                             {"fitted_exponent", exponent}}));
  if (exponent.is_number()) std::printf("fitted exponent of max error vs N: %.4f\n", exponent.get<double>());
  return 0;
}

inline int cmd_lindblad(const RunConfig& cfg) {
  const ModelParams p = cfg.model;
  p.validate();
  if (cfg.particles < 1) throw DomainError("n must be positive");
  if (cfg.particles > kMaxLindbladN) throw SizeError("lindblad: N above 60");
  if (cfg.samples < 2) throw DomainError("samples must be at least 2");
  const IntegratorConfig icfg = cfg.integrator();
  const double t_end = cfg.t_end_or(2.0);
  const int N0 = cfg.particles;
  const auto mb = ManyBodyParams::from_scaled(N0, p);
  const CoherentAngles angles{cfg.theta, cfg.phi};

  DensityOperator rho = DensityOperator::pure(coherent_fock(N0, angles));
  BlochState mf = BlochState::from_angles(cfg.theta, cfg.phi);
  const fs::path out = cfg.out_or("lindblad.csv");
  CsvWriter csv(out, {"t", "N_over_N0", "sx_over_n", "sy_over_n", "sz_over_n", "mf_n",
                      "mf_sx_over_n", "mf_sy_over_n", "mf_sz_over_n", "trace"});
  double worst_trace = 0.0;
  const double dt = t_end / (cfg.samples - 1);
  for (int i = 0; i < cfg.samples; ++i) {
    if (i > 0) {
      rho = evolve_lindblad(rho, mb, dt, icfg);
      mf = propagate(BlochField::LindbladMeanField, mf, p, dt, icfg);
    }
    const auto o = lindblad_observables(rho);
    worst_trace = std::max(worst_trace, std::abs(o.trace - 1.0));
    csv.row({i * dt, o.N / N0, o.Lx / o.N, o.Ly / o.N, o.Lz / o.N, mf.n, mf.sx / mf.n,
             mf.sy / mf.n, mf.sz / mf.n, o.trace});
  }
  csv.close();
  write_meta(out, meta(cfg, {{"t_end", t_end}, {"N0", N0}, {"max_trace_error", worst_trace}}));
  std::printf("lindblad: N0 = %d, <N>/N0(t_end) = %.6f, mean field %.6f, trace error %.2e -> %s\n",
              N0, lindblad_observables(rho).N / N0, mf.n, worst_trace, out.string().c_str());
  if (worst_trace > kTraceLimit) throw InvariantViolation("lindblad: trace drifted beyond 1e-8");
  return 0;
}

inline int cmd_verify(const RunConfig& cfg) {
  std::vector<int> ids = cfg.criteria;
  if (ids.empty()) {
    for (int i = 1; i <= acceptance::kCriterionCount; ++i) ids.push_back(i);
  }
  for (int id : ids) {
    if (id < 1 || id > acceptance::kCriterionCount) throw DomainError("unknown criterion id");
  }
  json report = json::array();
  int failed = 0;
  for (int id : ids) {
    const auto r = acceptance::run_criterion(id);
    std::printf("%s\n", acceptance::format(r).c_str());
    std::fflush(stdout);
    failed += !r.pass;
    report.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}});
  }
  std::printf("%zu criteria, %d failed\n", ids.size(), failed);
  if (!cfg.out.empty()) write_json(cfg.out, {{"meta", meta(cfg)}, {"criteria", report}});
  return failed == 0 ? 0 : 2;
}

}  // namespace cli
