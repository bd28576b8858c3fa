#pragma once

#include "lpmf/bounds/state_bounds.hpp"
#include "lpmf/cli/config.hpp"
#include "lpmf/cli/output.hpp"
#include "lpmf/fock/mean_field.hpp"

#include <atomic>
#include <future>
#include <iostream>
#include <mutex>
#include <thread>

namespace lpmf::cli {

enum ExitCode { kOk = 0, kChecksFailed = 1, kConfigError = 2, kNumericalAbort = 3 };

struct RunOptions {
  std::string out;
  std::optional<uint64_t> seed;
  bool quiet = false;
};

inline json spec_json(const ModelSpec& s) {
  json j;
  j["sites"] = {{"L", s.sites.box_length()}, {"n", s.sites.points_per_dim()}, {"d", s.sites.dim()}};
  j["N"] = s.n_particles;
  json modes = json::array();
  for (const auto& m : s.modes) modes.push_back({m[0], m[1], m[2]});
  j["modes"] = modes;
  j["cutoff"] = s.phonon_cutoff;
  j["alpha"] = s.alpha;
  j["K"] = s.K;
  return j;
}

inline json manifest_base(const RunConfig& c, uint64_t seed) {
  json m;
  m["mode"] = c.mode;
  m["versions"] = versions();
  json cfg = json::object();
  for (const auto& [k, v] : c.entries) cfg[k] = v;
  m["config"] = cfg;
  m["seed"] = seed;
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(c.source_text, seed)));
  m["config_hash"] = hash;
  return m;
}

inline void finish_manifest(OutputDir& out, json m, const std::string& status) {
  m["status"] = status;
  json files = json::array();
  for (const auto& f : out.files()) files.push_back(f);
  files.push_back("manifest.json");
  m["files"] = files;
  out.write_json("manifest.json", m);
}

inline json report_json(const FunctionalReport& r) {
  json j;
  j["t"] = r.t;
  j["a"] = r.a;
  j["b"] = r.b;
  j["c"] = r.c;
  j["beta_a"] = r.beta_a;
  j["beta_b"] = r.beta_b;
  j["beta_c"] = r.beta_c;
  j["beta"] = r.beta();
  j["trace_dist"] = r.trace_dist;
  j["energy_per_particle"] = r.energy_per_particle;
  j["energy_reference"] = r.energy_reference;
  j["grad_q_norm"] = r.grad_q_applicable ? json(r.grad_q_norm) : json(nullptr);
  j["leakage"] = r.leakage;
  j["warnings"] = r.warnings;
  return j;
}

inline json inequality_json(const InequalityReport& r) {
  json j;
  j["name"] = r.name;
  j["pass"] = r.pass;
  j["margin"] = r.margin;
  j["slack"] = r.slack;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  json ctx = json::object();
  for (const auto& [k, v] : r.context) ctx[k] = v;
  j["context"] = ctx;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

// ---------------------------------------------------------------- lp

inline int run_lp(const RunConfig& c, OutputDir& out, bool quiet) {
  const auto& s = c.lp;
  const BoxLattice lat(s.L, s.n, s.d);
  const double sigma = s.sigma > 0.0 ? s.sigma : s.L / 8.0;
  const double ctr = 0.5 * s.L;
  const ComplexField psi = gaussian_field(lat, sigma, Vec3{ctr, s.d == 3 ? ctr : 0.0, s.d == 3 ? ctr : 0.0});
  const ModeVector phi = s.initial == "fixed_point" ? fixed_point_phi(psi, s.alpha) : ModeVector(lat);
  const PekarPair init{psi, phi, s.alpha};
  json m = manifest_base(c, c.seed);
  m["lattice"] = {{"L", s.L}, {"n", s.n}, {"d", s.d}};
  LPTrajectory tr;
  std::string status = "ok";
  int code = kOk;
  try {
    tr = evolve(init, s.stepper);
  } catch (const IntegratorAbort& e) {
    status = std::string("aborted: ") + e.what();
    code = kNumericalAbort;
    tr.snapshots = {e.last_good};
    tr.snapshot_times = {e.t};
  }
  std::string csv = "t,norm,energy,energy_drift,h2_norm,l21_norm\n";
  std::vector<double> t, drift, h2, l21, nrm;
  for (const auto& d : tr.diagnostics) {
    csv += fmt(d.t) + "," + fmt(d.norm) + "," + fmt(d.energy) + "," + fmt(d.energy_drift) + "," + fmt(d.h2_norm) +
           "," + fmt(d.l21_norm) + "\n";
    t.push_back(d.t);
    drift.push_back(d.energy_drift);
    h2.push_back(d.h2_norm);
    l21.push_back(d.l21_norm);
    nrm.push_back(d.norm);
  }
  out.write_text("trajectory.csv", csv);
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
    char name[48];
    std::snprintf(name, sizeof name, "snapshots/snapshot_%04zu.json", i);
    json snap;
    snap["lattice"] = {{"L", s.L}, {"n", s.n}, {"d", s.d}};
    snap["t"] = tr.snapshot_times[i];
    snap["alpha"] = s.alpha;
    snap["layout"] = "row-major position index (last axis fastest); momentum index in FFT order";
    snap["psi"] = cplx_array(tr.snapshots[i].psi.values);
    snap["phi"] = cplx_array(tr.snapshots[i].phi.values);
    out.write_text(name, snap.dump() + "\n");
  }
  out.write_series("plotdata/norm.csv", t, nrm);
  out.write_series("plotdata/energy_drift.csv", t, drift);
  out.write_series("plotdata/h2_norm.csv", t, h2);
  out.write_series("plotdata/l21_norm.csv", t, l21);
  std::string summary = "key,value\n";
  if (!tr.diagnostics.empty()) {
    const GrowthFit g = fit_linear_growth(tr.diagnostics);
    double max_norm_drift = 0.0, max_rel_energy = 0.0;
    const double e0 = tr.diagnostics.front().energy;
    for (const auto& d : tr.diagnostics) {
      max_norm_drift = std::max(max_norm_drift, std::abs(d.norm - 1.0));
      max_rel_energy = std::max(max_rel_energy, std::abs(d.energy_drift) / std::max(std::abs(e0), 1e-300));
    }
    summary += "max_norm_drift," + fmt(max_norm_drift) + "\n";
    summary += "max_relative_energy_drift," + fmt(max_rel_energy) + "\n";
    summary += "C_h2," + fmt(g.C_h2) + "\nC_l21," + fmt(g.C_l21) + "\n";
    summary += "late_slope_h2," + fmt(g.late_slope_h2) + "\nlate_slope_l21," + fmt(g.late_slope_l21) + "\n";
    summary += std::string("superlinear,") + (g.superlinear ? "true" : "false") + "\n";
    m["growth"] = {{"C_h2", g.C_h2}, {"C_l21", g.C_l21}, {"superlinear", g.superlinear}};
    if (!quiet)
      std::cout << "lp: " << tr.diagnostics.size() << " records, max |norm-1| = " << max_norm_drift
                << ", max relative energy drift = " << max_rel_energy << "\n";
  }
  out.write_text("summary.csv", summary);
  finish_manifest(out, m, status);
  return code;
}

// ---------------------------------------------------------------- fock / sweep

inline LatticePair initial_pair(const ModelSpec& spec, const FockSettings& f) {
  LatticePair p;
  const std::size_t S = spec.sites.size();
  p.psi = f.psi == "peaked" ? peaked_psi(S) : CVec(CVec::Ones(S) / std::sqrt(double(S)));
  p.phi = CVec::Zero(spec.mode_count());
  if (f.phi == "fixed_point") p.phi = -std::sqrt(spec.alpha) * LatticeLPFlow(spec).source(p.psi);
  return p;
}

struct CellResult {
  MeanFieldRun run;
  GronwallFit gronwall;
  std::size_t dim = 0;
  double max_leakage = 0.0;
};

inline CellResult run_cell(const ModelSpec& spec, const RunConfig& c) {
  CellResult r;
  FockModel model(spec);
  r.dim = model.dim();
  KrylovOptions ko;
  ko.tol = c.fock.krylov_tol;
  r.run = run_mean_field(model, initial_pair(spec, c.fock), c.fock.t_end, c.fock.samples, ko, c.fock.lp_dt,
                         c.leakage_tolerance);
  BetaTrajectory tr;
  tr.label = "N=" + std::to_string(spec.n_particles);
  tr.N = spec.n_particles;
  tr.K = spec.K;
  for (const auto& rep : r.run.reports) {
    tr.t.push_back(rep.t);
    tr.beta.push_back(rep.beta());
    r.max_leakage = std::max(r.max_leakage, rep.leakage);
  }
  if (tr.t.size() >= 3 && c.fock.t_end > 0.0) r.gronwall = fit_gronwall_envelope({tr});
  return r;
}

inline std::string series_jsonl(const MeanFieldRun& run) {
  std::string s;
  for (const auto& r : run.reports) s += report_json(r).dump() + "\n";
  return s;
}

inline int run_fock(const RunConfig& c, OutputDir& out, bool quiet) {
  json m = manifest_base(c, c.seed);
  m["model"] = spec_json(c.model);
  const CellResult cell = run_cell(c.model, c);
  m["basis_dimension"] = cell.dim;
  m["leakage"] = cell.max_leakage;
  out.write_text("series.jsonl", series_jsonl(cell.run));
  std::vector<double> t, td, beta, ba, bb, bc, e;
  for (const auto& r : cell.run.reports) {
    t.push_back(r.t);
    td.push_back(r.trace_dist);
    beta.push_back(r.beta());
    ba.push_back(r.beta_a);
    bb.push_back(r.beta_b);
    bc.push_back(r.beta_c);
    e.push_back(r.energy_per_particle);
  }
  out.write_series("plotdata/trace_dist.csv", t, td);
  out.write_series("plotdata/beta.csv", t, beta);
  out.write_series("plotdata/beta_a.csv", t, ba);
  out.write_series("plotdata/beta_b.csv", t, bb);
  out.write_series("plotdata/beta_c.csv", t, bc);
  out.write_series("plotdata/energy_per_particle.csv", t, e);
  const auto& last = cell.run.reports.back();
  std::string summary = "N,K,alpha,dimension,t,trace_dist,beta_a,beta_b,beta_c,beta,C_fit,violations,leakage\n";
  summary += std::to_string(c.model.n_particles) + "," + fmt(c.model.K) + "," + fmt(c.model.alpha) + "," +
             std::to_string(cell.dim) + "," + fmt(last.t) + "," + fmt(last.trace_dist) + "," + fmt(last.beta_a) +
             "," + fmt(last.beta_b) + "," + fmt(last.beta_c) + "," + fmt(last.beta()) + "," +
             fmt(cell.gronwall.C_fit) + "," + std::to_string(cell.gronwall.violations.size()) + "," +
             fmt(cell.max_leakage) + "\n";
  out.write_text("summary.csv", summary);
  if (!quiet)
    std::cout << "fock: dim " << cell.dim << ", t = " << last.t << ", trace_dist = " << last.trace_dist
              << ", beta = " << last.beta() << ", max leakage = " << cell.max_leakage << "\n";
  finish_manifest(out, m, "ok");
  return kOk;
}

// Runs jobs on a fixed pool; results land in index order regardless of timing.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int nt = std::max(1, std::min<int>(threads > 0 ? threads : hw, static_cast<int>(n)));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int i = 0; i < nt; ++i)
    pool.emplace_back([&] {
      for (std::size_t k; (k = next.fetch_add(1)) < n;) fn(k);
    });
  for (auto& th : pool) th.join();
}

inline int run_sweep(const RunConfig& c, OutputDir& out, bool quiet) {
  struct Cell {
    int N;
    double K, alpha;
    std::optional<CellResult> result;
    std::string error;
  };
  std::vector<Cell> cells;
  for (double a : c.sweep.alpha_list)
    for (double K : c.sweep.K_list)
      for (int N : c.sweep.N_list) cells.push_back({N, K, a, std::nullopt, {}});
  parallel_for(cells.size(), c.sweep.threads, [&](std::size_t i) {
    ModelSpec s = c.model;
    s.n_particles = cells[i].N;
    s.K = cells[i].K;
    s.alpha = cells[i].alpha;
    try {
      cells[i].result = run_cell(s, c);
    } catch (const std::exception& e) {
      cells[i].error = e.what();
    }
  });
  json m = manifest_base(c, c.seed);
  m["model"] = spec_json(c.model);
  json jcells = json::array();
  std::string summary =
      "N,K,alpha,status,dimension,trace_dist,beta_a,beta_b,beta_c,beta,C_fit,violations,leakage,"
      "trace_dist_monotone_in_N\n";
  bool any_failed = false;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& cl = cells[i];
    char name[80];
    std::snprintf(name, sizeof name, "series/cell_%03zu.jsonl", i);
    json jc = {{"N", cl.N}, {"K", cl.K}, {"alpha", cl.alpha}};
    if (!cl.result) {
      any_failed = true;
      jc["status"] = "failed";
      jc["error"] = cl.error;
      summary += std::to_string(cl.N) + "," + fmt(cl.K) + "," + fmt(cl.alpha) + ",failed,,,,,,,,,,\n";
      jcells.push_back(jc);
      continue;
    }
    out.write_text(name, series_jsonl(cl.result->run));
    jc["status"] = "ok";
    jc["series"] = name;
    jc["basis_dimension"] = cl.result->dim;
    jc["leakage"] = cl.result->max_leakage;
    jcells.push_back(jc);
    // monotone flag: trace_dist at the final time non-increasing in N within the (K, alpha) group
    bool mono = true;
    const double td = cl.result->run.reports.back().trace_dist;
    for (const Cell& o : cells)
      if (o.result && o.K == cl.K && o.alpha == cl.alpha && o.N < cl.N &&
          o.result->run.reports.back().trace_dist < td)
        mono = false;
    const auto& last = cl.result->run.reports.back();
    summary += std::to_string(cl.N) + "," + fmt(cl.K) + "," + fmt(cl.alpha) + ",ok," +
               std::to_string(cl.result->dim) + "," + fmt(last.trace_dist) + "," + fmt(last.beta_a) + "," +
               fmt(last.beta_b) + "," + fmt(last.beta_c) + "," + fmt(last.beta()) + "," +
               fmt(cl.result->gronwall.C_fit) + "," + std::to_string(cl.result->gronwall.violations.size()) + "," +
               fmt(cl.result->max_leakage) + "," + (mono ? "true" : "false") + "\n";
    if (!quiet)
      std::cout << "sweep cell N=" << cl.N << " K=" << cl.K << " alpha=" << cl.alpha
                << ": trace_dist = " << last.trace_dist << ", beta = " << last.beta() << "\n";
  }
  out.write_text("summary.csv", summary);
  m["cells"] = jcells;
  finish_manifest(out, m, any_failed ? "partial" : "ok");
  return kOk;
}

// ---------------------------------------------------------------- bounds

inline std::vector<InequalityReport> collect_bounds(const RunConfig& c, uint64_t seed, json& extra) {
  const auto& b = c.bounds;
  std::vector<std::future<std::vector<InequalityReport>>> jobs;
  std::mutex extra_mu;
  jobs.push_back(std::async(std::launch::async, [&] { return verify_form_factor_norms(b.form_factor_K); }));
  jobs.push_back(std::async(std::launch::async, [&] {
    const CGConstant cg = compute_cg_constant(b.cg_p_max);
    {
      std::lock_guard lk(extra_mu);
      extra["C_G"] = {{"value_at_p0", cg.value_at_p0}, {"sup_over_p", cg.sup_over_p}, {"argmax_p", cg.argmax_p},
                      {"quoted_rhs", cg.quoted_rhs}, {"monotone_decay", cg.monotone_decay},
                      {"error_estimate", cg.error_estimate}};
    }
    InequalityReport r;
    r.name = "cg_sup_at_origin";
    r.lhs = {cg.argmax_p};
    r.rhs = {0.0};
    r.margin = cg.monotone_decay && cg.argmax_p == 0.0 ? 0.0 : -1.0;
    r.context["sup_over_p"] = cg.sup_over_p;
    r.context["rhs_closed_form"] = cg.quoted_rhs;
    r.decide();
    return std::vector<InequalityReport>{r};
  }));
  std::shared_ptr<FockModel> model;
  if (b.operator_checks) {
    model = std::make_shared<FockModel>(c.model);
    extra["model"] = spec_json(c.model);
    extra["basis_dimension"] = model->dim();
    jobs.push_back(std::async(std::launch::async, [&, model] { return verify_hamiltonian_sandwich(*model, seed); }));
    jobs.push_back(
        std::async(std::launch::async, [&, model] { return verify_interaction_bound(*model, b.eps, seed + 100); }));
    jobs.push_back(std::async(std::launch::async, [&, model] {
      const CGConstant cg = compute_cg_constant(b.cg_p_max);
      return std::vector<InequalityReport>{verify_lieb_yamazaki(*model, cg.sup_over_p, seed + 200)};
    }));
    jobs.push_back(std::async(std::launch::async, [&, model] {
      std::mt19937_64 rng(seed + 300);
      std::vector<CVec> states;
      for (int i = 0; i < 20; ++i) states.push_back(random_state(model->dim(), rng));
      return std::vector<InequalityReport>{verify_trace_norm_chain(*model, states, peaked_psi(model->spec().sites.size()))};
    }));
  }
  if (b.scaling) {
    jobs.push_back(std::async(std::launch::async, [&] {
      const CVec psi = peaked_psi(b.scaling_spec.sites.size());
      const CVec phi = CVec::Zero(b.scaling_spec.mode_count());
      return verify_initial_state_scalings(b.scaling_spec, b.scaling_K, b.scaling_N, psi, phi, -1.2, -2.7,
                                           c.leakage_tolerance)
          .reports;
    }));
  }
  std::vector<InequalityReport> all;
  std::exception_ptr first_error;
  for (auto& j : jobs) {
    try {
      for (auto& r : j.get()) all.push_back(std::move(r));
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.name < y.name; });
  return all;
}

inline int run_bounds(const RunConfig& c, OutputDir& out, bool quiet) {
  json m = manifest_base(c, c.seed);
  json extra = json::object();
  const auto reports = collect_bounds(c, c.seed, extra);
  json arr = json::array();
  bool ok = true;
  std::string summary = "name,pass,margin,slack\n";
  for (const auto& r : reports) {
    arr.push_back(inequality_json(r));
    ok = ok && r.pass;
    summary += r.name + "," + (r.pass ? "true" : "false") + "," + fmt(r.margin) + "," + fmt(r.slack) + "\n";
  }
  out.write_json("report.json", arr);
  out.write_text("summary.csv", summary);
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  if (!quiet) {
    std::printf("%-40s %-5s %14s %12s\n", "check", "pass", "margin", "slack");
    for (const auto& r : reports)
      std::printf("%-40s %-5s %14.6g %12.3g\n", r.name.c_str(), r.pass ? "yes" : "NO", r.margin, r.slack);
  }
  finish_manifest(out, m, ok ? "ok" : "checks failed");
  return ok ? kOk : kChecksFailed;
}

// ---------------------------------------------------------------- entry

inline int run(const std::string& mode, const std::string& config_path, const RunOptions& opt) {
  RunConfig c;
  try {
    c = parse_config(config_path, mode);
    if (opt.seed) {
      c.seed = *opt.seed;
      c.has_seed = true;
    }
    if (!opt.out.empty()) c.out = opt.out;
    if (mode == "bounds" && !c.has_seed)
      throw ConfigError("run.seed", "a seed is required for randomized checks (config or --seed)");
    if (mode == "fock" || mode == "sweep" || (mode == "bounds" && c.bounds.operator_checks)) {
      if (estimate_dimension(c.model) > static_cast<double>(c.model.dimension_cap))
        throw ConfigError("model.dimension_cap", "estimated dimension " + fmt(estimate_dimension(c.model)) +
                                                     " exceeds cap " + std::to_string(c.model.dimension_cap));
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    OutputDir out(c.out);
    if (mode == "lp") return run_lp(c, out, opt.quiet);
    if (mode == "fock") return run_fock(c, out, opt.quiet);
    if (mode == "sweep") return run_sweep(c, out, opt.quiet);
    return run_bounds(c, out, opt.quiet);
  } catch (const DimensionCapExceeded& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kNumericalAbort;
  }
}

}  // namespace lpmf::cli
