// Acceptance run: one line per criterion, exit status 1 if any fails.

#include "lpmf/bounds/state_bounds.hpp"
#include "lpmf/fock/mean_field.hpp"
#include "lpmf/fock/presets.hpp"
#include "lpmf/landau_pekar/landau_pekar.hpp"
#include "oracles/oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace lpmf;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmtd(const char* f, double v) {
  char b[64];
  std::snprintf(b, sizeof b, f, v);
  return b;
}

bool all_pass(const std::vector<InequalityReport>& reps, std::string& worst) {
  bool ok = true;
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : reps) {
    ok = ok && r.pass;
    if (r.margin + r.slack < m) {
      m = r.margin + r.slack;
      worst = r.name + " margin " + fmtd("%.3g", r.margin) + " slack " + fmtd("%.3g", r.slack);
    }
    if (!r.pass) std::printf("    failing: %s margin %.6g slack %.3g %s\n", r.name.c_str(), r.margin, r.slack, r.note.c_str());
  }
  return ok;
}

// ---------------------------------------------------------------- 1

Outcome form_factors() {
  const auto t0 = Clock::now();
  const auto reps = verify_form_factor_norms({0.5, 1.0, 4.0, 16.0}, 1e-8);
  // second route: closed forms against an independent Simpson quadrature
  double oracle_err = 0.0;
  for (double K : {0.5, 1.0, 4.0, 16.0}) {
    oracle_err = std::max(oracle_err, std::abs(bK_norm_sq_closed(K) / oracle::bK_norm_sq(K) - 1.0));
    oracle_err = std::max(oracle_err, std::abs(kbK_norm_sq_closed(K) / oracle::kbK_norm_sq(K) - 1.0));
  }
  const double secs = seconds_since(t0);
  std::string worst;
  const bool ok = all_pass(reps, worst) && oracle_err <= 1e-8 && secs < 1.0;
  return {ok, std::to_string(reps.size()) + " reports, closest " + worst + ", closed form vs oracle rel " +
                  fmtd("%.2e", oracle_err) + ", " + fmtd("%.2f", secs) + " s"};
}

// ---------------------------------------------------------------- 2

double pair_distance(const PekarPair& a, const PekarPair& b) {
  const double h = a.psi.lattice.cell_volume(), w = a.phi.lattice.mode_weight();
  return std::sqrt(h * (a.psi.values - b.psi.values).squaredNorm() + w * (a.phi.values - b.phi.values).squaredNorm());
}

Outcome lp_solver() {
  const auto t0 = Clock::now();
  const BoxLattice lat(10.0, 32, 3);
  const PekarPair init{default_gaussian(lat), ModeVector(lat), 0.1};
  LPStepperConfig c;
  c.dt = 1e-3;
  c.t_end = 5.0;
  c.record_every = 50;
  const LPTrajectory tr = evolve(init, c);
  const double e0 = tr.diagnostics.front().energy;
  double norm_drift = 0.0, energy_drift = 0.0;
  for (const auto& d : tr.diagnostics) {
    norm_drift = std::max(norm_drift, std::abs(d.norm - 1.0));
    energy_drift = std::max(energy_drift, std::abs(d.energy - e0) / std::abs(e0));
  }
  // self-convergence from a dt, dt/2, dt/4 triple on the same case
  auto run = [&](double dt) {
    LPStepperConfig s;
    s.dt = dt;
    s.t_end = 1.0;
    s.record_every = 1000000;
    return evolve(init, s).snapshots.back();
  };
  const PekarPair a = run(0.04), b = run(0.02), q = run(0.01);
  const double order = std::log2(pair_distance(a, b) / pair_distance(b, q));
  const double secs = seconds_since(t0);
  const bool ok = norm_drift <= 1e-10 && energy_drift <= 1e-6 && order >= 1.9;
  return {ok, "norm drift " + fmtd("%.2e", norm_drift) + ", relative energy drift " + fmtd("%.2e", energy_drift) +
                  ", order " + fmtd("%.3f", order) + ", " + fmtd("%.1f", secs) + " s"};
}

// ---------------------------------------------------------------- 3

ModelSpec small(int n, int d, int N, int shells, int cutoff) {
  ModelSpec s;
  s.sites = BoxLattice(2.0 * std::numbers::pi, n, d);
  s.n_particles = N;
  s.modes = lowest_shell_modes(d, shells);
  s.phonon_cutoff = cutoff;
  s.alpha = 1.0;
  s.K = 0.8;
  return s;
}

Outcome fock_oracles() {
  const auto t0 = Clock::now();
  double krylov_err = 0.0, density_err = 0.0;
  std::size_t kmax = 0, dmax = 0;
  std::mt19937_64 rng(2024);
  for (const ModelSpec& s : {small(3, 1, 2, 1, 4), small(4, 1, 2, 2, 3), small(2, 3, 1, 1, 4), small(5, 1, 3, 1, 4)}) {
    FockModel m(s);
    if (m.dim() > 2000) continue;
    kmax = std::max(kmax, m.dim());
    const CMat H = m.HF.to_dense();
    for (double t : {0.3, 2.0}) {
      const CVec v = random_state(m.dim(), rng);
      krylov_err = std::max(krylov_err, (evolve_krylov(m.HF, v, t) - oracle::dense_propagate(H, v, t)).norm());
    }
  }
  for (const ModelSpec& s : {small(4, 1, 3, 1, 3), small(2, 3, 2, 1, 4), small(3, 1, 4, 2, 4), desk_spec()}) {
    FockModel m(s);
    if (m.dim() > 10000) continue;
    dmax = std::max(dmax, m.dim());
    const auto& ps = m.basis->particles();
    const CVec v = random_state(m.dim(), rng);
    const CMat o = oracle::first_quantized_density(ps.sites(), ps.particles(), m.basis->block(),
                                                   [&](const std::vector<int>& t) { return ps.index_of(t); }, v);
    density_err = std::max(density_err, (reduced_density(*m.basis, m.hops, v) - o).cwiseAbs().maxCoeff());
  }
  const double secs = seconds_since(t0);
  const bool ok = krylov_err <= 1e-8 && density_err <= 1e-12 && secs < 60.0;
  return {ok, "Krylov vs dense " + fmtd("%.2e", krylov_err) + " (dim <= " + std::to_string(kmax) +
                  "), density vs contraction " + fmtd("%.2e", density_err) + " (dim <= " + std::to_string(dmax) +
                  "), " + fmtd("%.1f", secs) + " s"};
}

// ---------------------------------------------------------------- 4

Outcome gross_representation() {
  const auto t0 = Clock::now();
  std::vector<std::vector<double>> res(2);
  bool within = true;
  double worst_ratio = 0.0;
  std::string dims;
  for (int li = 0; li < 2; ++li) {
    ModelSpec s = desk_spec();
    s.phonon_cutoff += li;
    FockModel m(s);
    const GrossHamiltonian HG = m.gross_hamiltonian();
    std::mt19937_64 rng(77);
    for (int i = 0; i < 20; ++i) {
      const CVec v = random_low_energy_state(m, rng);
      const CVec a = m.U.forward(apply_op(m.HF, m.U.adjoint(v)));
      const CVec b = apply_op(HG, v);
      const double r = (a - b).norm() / b.norm();
      // amplitude on the top phonon shell of the state H^F acts on
      const double leak = std::sqrt(top_shell_mass(*m.basis, m.U.adjoint(v)));
      res[li].push_back(r);
      within = within && r <= leak;
      worst_ratio = std::max(worst_ratio, r / leak);
    }
    dims += (li ? "/" : "") + std::to_string(m.dim());
  }
  bool decreasing = true;
  for (std::size_t i = 0; i < res[0].size(); ++i) decreasing = decreasing && res[1][i] < res[0][i];
  const double m3 = *std::max_element(res[0].begin(), res[0].end());
  const double m4 = *std::max_element(res[1].begin(), res[1].end());
  const double secs = seconds_since(t0);
  const bool ok = within && decreasing && m4 < m3 && secs < 120.0;
  return {ok, "max residual " + fmtd("%.3e", m3) + " -> " + fmtd("%.3e", m4) + " (cutoff 3 -> 4, dim " + dims +
                  "), max residual/leakage " + fmtd("%.3f", worst_ratio) + ", per-state decrease " +
                  (decreasing ? "yes" : "no") + ", " + fmtd("%.1f", secs) + " s"};
}

// ---------------------------------------------------------------- 5

Outcome inequality_chains() {
  const auto t0 = Clock::now();
  FockModel desk(desk_spec());
  std::mt19937_64 rng(5);
  std::vector<CVec> states;
  for (int i = 0; i < 100; ++i) states.push_back(random_state(desk.dim(), rng));
  const InequalityReport chain = verify_trace_norm_chain(desk, states, peaked_psi(desk.spec().sites.size()));

  FockModel m(mean_field_spec(2));
  const CVec psi = peaked_psi(m.spec().sites.size());
  const CVec phi = -std::sqrt(m.spec().alpha) * LatticeLPFlow(m.spec()).source(psi);
  CVec v = pekar_state(m.basis, psi, phi, 1e-2).coeffs;
  const double c0 = energy_variance(m.HF, v, m.particles());
  KrylovOptions ko;
  ko.tol = 1e-12;
  double drift = 0.0;
  for (int i = 0; i < 10; ++i) {
    v = evolve_krylov(m.HF, v, 0.1, ko);
    drift = std::max(drift, std::abs(energy_variance(m.HF, v, m.particles()) - c0));
  }
  const double secs = seconds_since(t0);
  const int viol = static_cast<int>(chain.context.at("violations"));
  const bool ok = chain.pass && viol == 0 && drift <= 1e-8 * std::max(1.0, c0);
  return {ok, "chain violations " + std::to_string(viol) + "/100 (min margin " + fmtd("%.3g", chain.margin) +
                  "), beta_c(0) " + fmtd("%.6g", c0) + " drift " + fmtd("%.2e", drift) + ", " + fmtd("%.1f", secs) +
                  " s"};
}

// ---------------------------------------------------------------- 6

Outcome operator_inequalities() {
  const auto t0 = Clock::now();
  FockModel m(desk_spec());
  const CGConstant cg = compute_cg_constant();
  std::vector<InequalityReport> reps = verify_interaction_bound(m, {0.25, 1.0, 4.0, 16.0});
  reps.push_back(verify_lieb_yamazaki(m, cg.sup_over_p));
  for (auto& r : verify_hamiltonian_sandwich(m)) reps.push_back(r);
  std::string worst;
  const bool ok = all_pass(reps, worst);
  double cHF = 0.0, cHG = 0.0;
  for (const auto& r : reps) {
    if (r.name == "sandwich_lower_HF") cHF = r.context.at("C");
    if (r.name == "sandwich_lower_HG") cHG = r.context.at("C");
  }
  return {ok, std::to_string(reps.size()) + " inequalities, C_G " + fmtd("%.4f", cg.sup_over_p) + ", sandwich C " +
                  fmtd("%.3f", cHF) + " (H^F) " + fmtd("%.3f", cHG) + " (H^G), closest " + worst + ", " +
                  fmtd("%.1f", seconds_since(t0)) + " s"};
}

// ---------------------------------------------------------------- 7

Outcome scalings() {
  const auto t0 = Clock::now();
  const ModelSpec s = scaling_spec();
  const ScalingStudy st = verify_initial_state_scalings(s, scaling_K_list(), {1, 2, 3}, peaked_psi(s.sites.size()),
                                                        CVec::Zero(s.mode_count()));
  std::string worst;
  const bool ok = all_pass(st.reports, worst);
  std::ostringstream os;
  for (const auto& r : st.reports)
    if (r.name == "scaling_a_slope" || r.name == "scaling_b_slope")
      os << (r.name == "scaling_a_slope" ? "a" : "b") << "(N=" << r.context.at("N") << ") slope "
         << fmtd("%.3f", r.lhs[0]) << " +- " << fmtd("%.3f", r.context.at("slope_stderr")) << "; ";
  os << "c envelope C " << fmtd("%.4f", st.c_envelope_constant) << ", " << fmtd("%.1f", seconds_since(t0)) << " s";
  return {ok, os.str()};
}

// ---------------------------------------------------------------- 8

Outcome mean_field_trend() {
  const auto t0 = Clock::now();
  std::vector<double> C(2);
  std::vector<double> td, beta;
  bool no_violations = true;
  const int grids[2] = {11, 21};
  for (int gi = 0; gi < 2; ++gi) {
    std::vector<BetaTrajectory> trajs;
    for (int N = 1; N <= 3; ++N) {
      FockModel m(mean_field_spec(N));
      const CVec psi = peaked_psi(m.spec().sites.size());
      const LatticePair init{psi, -std::sqrt(m.spec().alpha) * LatticeLPFlow(m.spec()).source(psi)};
      const MeanFieldRun run = run_mean_field(m, init, 1.0, grids[gi], {}, 1e-3, 1e-2);
      BetaTrajectory tr{"N=" + std::to_string(N), N, m.spec().K, {}, {}};
      for (const auto& r : run.reports) {
        tr.t.push_back(r.t);
        tr.beta.push_back(r.beta());
      }
      trajs.push_back(tr);
      if (gi == 0) {
        td.push_back(run.reports.back().trace_dist);
        beta.push_back(run.reports.back().beta());
      }
    }
    const GronwallFit g = fit_gronwall_envelope(trajs);
    C[gi] = g.C_fit;
    no_violations = no_violations && g.violations.empty();
  }
  bool mono = true;
  for (int i = 1; i < 3; ++i) mono = mono && td[i] <= td[i - 1] && beta[i] <= beta[i - 1];
  const double stab = std::abs(C[1] - C[0]) / C[0];
  const double secs = seconds_since(t0);
  const bool ok = mono && no_violations && stab <= 0.10 && secs <= 900.0;
  return {ok, "trace_dist(1) " + fmtd("%.4f", td[0]) + " " + fmtd("%.4f", td[1]) + " " + fmtd("%.4f", td[2]) +
                  ", beta(1) " + fmtd("%.4f", beta[0]) + " " + fmtd("%.4f", beta[1]) + " " + fmtd("%.4f", beta[2]) +
                  ", C_fit " + fmtd("%.4f", C[0]) + " -> " + fmtd("%.4f", C[1]) + " (" + fmtd("%.1f", 100 * stab) +
                  "%), violations " + (no_violations ? "none" : "present") + ", " + fmtd("%.1f", secs) + " s"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"form-factor identities", form_factors},
      {"LP solver conservation and order", lp_solver},
      {"Fock oracle equivalence", fock_oracles},
      {"Gross representation", gross_representation},
      {"exact inequality chains", inequality_chains},
      {"operator inequalities", operator_inequalities},
      {"initial-state scalings", scalings},
      {"mean-field trend", mean_field_trend},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %zu (%s): %s | %s\n", i + 1, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
