#pragma once

#include "lpmf/fock/functionals.hpp"
#include "lpmf/landau_pekar/lattice_flow.hpp"

namespace lpmf {

struct MeanFieldRun {
  std::vector<FunctionalReport> reports;
  std::vector<LatticePair> reference;
  std::vector<double> norm_drift;
};

// Exact H^F flow of the Pekar state psi^{(x)N} (x) W(sqrt(N) phi) Omega, with the
// lattice Landau-Pekar pair evolved alongside as reference, sampled on a
// uniform grid of `samples` points in [0, t_end].
inline MeanFieldRun run_mean_field(const FockModel& model, const LatticePair& init, double t_end, int samples,
                                   const KrylovOptions& kopt = {}, double lp_dt = 1e-3,
                                   double leakage_tolerance = 1e-6) {
  if (samples < 2) throw std::invalid_argument("run_mean_field: needs at least two samples");
  std::vector<double> times(samples);
  for (int i = 0; i < samples; ++i) times[i] = t_end * i / (samples - 1);
  const LatticeLPFlow flow(model.spec());
  MeanFieldRun run;
  run.reference = flow.sample(init, times, lp_dt);
  CVec state = pekar_state(model.basis, init.psi, init.phi, leakage_tolerance).coeffs;
  for (int i = 0; i < samples; ++i) {
    if (i > 0) state = evolve_krylov(model.HF, state, times[i] - times[i - 1], kopt);
    const LatticePair& ref = run.reference[i];
    const CVec psi = ref.psi / ref.psi.norm();
    run.reports.push_back(
        functional_report(model, state, psi, ref.phi, flow.energy(ref), times[i], leakage_tolerance));
    run.norm_drift.push_back(std::abs(state.norm() - 1.0));
  }
  return run;
}

}  // namespace lpmf
