#pragma once

#include "lpmf/bounds/operator_bounds.hpp"
#include "lpmf/fock/functionals.hpp"

#include <algorithm>
#include <numeric>

namespace lpmf {

// q-expectation <= Tr|gamma - |psi><psi|| <= 4 sqrt(q-expectation), exact.
inline InequalityReport verify_trace_norm_chain(const FockModel& model, const std::vector<CVec>& states,
                                                const CVec& psi) {
  InequalityReport r;
  r.name = "trace_norm_chain";
  r.margin = std::numeric_limits<double>::infinity();
  int violations = 0;
  for (const CVec& s : states) {
    const CMat g = reduced_density(*model.basis, model.hops, s);
    const double x = depletion(g, psi), td = trace_distance(g, psi);
    const double m = std::min(td - x, 4.0 * std::sqrt(x) - td);
    if (m < 0.0) ++violations;
    r.margin = std::min(r.margin, m);
    r.lhs.push_back(x);
    r.rhs.push_back(td);
  }
  r.slack = 0.0;
  r.context["states"] = static_cast<double>(states.size());
  r.context["violations"] = violations;
  r.decide();
  return r;
}

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  int points = 0;
};

inline LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  const int n = static_cast<int>(lx.size());
  if (n < 3) throw std::invalid_argument("fit_loglog: needs at least 3 positive points, got " + std::to_string(n));
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  LogLogFit f;
  f.points = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = ly[i] - f.intercept - f.slope * lx[i];
    ssr += e * e;
  }
  f.slope_stderr = n > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
  return f;
}

struct ScalingCell {
  int N = 0;
  double K = 0.0;
  double a = 0.0, b = 0.0, c = 0.0;
  double leakage = 0.0;
};

struct ScalingStudy {
  std::vector<ScalingCell> cells;
  std::vector<InequalityReport> reports;
  double c_envelope_constant = 0.0;
};

inline double c_envelope_shape(double K, int N) { return 1.0 / K + 1.0 / N + K / (double(N) * N); }

// a, b, c on Gross-dressed Pekar states U_K^* psi^{(x)N} (x) W(sqrt(N) phi) Omega
// over a grid of K and N. psi lives on the particle sites, phi on the modes.
inline ScalingStudy verify_initial_state_scalings(const ModelSpec& base, const std::vector<double>& K_list,
                                                  const std::vector<int>& N_list, const CVec& psi, const CVec& phi,
                                                  double a_threshold = -1.2, double b_threshold = -2.7,
                                                  double leakage_tolerance = 1e-6) {
  if (K_list.size() < 3) throw std::invalid_argument("verify_initial_state_scalings: needs at least 3 K values");
  const auto [kmin, kmax] = std::minmax_element(K_list.begin(), K_list.end());
  ScalingStudy st;
  for (int N : N_list) {
    for (double K : K_list) {
      ModelSpec s = base;
      s.n_particles = N;
      s.K = K;
      FockModel model(s);
      const ManyBodyState st0 = gross_dressed_pekar_state(model.U, psi, phi, leakage_tolerance);
      const FunctionalReport fr = functional_report(model, st0.coeffs, psi, phi);
      st.cells.push_back({N, K, fr.a, fr.b, fr.c, fr.leakage});
    }
  }
  for (int N : N_list) {
    std::vector<double> ks, as, bs;
    for (const auto& c : st.cells)
      if (c.N == N) {
        ks.push_back(c.K);
        as.push_back(c.a);
        bs.push_back(c.b);
      }
    for (int which = 0; which < 2; ++which) {
      InequalityReport r;
      r.name = which == 0 ? "scaling_a_slope" : "scaling_b_slope";
      const double thr = which == 0 ? a_threshold : b_threshold;
      r.context["N"] = N;
      r.context["K_min"] = *kmin;
      r.context["K_max"] = *kmax;
      try {
        const LogLogFit f = fit_loglog(ks, which == 0 ? as : bs);
        r.lhs = {f.slope};
        r.rhs = {thr};
        r.margin = thr - f.slope;
        r.context["slope_stderr"] = f.slope_stderr;
        r.context["points"] = f.points;
        r.decide();
        if (*kmax / *kmin < 10.0) {
          r.pass = false;
          r.note = "K range spans less than a decade";
        }
      } catch (const std::invalid_argument& e) {
        r.margin = -std::numeric_limits<double>::infinity();
        r.pass = false;
        r.note = e.what();
      }
      st.reports.push_back(r);
    }
  }
  // smallest C with c <= C (1/K + 1/N + K/N^2) on every cell
  for (const auto& c : st.cells) st.c_envelope_constant = std::max(st.c_envelope_constant, c.c / c_envelope_shape(c.K, c.N));
  InequalityReport env;
  env.name = "scaling_c_envelope";
  env.margin = std::numeric_limits<double>::infinity();
  int violations = 0;
  for (const auto& c : st.cells) {
    const double bound = st.c_envelope_constant * c_envelope_shape(c.K, c.N);
    env.lhs.push_back(c.c);
    env.rhs.push_back(bound);
    env.margin = std::min(env.margin, bound - c.c);
    if (c.c > bound * (1.0 + 1e-12)) ++violations;
  }
  env.slack = 1e-12 * st.c_envelope_constant;
  env.context["C_fit"] = st.c_envelope_constant;
  env.context["violations"] = violations;
  env.decide();
  // held-out check: constant fitted without the largest N must cover it
  const int nmax = *std::max_element(N_list.begin(), N_list.end());
  if (N_list.size() > 1) {
    double cfit = 0.0;
    for (const auto& c : st.cells)
      if (c.N != nmax) cfit = std::max(cfit, c.c / c_envelope_shape(c.K, c.N));
    InequalityReport ho;
    ho.name = "scaling_c_envelope_heldout";
    ho.margin = std::numeric_limits<double>::infinity();
    for (const auto& c : st.cells)
      if (c.N == nmax) {
        const double bound = cfit * c_envelope_shape(c.K, c.N);
        ho.lhs.push_back(c.c);
        ho.rhs.push_back(bound);
        ho.margin = std::min(ho.margin, bound - c.c);
      }
    ho.context["C_fit"] = cfit;
    ho.context["N_heldout"] = nmax;
    ho.decide();
    st.reports.push_back(ho);
  }
  st.reports.push_back(env);
  return st;
}

inline double trace_norm(const CMat& A) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (A + A.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

struct ClosenessResult {
  std::vector<double> K;
  std::vector<std::vector<double>> ratios;  // per batch, per K: LHS K^{3/2} / energy factor
  std::vector<double> pekar_lhs;            // per K
  double C_fit_batch1 = 0.0, C_fit_batch2 = 0.0;
  std::vector<InequalityReport> reports;
};

// Tr|gamma_Psi - gamma_{U_K Psi}| against K^{-3/2} ||((H^F + C N)/N)^{1/2} Psi||, with C
// chosen so that H^F + C N >= 0 on the truncated space.
inline ClosenessResult verify_gross_closeness(const ModelSpec& base, const std::vector<double>& K_list,
                                              const CVec& psi, const CVec& phi, int states_per_batch = 5,
                                              uint64_t seed = 41) {
  ClosenessResult res;
  res.K = K_list;
  res.ratios.assign(2, std::vector<double>(K_list.size(), 0.0));
  double c_shift = -1.0;
  for (std::size_t ki = 0; ki < K_list.size(); ++ki) {
    ModelSpec s = base;
    s.K = K_list[ki];
    FockModel model(s);
    const int N = s.n_particles;
    if (c_shift < 0.0) {
      const MarginResult m = smallest_eigenvalue(model.HF, model.dim(), seed);
      c_shift = std::max(0.0, -m.certified() / N);
    }
    auto lhs_of = [&](const CVec& v) {
      const CMat g0 = reduced_density(*model.basis, model.hops, v);
      const CMat g1 = reduced_density(*model.basis, model.hops, model.U.forward(v));
      return trace_norm(g0 - g1);
    };
    for (int batch = 0; batch < 2; ++batch) {
      std::mt19937_64 rng(seed + 1000 * (batch + 1));
      for (int i = 0; i < states_per_batch; ++i) {
        const CVec v = random_low_energy_state(model, rng);
        const double ef = std::sqrt(std::max(0.0, (expectation(model.HF, v) + c_shift * N) / N));
        const double ratio = ef > 0.0 ? lhs_of(v) * std::pow(s.K, 1.5) / ef : 0.0;
        res.ratios[batch][ki] = std::max(res.ratios[batch][ki], ratio);
      }
    }
    res.pekar_lhs.push_back(lhs_of(pekar_state(model.basis, psi, phi).coeffs));
  }
  res.C_fit_batch1 = *std::max_element(res.ratios[0].begin(), res.ratios[0].end());
  res.C_fit_batch2 = *std::max_element(res.ratios[1].begin(), res.ratios[1].end());

  InequalityReport stab;
  stab.name = "gross_closeness_constant_stability";
  const double hi = std::max(res.C_fit_batch1, res.C_fit_batch2);
  const double rel = hi > 0.0 ? std::abs(res.C_fit_batch1 - res.C_fit_batch2) / hi : 0.0;
  stab.lhs = {rel};
  stab.rhs = {0.5};
  stab.margin = 0.5 - rel;
  stab.context["C_batch1"] = res.C_fit_batch1;
  stab.context["C_batch2"] = res.C_fit_batch2;
  stab.context["shift_C"] = c_shift;
  stab.decide();
  res.reports.push_back(stab);

  InequalityReport mono;
  mono.name = "gross_closeness_pekar_monotone";
  mono.lhs = res.pekar_lhs;
  mono.margin = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> order(K_list.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return K_list[i] < K_list[j]; });
  for (std::size_t i = 1; i < order.size(); ++i)
    mono.margin = std::min(mono.margin, res.pekar_lhs[order[i - 1]] - res.pekar_lhs[order[i]]);
  mono.slack = 1e-14;
  mono.decide();
  res.reports.push_back(mono);
  return res;
}

struct BetaTrajectory {
  std::string label;
  int N = 1;
  double K = 1.0;
  std::vector<double> t;     // uniform grid starting at 0
  std::vector<double> beta;
};

struct GronwallFit {
  double C_fit = 0.0;
  std::vector<double> C_per_trajectory;
  std::vector<std::string> violations;
  std::vector<std::string> coarse_sampling;
};

// Derivative estimates: second-order central differences inside, second-order
// one-sided at the ends. err holds a Richardson estimate (h vs 2h) where available.
inline void finite_differences(const std::vector<double>& t, const std::vector<double>& y, std::vector<double>& d,
                               std::vector<double>& err) {
  const std::size_t n = y.size();
  d.assign(n, 0.0);
  err.assign(n, 0.0);
  if (n < 3) throw std::invalid_argument("finite_differences: needs at least 3 samples");
  const double h = t[1] - t[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) d[i] = (-3 * y[0] + 4 * y[1] - y[2]) / (2 * h);
    else if (i == n - 1) d[i] = (3 * y[n - 1] - 4 * y[n - 2] + y[n - 3]) / (2 * h);
    else d[i] = (y[i + 1] - y[i - 1]) / (2 * h);
  }
  // Richardson estimate (h vs 2h) on interior points, copied outward to the ends.
  if (n < 5) return;
  for (std::size_t i = 2; i + 2 < n; ++i) err[i] = std::abs(d[i] - (y[i + 2] - y[i - 2]) / (4 * h)) / 3.0;
  err[0] = err[1] = err[2];
  err[n - 1] = err[n - 2] = err[n - 3];
}

// |beta'| <= C (1 + t^2)(beta + K/N + 1/K): C_fit is the smallest such C over all
// samples; the integrated envelope (beta_0 + delta) e^{C (t + t^3/3)} - delta and
// the coarser (beta_0 + delta) e^{C (1 + t)^3} are then checked pointwise.
inline GronwallFit fit_gronwall_envelope(const std::vector<BetaTrajectory>& trajs) {
  GronwallFit g;
  struct Cache {
    std::vector<double> d, err;
  };
  std::vector<Cache> cache(trajs.size());
  for (std::size_t k = 0; k < trajs.size(); ++k) {
    const auto& tr = trajs[k];
    if (tr.t.size() != tr.beta.size()) throw std::invalid_argument("fit_gronwall_envelope: ragged trajectory");
    finite_differences(tr.t, tr.beta, cache[k].d, cache[k].err);
    const double delta = tr.K / tr.N + 1.0 / tr.K;
    double c = 0.0;
    for (std::size_t i = 0; i < tr.t.size(); ++i)
      c = std::max(c, std::abs(cache[k].d[i]) / ((1.0 + tr.t[i] * tr.t[i]) * (tr.beta[i] + delta)));
    g.C_per_trajectory.push_back(c);
    g.C_fit = std::max(g.C_fit, c);
  }
  for (std::size_t k = 0; k < trajs.size(); ++k) {
    const auto& tr = trajs[k];
    const double delta = tr.K / tr.N + 1.0 / tr.K;
    const double b0 = tr.beta.front() + delta;
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
      const double t = tr.t[i];
      const double sharp = b0 * std::exp(g.C_fit * (t + t * t * t / 3.0)) - delta;
      const double coarse = b0 * std::exp(g.C_fit * std::pow(1.0 + t, 3)) - delta;
      const double tolr = 1e-12 * (tr.beta[i] + delta);
      if (tr.beta[i] > sharp + tolr || tr.beta[i] > coarse + tolr)
        g.violations.push_back(tr.label + " t=" + std::to_string(t));
      const double bound = g.C_fit * (1.0 + t * t) * (tr.beta[i] + delta);
      if (cache[k].err[i] > 0.1 * bound) g.coarse_sampling.push_back(tr.label + " t=" + std::to_string(t));
    }
  }
  return g;
}

// Re-evaluates lambda_min(A) after a random permutation of the basis ordering.
inline InequalityReport permutation_invariance(const SparseOperator& A, uint64_t seed, double tol = 1e-12) {
  const std::size_t D = A.dim();
  if (D > kDenseLimit) throw std::invalid_argument("permutation_invariance: dimension too large for dense check");
  std::vector<int> perm(D);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> P(D);
  for (std::size_t i = 0; i < D; ++i) P.indices()[i] = perm[i];
  const CMat M = A.to_dense();
  const CMat Mp = P * M * P.transpose();
  const MarginResult m0 = smallest_eigenvalue(SparseOperator{A.matrix, true}, D);
  const MarginResult m1 = smallest_eigenvalue(SparseOperator{SpMat(Mp.sparseView()), true}, D);
  InequalityReport r;
  r.name = "permutation_invariance";
  r.lhs = {m0.lambda_min};
  r.rhs = {m1.lambda_min};
  const double diff = std::abs(m0.lambda_min - m1.lambda_min);
  r.margin = tol * std::max(1.0, m0.scale) - diff;
  r.decide();
  return r;
}

}  // namespace lpmf
