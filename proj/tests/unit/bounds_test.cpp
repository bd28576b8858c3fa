#include "lpmf/bounds/state_bounds.hpp"
#include "lpmf/fock/presets.hpp"
#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

using namespace lpmf;

namespace {

ModelSpec small_spec(double K) {
  ModelSpec s;
  s.sites = BoxLattice(2.0 * std::numbers::pi, 3, 1);
  s.n_particles = 2;
  s.modes = lowest_shell_modes(1, 2);
  s.phonon_cutoff = 3;
  s.alpha = 1.0;
  s.K = K;
  return s;
}

SparseOperator diagonal(const std::vector<double>& d) {
  SpMat m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m.insert(i, i) = d[i];
  return {m, true};
}

}  // namespace

TEST(OperatorInequality, DenseMarginsOnKnownSpectra) {
  auto r = operator_inequality("pos", diagonal({1.0, 2.0, 3.0}), 3, 1);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.margin, 1.0, 1e-14);
  r = operator_inequality("neg", diagonal({-1e-3, 2.0}), 2, 1);
  EXPECT_FALSE(r.pass);
  r = operator_inequality("edge", diagonal({-1e-12, 2.0}), 2, 1);
  EXPECT_TRUE(r.pass);
}

TEST(OperatorInequality, LanczosPathAboveDenseLimit) {
  const std::size_t D = kDenseLimit + 500;
  std::vector<double> d(D);
  for (std::size_t i = 0; i < D; ++i) d[i] = 1.0 + std::sin(0.37 * i) * std::sin(0.37 * i) * 5.0;
  d[1234] = 0.25;
  const MarginResult m = smallest_eigenvalue(diagonal(d), D, 7);
  EXPECT_FALSE(m.dense);
  EXPECT_TRUE(m.converged);
  EXPECT_NEAR(m.lambda_min, 0.25, 1e-9);
  EXPECT_LE(m.certified(), m.lambda_min);
}

TEST(OperatorInequality, LanczosAgreesWithDenseOnRandomHermitian) {
  std::mt19937_64 rng(3);
  const std::size_t D = 300;
  CMat A(D, D);
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = 0; j < D; ++j) A(i, j) = random_vector(1, rng)[0];
  A = (A + A.adjoint()).eval();
  const SparseOperator op{SpMat(A.sparseView()), true};
  const ExtremalResult e = lanczos_smallest(op, D, 5);
  Eigen::SelfAdjointEigenSolver<CMat> es(A, Eigen::EigenvaluesOnly);
  EXPECT_TRUE(e.converged);
  EXPECT_NEAR(e.value, es.eigenvalues()[0], 1e-8);
}

TEST(OperatorInequality, PermutationInvariance) {
  FockModel m(small_spec(0.8));
  ASSERT_LE(m.dim(), kDenseLimit);
  EXPECT_TRUE(permutation_invariance(m.HF, 17).pass);
}

TEST(OperatorBounds, SandwichHoldsWithFittedConstant) {
  FockModel m(small_spec(0.8));
  const auto reps = verify_hamiltonian_sandwich(m, 3);
  ASSERT_EQ(reps.size(), 4u);
  for (const auto& r : reps) {
    EXPECT_TRUE(r.pass) << r.name << " margin " << r.margin;
    EXPECT_GE(r.context.at("C"), 0.0);
  }
}

TEST(OperatorBounds, SandwichConstantIsTight) {
  // at C slightly below the fitted value the binding side must fail
  FockModel m(small_spec(0.8));
  const auto reps = verify_hamiltonian_sandwich(m, 3);
  const double C = reps[0].context.at("C");
  ASSERT_GT(C, 0.0);
  const CMat H = m.HF.to_dense(), H0 = m.H0.to_dense();
  const double N = m.particles();
  const auto I = CMat::Identity(m.dim(), m.dim());
  Eigen::SelfAdjointEigenSolver<CMat> lo(H - 0.5 * H0 + 0.99 * C * N * I, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<CMat> up(1.5 * H0 - H + 0.99 * C * N * I, Eigen::EigenvaluesOnly);
  EXPECT_LT(std::min(lo.eigenvalues()[0], up.eigenvalues()[0]), 0.0);
}

TEST(OperatorBounds, InteractionAndGrossCorrectionBounds) {
  FockModel m(small_spec(0.8));
  const auto reps = verify_interaction_bound(m, {0.5, 2.0});
  EXPECT_EQ(reps.size(), 6u);
  for (const auto& r : reps) EXPECT_TRUE(r.pass) << r.name << " margin " << r.margin;
}

TEST(OperatorBounds, LiebYamazakiWithComputedConstant) {
  FockModel m(small_spec(0.8));
  const auto r = verify_lieb_yamazaki(m, compute_cg_constant(10.0, 21).sup_over_p);
  EXPECT_TRUE(r.pass) << r.margin;
}

TEST(StateBounds, LogLogFitRecoversPowerLaw) {
  std::vector<double> x, y;
  for (double k : {2.0, 5.0, 11.0, 40.0}) {
    x.push_back(k);
    y.push_back(3.0 * std::pow(k, -2.5));
  }
  const LogLogFit f = fit_loglog(x, y);
  EXPECT_NEAR(f.slope, -2.5, 1e-12);
  EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-12);
  EXPECT_LT(f.slope_stderr, 1e-10);
  EXPECT_THROW(fit_loglog({1.0, 2.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST(StateBounds, GronwallConstantTrajectory) {
  BetaTrajectory tr{"flat", 2, 1.0, {}, {}};
  for (int i = 0; i <= 10; ++i) {
    tr.t.push_back(0.1 * i);
    tr.beta.push_back(0.4);
  }
  const GronwallFit g = fit_gronwall_envelope({tr});
  EXPECT_LT(g.C_fit, 1e-12);
  EXPECT_TRUE(g.violations.empty());
}

TEST(StateBounds, GronwallEnvelopeCoversGrowingTrajectory) {
  BetaTrajectory tr{"grow", 3, 2.0, {}, {}};
  for (int i = 0; i <= 40; ++i) {
    const double t = 0.05 * i;
    tr.t.push_back(t);
    tr.beta.push_back(0.1 * std::exp(0.8 * t) + 0.05 * t * t);
  }
  const GronwallFit g = fit_gronwall_envelope({tr});
  EXPECT_GT(g.C_fit, 0.0);
  EXPECT_TRUE(g.violations.empty());
  EXPECT_TRUE(g.coarse_sampling.empty());
}

TEST(StateBounds, InitialStateScalingsOnSmallGrid) {
  const ModelSpec s = scaling_spec();
  const CVec psi = peaked_psi(s.sites.size());
  const ScalingStudy st = verify_initial_state_scalings(s, {5, 15, 51}, {1, 2, 3}, psi, CVec::Zero(s.mode_count()));
  for (const auto& r : st.reports) EXPECT_TRUE(r.pass) << r.name << " margin " << r.margin;
}

TEST(StateBounds, ScalingNeedsADecade) {
  const ModelSpec s = scaling_spec();
  const CVec psi = peaked_psi(s.sites.size());
  const ScalingStudy st = verify_initial_state_scalings(s, {5, 9, 15}, {1}, psi, CVec::Zero(s.mode_count()));
  bool any_fail = false;
  for (const auto& r : st.reports)
    if (r.name == "scaling_b_slope") any_fail = any_fail || !r.pass;
  EXPECT_TRUE(any_fail);
}

TEST(StateBounds, TraceNormOfKnownMatrix) {
  CMat A(2, 2);
  A << 1.0, 0.0, 0.0, -2.0;
  EXPECT_NEAR(trace_norm(A), 3.0, 1e-14);
}
