#include "lpmf/bounds/closed_form.hpp"
#include "lpmf/spectral/fft.hpp"
#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace lpmf;

namespace {

CVec random_field(std::size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CVec v(n);
  for (auto& x : v) x = cplx(nd(rng), nd(rng));
  return v;
}

}  // namespace

TEST(Fourier, MatchesNaiveSumIn3d) {
  const BoxLattice lat(10.0, 4, 3);
  const ComplexField f(lat, random_field(lat.size(), 1));
  const ModeVector g = forward_ft(f);
  EXPECT_LT((g.values - oracle::naive_dft(lat, f.values)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Fourier, MatchesNaiveSumIn1dOddLength) {
  const BoxLattice lat(3.0, 7, 1);
  const ComplexField f(lat, random_field(lat.size(), 2));
  EXPECT_LT((forward_ft(f).values - oracle::naive_dft(lat, f.values)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Fourier, ParsevalAndRoundTrip) {
  const BoxLattice lat(7.5, 8, 3);
  const ComplexField f(lat, random_field(lat.size(), 3));
  const ModeVector g = forward_ft(f);
  EXPECT_NEAR(g.norm(), f.norm(), 1e-12 * f.norm());
  const ComplexField back = inverse_ft(g);
  EXPECT_LT((back.values - f.values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Fourier, RejectsMismatchedLattice) {
  const BoxLattice a(1.0, 4, 3), b(2.0, 4, 3);
  EXPECT_THROW(forward_ft(ComplexField(a), b), LatticeMismatch);
}

TEST(FormFactor, CutoffRequiredForRangedKinds) {
  const BoxLattice lat(5.0, 4, 3);
  EXPECT_THROW(make_form_factor(FormFactorKind::B, std::nullopt, {0, 0, 0}, lat), std::invalid_argument);
  EXPECT_THROW(make_form_factor(FormFactorKind::GLow, 0.0, {0, 0, 0}, lat), std::invalid_argument);
  EXPECT_NO_THROW(make_form_factor(FormFactorKind::G, std::nullopt, {0, 0, 0}, lat));
}

TEST(FormFactor, AnchorOnlyChangesPhase) {
  const BoxLattice lat(5.0, 6, 3);
  const auto f0 = make_form_factor(FormFactorKind::B, 1.0, {0, 0, 0}, lat);
  const auto f1 = make_form_factor(FormFactorKind::B, 1.0, {0.3, 1.1, -2.0}, lat);
  EXPECT_LT((f0.values.values.cwiseAbs() - f1.values.values.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(lattice_norm_sq(f0), lattice_norm_sq(f1), 1e-14);
}

TEST(FormFactor, LowAndHighPartsSplitG) {
  const BoxLattice lat(6.0, 6, 3);
  const Vec3 x{0.5, 0.25, 1.0};
  const auto g = make_form_factor(FormFactorKind::G, std::nullopt, x, lat);
  const auto lo = make_form_factor(FormFactorKind::GLow, 2.0, x, lat);
  const auto hi = make_form_factor(FormFactorKind::GHigh, 2.0, x, lat);
  // modes with |k| == K exactly would be counted twice; none exist at this spacing
  EXPECT_LT((lo.values.values + hi.values.values - g.values.values).cwiseAbs().maxCoeff(), 1e-15);
}

class ContinuumNormsTest : public ::testing::TestWithParam<double> {};

TEST_P(ContinuumNormsTest, AgreeWithIndependentQuadrature) {
  const double K = GetParam();
  const ContinuumNorms n = continuum_norms(K);
  EXPECT_NEAR(n.gK_norm_sq, 4.0 * std::numbers::pi * K, 1e-8 * 4.0 * std::numbers::pi * K);
  EXPECT_NEAR(n.bK_norm_sq, oracle::bK_norm_sq(K), 1e-8 * oracle::bK_norm_sq(K));
  EXPECT_NEAR(n.kbK_norm_sq, oracle::kbK_norm_sq(K), 1e-8 * oracle::kbK_norm_sq(K));
  EXPECT_LE(n.bK_norm_sq, 4.0 * std::numbers::pi / (K * K * K));
  EXPECT_LE(n.kbK_norm_sq, 4.0 * std::numbers::pi / K);
}

INSTANTIATE_TEST_SUITE_P(Cutoffs, ContinuumNormsTest, ::testing::Values(0.5, 1.0, 4.0, 16.0, 100.0));

TEST(ContinuumNorms, ClosedFormsAgreeWithQuadratureOracle) {
  for (double K : {0.5, 4.0, 30.0}) {
    EXPECT_NEAR(bK_norm_sq_closed(K), oracle::bK_norm_sq(K), 1e-9 * oracle::bK_norm_sq(K));
    EXPECT_NEAR(kbK_norm_sq_closed(K), oracle::kbK_norm_sq(K), 1e-9 * oracle::kbK_norm_sq(K));
  }
}

TEST(ContinuumNorms, RejectsNonPositiveCutoff) { EXPECT_THROW(continuum_norms(0.0), std::invalid_argument); }

TEST(FormFactorReports, AllPass) {
  const auto reps = verify_form_factor_norms({0.5, 1.0, 4.0, 16.0});
  EXPECT_EQ(reps.size(), 20u);
  for (const auto& r : reps) EXPECT_TRUE(r.pass) << r.name << " margin " << r.margin;
}

TEST(CGIntegral, MatchesArctanClosedForm) {
  for (double p : {0.0, 0.1, 0.5, 1.0, 3.0, 10.0}) {
    const double want = oracle::cg_closed_form(p);
    EXPECT_NEAR(cg_integral(p).value, want, 1e-9 * want) << "p = " << p;
  }
}

TEST(CGIntegral, SupremumAtOrigin) {
  const CGConstant c = compute_cg_constant(10.0, 41);
  EXPECT_NEAR(c.value_at_p0, 2.0 * std::numbers::pi * std::numbers::pi, 1e-9);
  EXPECT_EQ(c.argmax_p, 0.0);
  EXPECT_TRUE(c.monotone_decay);
  EXPECT_NEAR(c.quoted_rhs, 4.0 * std::numbers::pi, 1e-15);
}
