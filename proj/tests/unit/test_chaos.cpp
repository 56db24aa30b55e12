#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "logchaos/chaos/measure.hpp"
#include "logchaos/chaos/tail.hpp"
#include "logchaos/fields/ensemble.hpp"
#include "logchaos/fields/holder.hpp"
#include "logchaos/stats/estimators.hpp"

using namespace logchaos;

namespace {

const SeedCovariance tri = make_seed_covariance(1, SeedProfile::triangle);

struct Fixture1d {
  GridSpec grid{1, 1.0, 64, 0.25};
  FieldEnsemble ens = sample_cutoff_ensemble(grid, tri, ScaleLadder::dyadic(0.25, 3), 4000, 31);
};

const Fixture1d& fixture() {
  static Fixture1d f;
  return f;
}

}  // namespace

TEST(Subcritical, ZeroGammaIsLebesgue) {
  const auto& f = fixture();
  auto nu = gmc_subcritical(f.ens.field(0, 2), std::log(16.0), 0.0, f.grid, 1.0 / 16);
  for (double m : nu.masses) EXPECT_EQ(m, f.grid.cell_volume());
  EXPECT_EQ(nu.variant, ChaosVariant::subcritical);
}

TEST(Subcritical, SingleCellFormula) {
  GridSpec g(1, 1.0, 4, 0.25);
  std::vector<double> s(4, 0.0);
  auto nu = gmc_subcritical(s, 1.0, 1.0, g, std::exp(-1.0));
  EXPECT_NEAR(nu.masses[0], 0.25 * std::exp(-0.5), 1e-15);
  EXPECT_NEAR(nu.masses[0] / 0.25, 0.6065, 1e-4);
}

TEST(Subcritical, GammaRange) {
  GridSpec g(1, 1.0, 4, 0.25);
  std::vector<double> s(4, 0.0);
  EXPECT_THROW(gmc_subcritical(s, 1.0, std::sqrt(2.0), g, 0.5), PreconditionError);
  EXPECT_THROW(gmc_subcritical(s, 1.0, -0.1, g, 0.5), PreconditionError);
  EXPECT_THROW(gmc_subcritical(std::vector<double>(5, 0.0), 1.0, 0.5, g, 0.5), ConfigError);
}

TEST(Subcritical, MeanTotalMassIsVolume) {
  const auto& f = fixture();
  std::vector<double> total(f.ens.replicas);
  for (std::size_t r = 0; r < f.ens.replicas; ++r)
    total[r] = gmc_subcritical(f.ens.field(r, 2), std::log(16.0), 0.5, f.grid, 1.0 / 16).total();
  auto rep = stats::mc_mean_ci(total);
  EXPECT_TRUE(rep.within(1.0)) << rep.estimate << " " << rep.se;
}

TEST(Critical, SenetaHeydeFactor) {
  GridSpec g(1, 1.0, 4, 0.25);
  std::vector<double> s{0.1, -0.3, 0.7, 0.0};
  auto nu = gmc_critical(s, 1.0, g, std::exp(-1.0));
  EXPECT_DOUBLE_EQ(nu.gamma, std::sqrt(2.0));
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_NEAR(nu.masses[i], 0.25 * std::exp(std::sqrt(2.0) * s[i] - 1.0), 1e-15);
  auto fine = gmc_critical(s, 8 * std::log(2.0), g, 1.0 / 256);
  EXPECT_NEAR(std::sqrt(8 * std::log(2.0)), 2.3548, 1e-4);
  EXPECT_NEAR(fine.masses[3] / (0.25 * std::exp(-8 * std::log(2.0))), 2.3548, 1e-4);
  EXPECT_THROW(gmc_critical(s, 1.0, g, 1.0), DomainError);
}

TEST(Critical, MassesFiniteAndPositive) {
  GridSpec g(1, 1.0, 128, 0.25);
  CutoffFieldSampler sampler(g, tri, ScaleLadder::dyadic(1.0 / 64, 1));
  for (std::size_t r = 0; r < 1000; ++r) {
    auto s = sampler.sample(2, r);
    auto nu = gmc_critical(s, std::log(64.0), g, 1.0 / 64);
    for (double m : nu.masses) ASSERT_TRUE(m > 0.0 && std::isfinite(m));
  }
}

TEST(Option1, ScalesByExponentialOfH) {
  const auto& f = fixture();
  auto nu = gmc_subcritical(f.ens.field(3, 1), std::log(8.0), 0.5, f.grid, 0.125);
  auto same = chaos_option1(nu, std::vector<double>(f.grid.size(), 0.0));
  EXPECT_EQ(same.masses, nu.masses);
  EXPECT_EQ(same.variant, ChaosVariant::option1);
  auto shifted = chaos_option1(nu, std::vector<double>(f.grid.size(), 0.4));
  for (std::size_t i = 0; i < f.grid.size(); ++i) EXPECT_NEAR(shifted.masses[i], nu.masses[i] * std::exp(0.2), 1e-15);
  auto h = sample_holder_replica({6, 0.3, CoefficientLaw::uniform}, f.grid, 4, 0);
  auto x = chaos_option1(nu, h);
  double direct = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) direct += nu.masses[i] * std::exp(0.5 * h[i]);
  EXPECT_EQ(x.total(), direct);
}

TEST(Option2, ReducesToGaussianCase) {
  const auto& f = fixture();
  std::vector<double> var(f.grid.size(), std::log(8.0));
  auto norm = NormalizerTable::gaussian(var, 0.5);
  auto a = chaos_option2(f.ens.field(2, 1), norm, f.grid, 0.5, 0.125);
  auto b = gmc_subcritical(f.ens.field(2, 1), std::log(8.0), 0.5, f.grid, 0.125);
  for (std::size_t i = 0; i < f.grid.size(); ++i) EXPECT_NEAR(a.masses[i], b.masses[i], 1e-15 * b.masses[i] * 4);
}

TEST(Option2, GaussianHNormalizerAndMass) {
  const auto& f = fixture();
  HolderFieldSpec hs{4, 0.3, CoefficientLaw::gaussian};
  const std::size_t np = f.grid.size(), R = f.ens.replicas;
  std::vector<double> x(R * np);
  for (std::size_t r = 0; r < R; ++r) {
    auto h = sample_holder_replica(hs, f.grid, 77, r);
    auto s = f.ens.field(r, 1);
    for (std::size_t p = 0; p < np; ++p) x[r * np + p] = s[p] + h[p];
  }
  auto mc = NormalizerTable::monte_carlo(x, np, 0.5);
  auto cf = NormalizerTable::gaussian(std::vector<double>(np, std::log(8.0) + hs.variance()), 0.5);
  for (std::size_t p : {5u, 20u, 40u}) {
    stats::StatReport rep{mc.value[p], mc.se[p], R};
    EXPECT_TRUE(rep.within(cf.value[p])) << p;
  }
  std::vector<double> total(R);
  for (std::size_t r = 0; r < R; ++r)
    total[r] = chaos_option2(std::span<const double>(x).subspan(r * np, np), cf, f.grid, 0.5, 0.125).total();
  EXPECT_TRUE(stats::mc_mean_ci(total).within(1.0));
}

TEST(Option2, QualityGate) {
  GridSpec g(1, 1.0, 4, 0.25);
  std::vector<double> x(4, 0.0);
  NormalizerTable bad{{1.0, 1.0, 0.0, 1.0}, {0, 0, 0, 0}, 10};
  EXPECT_THROW(chaos_option2(x, bad, g, 0.5, 0.5), QualityError);
  NormalizerTable noisy{{1.0, 1.0, 1.0, 1.0}, {0, 0.06, 0, 0}, 10};
  EXPECT_THROW(chaos_option2(x, noisy, g, 0.5, 0.5), QualityError);
  NormalizerTable ok{{1.0, 1.0, 1.0, 1.0}, {0, 0.05, 0, 0}, 10};
  EXPECT_NO_THROW(chaos_option2(x, ok, g, 0.5, 0.5));
}

TEST(Integrate, TotalZeroAndLinearity) {
  const auto& f = fixture();
  auto nu = gmc_subcritical(f.ens.field(1, 2), std::log(16.0), 0.5, f.grid, 1.0 / 16);
  const std::size_t np = f.grid.size();
  EXPECT_EQ(integrate(nu, std::vector<double>(np, 1.0)), nu.total());
  EXPECT_EQ(integrate(nu, std::vector<double>(np, 0.0)), 0.0);
  std::vector<double> a(np), b(np), c(np);
  for (std::size_t i = 0; i < np; ++i) {
    a[i] = std::sin(double(i));
    b[i] = double(i) / np;
    c[i] = 2.5 * a[i] - 1.5 * b[i];
  }
  EXPECT_NEAR(integrate(nu, c), 2.5 * integrate(nu, a) - 1.5 * integrate(nu, b), 1e-14);
}

TEST(SmoothAt, LebesgueAndPointMass) {
  GridSpec g(1, 1.0, 64, 0.25);
  Mollifier eta(g, 0.125);
  std::vector<double> zero(g.size(), 0.0);
  auto leb = gmc_subcritical(zero, 0.0, 0.0, g, 0.125);
  for (std::size_t x : g.inner_points()) EXPECT_NEAR(smooth_at(leb, eta, x), 1.0, 1e-14);
  ChaosMeasure point{g, 0.125, 0.5, ChaosVariant::subcritical, std::vector<double>(g.size(), 0.0)};
  point.masses[30] = 0.7;
  double w = 0.0;
  for (std::size_t k = 0; k < eta.offsets().size(); ++k)
    if (eta.offsets()[k][0] == -2) w = eta.weights()[k];
  EXPECT_GT(w, 0.0);
  EXPECT_NEAR(smooth_at(point, eta, 32), 0.7 * w, 1e-15);
  EXPECT_THROW(smooth_at(leb, eta, 3), PreconditionError);
  EXPECT_THROW(smooth_at(leb, Mollifier(g, 0.3), 32), PreconditionError);
  EXPECT_THROW(smooth_at(point, eta, 40), UnderflowError);
}

TEST(SmoothAt, ReplicaMeanIsOne) {
  const auto& f = fixture();
  Mollifier eta(f.grid, 0.125);
  std::vector<double> v(f.ens.replicas);
  for (std::size_t r = 0; r < f.ens.replicas; ++r)
    v[r] = smooth_at(gmc_subcritical(f.ens.field(r, 2), std::log(16.0), 0.5, f.grid, 1.0 / 16), eta, 32);
  EXPECT_TRUE(stats::mc_mean_ci(v).within(1.0));
}

TEST(Mollifier, UnitDiscreteMassInTwoDimensions) {
  GridSpec g(2, 1.0, 32, 0.25);
  Mollifier eta(g, 0.2);
  double s = 0.0;
  for (double w : eta.weights()) {
    EXPECT_GE(w, 0.0);
    s += w * g.cell_volume();
  }
  EXPECT_NEAR(s, 1.0, 1e-14);
  for (auto o : eta.offsets()) EXPECT_LT(std::hypot(o[0], o[1]) * g.spacing(), 0.2);
}

TEST(Tail, HillFlagsParetoTails) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> light(4000), heavy(4000);
  for (std::size_t i = 0; i < 4000; ++i) {
    double w = 1.0 - u(rng);
    light[i] = std::pow(w, -1.0 / 6.0);
    heavy[i] = std::pow(w, -1.0 / 1.2);
  }
  auto a = tail_diagnostic(light, 2.0);
  auto b = tail_diagnostic(heavy, 2.0);
  EXPECT_FALSE(a.heavy) << a.hill_alpha;
  EXPECT_TRUE(b.heavy) << b.hill_alpha;
  EXPECT_GT(b.ratio_growth_slope, a.ratio_growth_slope);
  EXPECT_THROW(tail_diagnostic(std::vector<double>(10, 1.0), 2.0), PreconditionError);
}
