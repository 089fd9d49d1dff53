#include "vineshap/bicop.h"

#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "../oracles.h"
#include "vineshap/error.h"
#include "vineshap/kendall.h"
#include "vineshap/rng.h"

namespace vineshap {
namespace {

std::vector<PairCopula> ParametricZoo() {
  std::vector<PairCopula> out = {PairCopula::Independence(), PairCopula::Gaussian(0.0),
                                 PairCopula::Gaussian(0.7), PairCopula::Gaussian(-0.45)};
  for (int rot : {0, 90, 180, 270}) {
    out.push_back(PairCopula::Clayton(2.0, rot));
    out.push_back(PairCopula::Clayton(0.3, rot));
  }
  return out;
}

void Split(const std::vector<double>& xy, std::vector<double>& u, std::vector<double>& v) {
  u.clear();
  v.clear();
  for (std::size_t i = 0; i + 1 < xy.size(); i += 2) {
    u.push_back(xy[i]);
    v.push_back(xy[i + 1]);
  }
}

TEST(PairCopulaTest, IndependenceIsFlat) {
  const PairCopula pc = PairCopula::Independence();
  EXPECT_EQ(pc.Density(0.2, 0.9), 1.0);
  EXPECT_EQ(pc.HFunc(0.3, 0.8, CondOn::kSecond), 0.3);
  EXPECT_EQ(pc.HInv(0.4, 0.1, CondOn::kFirst), 0.4);
}

TEST(PairCopulaTest, GaussianZeroIsIndependence) {
  const PairCopula pc = PairCopula::Gaussian(0.0);
  EXPECT_NEAR(pc.Density(0.3, 0.7), 1.0, 1e-14);
  EXPECT_NEAR(pc.HFunc(0.3, 0.7, CondOn::kSecond), 0.3, 1e-14);
}

TEST(PairCopulaTest, GaussianHFuncClosedForm) {
  const double rho = 0.6;
  const PairCopula pc = PairCopula::Gaussian(rho);
  for (double u : {0.1, 0.5, 0.93}) {
    for (double v : {0.2, 0.66}) {
      const double want = oracle::Phi((oracle::PhiInverse(u) - rho * oracle::PhiInverse(v)) /
                                      std::sqrt(1 - rho * rho));
      EXPECT_NEAR(pc.HFunc(u, v, CondOn::kSecond), want, 1e-12);
    }
  }
}

TEST(PairCopulaTest, ClaytonAgainstFiniteDifferences) {
  const PairCopula pc = PairCopula::Clayton(2.0);
  auto cdf = [](double u, double v) { return oracle::ClaytonCdf(u, v, 2.0); };
  const double dens = oracle::MixedDerivative(cdf, 0.5, 0.5, 1e-2);
  EXPECT_NEAR(pc.Density(0.5, 0.5), dens, 1e-8);
  const double h = oracle::Derivative([&](double v) { return cdf(0.5, v); }, 0.5, 1e-2);
  EXPECT_NEAR(pc.HFunc(0.5, 0.5, CondOn::kSecond), h, 1e-9);
}

TEST(PairCopulaTest, ClaytonClosedFormInverseMatchesBisection) {
  const PairCopula pc = PairCopula::Clayton(2.0);
  for (double w : {0.05, 0.3, 0.5, 0.8, 0.99}) {
    for (double v : {0.1, 0.5, 0.9}) {
      double lo = 0, hi = 1;
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (pc.HFunc(mid, v, CondOn::kSecond) < w ? lo : hi) = mid;
      }
      const double closed = std::pow((std::pow(w, -2.0 / 3.0) - 1) * std::pow(v, -2.0) + 1, -0.5);
      EXPECT_NEAR(pc.HInv(w, v, CondOn::kSecond), closed, 1e-12);
      EXPECT_NEAR(closed, 0.5 * (lo + hi), 1e-12);
    }
  }
}

// Far in the tails h is within 1e-12 of 1; the complement must still carry
// full relative precision.
TEST(PairCopulaTest, TailFormKeepsComplementPrecision) {
  const double rho = 0.9;
  const PairCopula gauss = PairCopula::Gaussian(rho);
  const double u = 0.975, v = 0.025;
  const TailProb h = gauss.HFunc(TailProb::Of(u), TailProb::Of(v), CondOn::kSecond);
  const double z = (oracle::PhiInverse(u) - rho * oracle::PhiInverse(v)) / std::sqrt(1 - rho * rho);
  EXPECT_NEAR(h.q / oracle::Phi(-z), 1.0, 1e-8);
  const TailProb back = gauss.HInv(h, TailProb::Of(v), CondOn::kSecond);
  EXPECT_NEAR(back.p, u, 1e-12);
  EXPECT_NEAR(back.q, 1 - u, 1e-12);

  const double theta = 5.0;
  const PairCopula clayton = PairCopula::Clayton(theta);
  const TailProb hc = clayton.HFunc(TailProb::Of(u), TailProb::Of(v), CondOn::kSecond);
  const long double t = (std::pow(static_cast<long double>(u), -theta) - 1) *
                        std::pow(static_cast<long double>(v), theta);
  const long double want = 1 - std::pow(1 + t, -(1 + 1 / static_cast<long double>(theta)));
  EXPECT_NEAR(hc.q / static_cast<double>(want), 1.0, 1e-8);
  EXPECT_NEAR(clayton.HInv(hc, TailProb::Of(v), CondOn::kSecond).p, u, 1e-12);

  // Rotations move the precision to the other side.
  const PairCopula rotated = PairCopula::Clayton(theta, 90);
  const TailProb hr = rotated.HFunc(TailProb::Of(1 - u), TailProb::Of(v), CondOn::kSecond);
  EXPECT_NEAR(hr.p / static_cast<double>(want), 1.0, 1e-8);
}

TEST(PairCopulaTest, BoundaryInputsAreClamped) {
  for (const PairCopula& pc : ParametricZoo()) {
    for (double u : {0.0, 1.0, -1.0, 2.0}) {
      for (double v : {0.0, 0.5, 1.0}) {
        EXPECT_TRUE(std::isfinite(pc.LogDensity(u, v))) << pc.Describe();
        const double h = pc.HFunc(u, v, CondOn::kSecond);
        EXPECT_GE(h, 0.0);
        EXPECT_LE(h, 1.0);
      }
    }
  }
}

// Property: exchangeable families are symmetric; h is a cdf in its free
// argument; HInv inverts HFunc; the rotated h-functions are derivatives of
// the rotated cdfs.
TEST(PairCopulaProperty, SymmetryMonotonicityInverse) {
  oracle::Gen gen(5);
  for (const PairCopula& pc : ParametricZoo()) {
    const bool exchangeable = pc.family() != CopulaFamily::kClayton || pc.rotation() % 180 == 0;
    for (int trial = 0; trial < 200; ++trial) {
      const double u = gen.Unit(1e-4), v = gen.Unit(1e-4);
      if (exchangeable) {
        ASSERT_NEAR(pc.Density(u, v), pc.Density(v, u), 1e-10 * pc.Density(u, v));
      }
      for (CondOn on : {CondOn::kFirst, CondOn::kSecond}) {
        const double h = pc.HFunc(u, v, on);
        ASSERT_NEAR(pc.HInv(h, v, on), u, 1e-9) << pc.Describe();
        ASSERT_LE(pc.HFunc(u * 0.9, v, on), h + 1e-15);
      }
    }
    for (double v : {0.01, 0.5, 0.99}) {
      EXPECT_LT(pc.HFunc(1e-12, v, CondOn::kSecond), 1e-3) << pc.Describe();
      EXPECT_GT(pc.HFunc(1 - 1e-12, v, CondOn::kSecond), 1 - 1e-3) << pc.Describe();
    }
  }
}

TEST(PairCopulaTest, RotatedClaytonMatchesRotatedCdf) {
  for (int rot : {0, 90, 180, 270}) {
    const PairCopula pc = PairCopula::Clayton(1.5, rot);
    auto cdf = [rot](double u, double v) { return oracle::ClaytonCdf(u, v, 1.5, rot); };
    for (double u : {0.2, 0.5, 0.8}) {
      for (double v : {0.3, 0.7}) {
        EXPECT_NEAR(pc.Density(u, v), oracle::MixedDerivative(cdf, u, v, 0.02), 1e-7) << rot;
        const double h2 = oracle::Derivative([&](double t) { return cdf(u, t); }, v, 0.02);
        const double h1 = oracle::Derivative([&](double t) { return cdf(t, v); }, u, 0.02);
        EXPECT_NEAR(pc.H2(u, v), h2, 1e-8) << rot;
        EXPECT_NEAR(pc.H1(u, v), h1, 1e-8) << rot;
      }
    }
  }
}

TEST(PairCopulaTest, SwappedExchangesArguments) {
  for (const PairCopula& pc : ParametricZoo()) {
    const PairCopula sw = pc.Swapped();
    EXPECT_NEAR(sw.Density(0.2, 0.7), pc.Density(0.7, 0.2), 1e-12);
    EXPECT_NEAR(sw.H2(0.2, 0.7), pc.H1(0.7, 0.2), 1e-12);
  }
}

// Gauss-Legendre with 64 nodes per axis on (0, 1)^2.
TEST(PairCopulaProperty, DensityIntegratesToOne) {
  using boost::math::quadrature::gauss;
  for (const PairCopula& pc : {PairCopula::Independence(), PairCopula::Gaussian(0.3),
                               PairCopula::Gaussian(-0.5), PairCopula::Clayton(0.5, 0),
                               PairCopula::Clayton(0.5, 90), PairCopula::Clayton(1.0, 180),
                               PairCopula::Clayton(1.0, 270)}) {
    const double total = gauss<double, 64>::integrate(
        [&](double u) {
          return gauss<double, 64>::integrate([&](double v) { return pc.Density(u, v); }, 0.0, 1.0);
        },
        0.0, 1.0);
    EXPECT_NEAR(total, 1.0, 1e-3) << pc.Describe();
  }
}

TEST(PairCopulaTest, SimulatedClaytonTau) {
  Rng rng(3);
  std::vector<double> u, v;
  Split(PairCopula::Clayton(2.0).Simulate(10000, rng), u, v);
  EXPECT_NEAR(KendallTau(u, v), 0.5, 0.02);
  EXPECT_NEAR(PairCopula::Clayton(2.0).KendallTau(), 0.5, 1e-15);
  EXPECT_NEAR(PairCopula::Gaussian(0.5).KendallTau(), 2 / M_PI * std::asin(0.5), 1e-15);
}

TEST(KendallTest, MatchesBruteForceWithTies) {
  oracle::Gen gen(8);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = gen.Int(2, 200);
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = trial % 2 ? gen.Int(0, 5) : gen.Normal();
      y[i] = trial % 3 ? x[i] + gen.Normal() : gen.Int(0, 3);
    }
    EXPECT_NEAR(KendallTau(x, y), oracle::KendallTauBrute(x, y), 1e-12);
  }
  const std::vector<double> c = {1, 1, 1}, d = {1, 2, 3};
  EXPECT_EQ(KendallTau(c, d), 0.0);
}

TEST(FitParametricTest, TauInversionForClayton) {
  Rng rng(21);
  std::vector<double> u, v;
  Split(PairCopula::Clayton(2.0).Simulate(3000, rng), u, v);
  ParametricOptions opt;
  opt.allow_gaussian = false;
  FitInfo info;
  const PairCopula pc = FitParametric(u, v, opt, &info);
  const double tau = oracle::KendallTauBrute(u, v);
  ASSERT_EQ(pc.family(), CopulaFamily::kClayton);
  EXPECT_EQ(pc.rotation(), 0);
  EXPECT_NEAR(pc.parameter(), 2 * tau / (1 - tau), 1e-12);
  EXPECT_NEAR(info.tau, tau, 1e-12);
}

TEST(FitParametricTest, IndependenceBelowThreshold) {
  std::vector<double> u(20), v(20);
  for (int i = 0; i < 20; ++i) {
    u[i] = (i + 0.5) / 20;
    v[i] = (i % 2 ? i : 19 - i + 0.5) / 20.0 + 0.01;
  }
  // Build an exactly zero-tau pairing by symmetric reversal.
  for (int i = 0; i < 20; ++i) v[i] = u[(i % 2) ? i : 19 - i];
  ASSERT_LT(std::abs(oracle::KendallTauBrute(u, v)), 0.02);
  EXPECT_EQ(FitParametric(u, v).family(), CopulaFamily::kIndependence);
}

TEST(FitParametricTest, RecoversGaussian) {
  Rng rng(4);
  std::vector<double> u, v;
  Split(PairCopula::Gaussian(0.6).Simulate(2000, rng), u, v);
  const PairCopula pc = FitParametric(u, v);
  ASSERT_EQ(pc.family(), CopulaFamily::kGaussian);
  EXPECT_NEAR(pc.parameter(), 0.6, 0.05);
}

TEST(FitParametricTest, PicksTailOrientationAndQuadrant) {
  Rng rng(9);
  std::vector<double> u, v;
  for (int rot : {0, 90, 180, 270}) {
    Split(PairCopula::Clayton(3.0, rot).Simulate(2000, rng), u, v);
    const PairCopula pc = FitParametric(u, v);
    ASSERT_EQ(pc.family(), CopulaFamily::kClayton) << rot;
    EXPECT_EQ(pc.rotation(), rot);
  }
}

TEST(FitParametricTest, DegenerateAndSmallInputs) {
  std::vector<double> u(12, 0.5), v(12);
  for (int i = 0; i < 12; ++i) v[i] = (i + 1) / 13.0;
  FitInfo info;
  EXPECT_EQ(FitParametric(u, v, {}, &info).family(), CopulaFamily::kIndependence);
  EXPECT_TRUE(info.degenerate);
  std::vector<double> few(5, 0.5);
  EXPECT_THROW(FitParametric(few, few), Error);
}

TEST(FitParametricTest, MleRefinementImprovesLikelihood) {
  Rng rng(13);
  std::vector<double> u, v;
  Split(PairCopula::Clayton(1.2, 180).Simulate(1500, rng), u, v);
  ParametricOptions plain, refined;
  refined.refine_mle = true;
  FitInfo a, b;
  FitParametric(u, v, plain, &a);
  FitParametric(u, v, refined, &b);
  EXPECT_GE(b.log_likelihood, a.log_likelihood - 1e-9);
}

TEST(GridTest, IndependenceDataGivesFlatGrid) {
  Rng rng(17);
  std::vector<double> u(5000), v(5000);
  for (int i = 0; i < 5000; ++i) {
    u[i] = rng.Uniform();
    v[i] = rng.Uniform();
  }
  const PairCopula pc = FitNonparametric(u, v);
  double worst = 0;
  for (int i = 0; i <= 16; ++i) {
    for (int j = 0; j <= 16; ++j) {
      const double a = 0.1 + 0.05 * i, b = 0.1 + 0.05 * j;
      worst = std::max(worst, std::abs(pc.Density(a, b) - 1.0));
    }
  }
  EXPECT_LT(worst, 0.25);
  EXPECT_NEAR(pc.grid()->TrapezoidIntegral(), 1.0, 1e-2);
}

TEST(GridTest, SurvivalClaytonDensityRecovered) {
  Rng rng(19);
  const PairCopula truth = PairCopula::Clayton(2.0, 180);
  std::vector<double> u, v;
  Split(truth.Simulate(5000, rng), u, v);
  const PairCopula pc = FitNonparametric(u, v);
  // Mean relative error over the interior mesh.
  double sum = 0, count = 0;
  for (int i = 0; i <= 16; ++i) {
    for (int j = 0; j <= 16; ++j) {
      const double a = 0.1 + 0.05 * i, b = 0.1 + 0.05 * j;
      sum += std::abs(pc.Density(a, b) - truth.Density(a, b)) / truth.Density(a, b);
      ++count;
    }
  }
  EXPECT_LT(sum / count, 0.2);
}

TEST(GridTest, SmallSampleRejected) {
  std::vector<double> u(29, 0.5);
  EXPECT_THROW(FitNonparametric(u, u), Error);
}

TEST(GridProperty, HFunctionsAreCdfsAndInvert) {
  Rng rng(23);
  std::vector<double> u, v;
  Split(PairCopula::Gaussian(0.5).Simulate(800, rng), u, v);
  const PairCopula pc = FitNonparametric(u, v, 32);
  oracle::Gen gen(3);
  for (int trial = 0; trial < 400; ++trial) {
    const double a = gen.Unit(1e-3), b = gen.Unit(1e-3);
    for (CondOn on : {CondOn::kFirst, CondOn::kSecond}) {
      const double h = pc.HFunc(a, b, on);
      ASSERT_GE(h, 0.0);
      ASSERT_LE(h, 1.0);
      ASSERT_NEAR(pc.HInv(h, b, on), a, 1e-6);
      ASSERT_LE(pc.HFunc(a * 0.95, b, on), h + 1e-15);
    }
  }
  // h is the integral of the density along the free axis, normalized per
  // slice because the tabulated margins are only approximately uniform.
  using boost::math::quadrature::gauss_kronrod;
  for (double b : {0.1, 0.5, 0.8}) {
    auto slice = [&](double t) { return pc.Density(t, b); };
    const double total = gauss_kronrod<double, 31>::integrate(slice, 0.0, 1.0, 12, 1e-12);
    for (double a : {0.2, 0.6, 0.97}) {
      const double part = gauss_kronrod<double, 31>::integrate(slice, 0.0, a, 12, 1e-12);
      EXPECT_NEAR(pc.HFunc(a, b, CondOn::kSecond), part / total, 1e-6);
    }
  }
  EXPECT_NEAR(pc.grid()->TrapezoidIntegral(), 1.0, 1e-2);
}

}  // namespace
}  // namespace vineshap
