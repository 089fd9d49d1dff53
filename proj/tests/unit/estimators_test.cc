#include "vineshap/estimators.h"

#include <gtest/gtest.h>

#include "../oracles.h"
#include "vineshap/bundle.h"
#include "vineshap/error.h"
#include "vineshap/rng.h"
#include "vineshap/simstudy.h"

namespace vineshap {
namespace {

Table GaussianData(int n, const Eigen::MatrixXd& cov, const Eigen::VectorXd& mu, std::uint64_t seed) {
  oracle::Gen gen(seed);
  const Eigen::MatrixXd l = cov.llt().matrixL();
  Table out(n, cov.rows());
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd z(cov.rows());
    for (int j = 0; j < z.size(); ++j) z(j) = gen.Normal();
    out.row(i) = (mu + l * z).transpose();
  }
  return out;
}

Predictor Constant(double c) {
  return Predictor::Pointwise([c](std::span<const double>) { return c; });
}

Predictor Coordinate(int j) {
  return Predictor::Pointwise([j](std::span<const double> x) { return x[j]; });
}

Predictor Linear(std::vector<double> beta) {
  return Predictor::Pointwise([beta](std::span<const double> x) {
    double s = 0;
    for (std::size_t j = 0; j < beta.size(); ++j) s += beta[j] * x[j];
    return s;
  });
}

std::shared_ptr<const VineSet> Vines(const TrainingSet& train, ShapMethod method, const FitMode& mode) {
  return FitVineSet(train.pseudo(), train.marginals(), method, mode, 20, 3);
}

std::vector<std::unique_ptr<ContributionEstimator>> AllEstimators(
    const std::shared_ptr<const TrainingSet>& train, const Predictor& g, int k) {
  std::vector<std::unique_ptr<ContributionEstimator>> out;
  out.push_back(std::make_unique<IndependenceEstimator>(train, g, k));
  out.push_back(std::make_unique<GaussianEstimator>(train, g, k));
  out.push_back(std::make_unique<GaussianCopulaEstimator>(train, g, k));
  out.push_back(std::make_unique<VineCondSimEstimator>(
      train, Vines(*train, ShapMethod::kCondSim, ParametricMode{}), g, k));
  out.push_back(std::make_unique<VineRatioEstimator>(
      train, Vines(*train, ShapMethod::kRatio, ParametricMode{}), g, k));
  out.push_back(std::make_unique<VineCondSimEstimator>(
      train, Vines(*train, ShapMethod::kCondSim, NonparametricMode{16}), g, k));
  return out;
}

TEST(EstimatorsTest, ConstantPredictorGivesConstant) {
  const BurrParams params = BurrParams::Standard(1.0, 3);
  Rng rng(1);
  const Predictor g = Constant(4.25);
  auto train = std::make_shared<const TrainingSet>(BurrSample(params, 300, rng), g);
  const std::vector<double> x = {0.5, 0.4, 0.6};
  for (const auto& est : AllEstimators(train, g, 200)) {
    EXPECT_EQ(est->Baseline(), 4.25);
    for (std::uint32_t m = 1; m < 7; ++m) {
      EXPECT_EQ(est->Value(Coalition(m, 3), x, 9).value, 4.25) << est->method();
    }
  }
}

TEST(EstimatorsTest, PinnedFeatureIsExact) {
  const BurrParams params = BurrParams::Standard(1.0, 3);
  Rng rng(2);
  const Predictor g = Coordinate(0);
  auto train = std::make_shared<const TrainingSet>(BurrSample(params, 300, rng), g);
  const std::vector<double> x = {0.77, 0.4, 0.6};
  for (const auto& est : AllEstimators(train, g, 100)) {
    EXPECT_EQ(est->Value(Coalition::Of({0}, 3), x, 1).value, 0.77) << est->method();
    EXPECT_EQ(est->Value(Coalition::Of({0, 2}, 3), x, 1).value, 0.77) << est->method();
  }
}

TEST(IndependenceEstimatorTest, ExhaustiveAverage) {
  Table data(3, 2);
  data << 5, 1, 6, 2, 7, 3;
  const Predictor g = Coordinate(1);
  auto train = std::make_shared<const TrainingSet>(data, g);
  const IndependenceEstimator est(train, g, 3);
  EXPECT_DOUBLE_EQ(est.Value(Coalition::Of({0}, 2), std::vector<double>{9, 9}, 4).value, 2.0);
  EXPECT_DOUBLE_EQ(est.Baseline(), 2.0);
}

TEST(TrainingSetTest, SubsampleWithAndWithoutReplacement) {
  Table data(10, 1);
  for (int i = 0; i < 10; ++i) data(i, 0) = i;
  const TrainingSet train(data, Constant(0));
  std::vector<int> rows = train.Subsample(10, 5);
  std::sort(rows.begin(), rows.end());
  for (int i = 0; i < 10; ++i) EXPECT_EQ(rows[i], i);
  EXPECT_EQ(train.Subsample(4, 5), train.Subsample(4, 5));
  const std::vector<int> many = train.Subsample(25, 5);
  EXPECT_EQ(many.size(), 25u);
  for (int r : many) EXPECT_TRUE(r >= 0 && r < 10);
}

TEST(ConditionalNormalTest, DiagonalCovarianceIgnoresConditioning) {
  Eigen::VectorXd mu(3);
  mu << 1, 2, 3;
  const Eigen::MatrixXd sigma = Eigen::Vector3d(4, 9, 16).asDiagonal();
  const ConditionalNormal c =
      ConditionalNormal::Condition(mu, sigma, Coalition::Of({1}, 3), std::vector<double>{0, 50, 0});
  EXPECT_NEAR(c.mean(0), 1, 1e-14);
  EXPECT_NEAR(c.mean(1), 3, 1e-14);
  EXPECT_NEAR(c.cholesky(0, 0), 2, 1e-14);
  EXPECT_NEAR(c.cholesky(1, 1), 4, 1e-14);
  EXPECT_NEAR(c.cholesky(1, 0), 0, 1e-14);
  EXPECT_FALSE(c.ridge);
}

TEST(GaussianEstimatorTest, ConditionalMeanOfSecondFeature) {
  const double rho = 0.7, s1 = 2.0, s2 = 0.5, m1 = 1.0, m2 = -1.0;
  Eigen::MatrixXd cov(2, 2);
  cov << s1 * s1, rho * s1 * s2, rho * s1 * s2, s2 * s2;
  Eigen::VectorXd mu(2);
  mu << m1, m2;
  const Predictor g = Coordinate(1);
  auto train = std::make_shared<const TrainingSet>(GaussianData(100, cov, mu, 3), g);
  const GaussianEstimator est(train, g, 10000, mu, cov);
  for (double x1 : {-2.0, 1.0, 4.0}) {
    const CoalitionValue v = est.Value(Coalition::Of({0}, 2), std::vector<double>{x1, 0}, 5);
    EXPECT_NEAR(v.value, m2 + rho * s2 / s1 * (x1 - m1), 3 * v.std_error);
    EXPECT_NEAR(v.std_error, s2 * std::sqrt(1 - rho * rho) / 100, 0.1 * v.std_error);
  }
}

TEST(GaussianEstimatorTest, LinearPredictorUsesConditionalMean) {
  Eigen::MatrixXd cov(3, 3);
  cov << 1, 0.5, 0.2, 0.5, 2, 0.3, 0.2, 0.3, 1.5;
  const Eigen::VectorXd mu = Eigen::Vector3d(0.5, -0.5, 2);
  const std::vector<double> beta = {1.0, -2.0, 0.5};
  const Predictor g = Linear(beta);
  auto train = std::make_shared<const TrainingSet>(GaussianData(100, cov, mu, 4), g);
  const GaussianEstimator est(train, g, 10000, mu, cov);
  const std::vector<double> x = {1.0, 0.2, 1.0};
  for (int j = 0; j < 3; ++j) {
    const Coalition s = Coalition::Of({j}, 3).complement();
    const ConditionalNormal c = ConditionalNormal::Condition(mu, cov, s, x);
    std::vector<double> filled = x;
    filled[j] = c.mean(0);
    const CoalitionValue v = est.Value(s, x, 6);
    EXPECT_NEAR(v.value, g(filled), 3 * v.std_error);
  }
}

TEST(GaussianCopulaEstimatorTest, IdentityCorrelationIsIndependentMargins) {
  Eigen::MatrixXd cov(2, 2);
  cov << 1, 0.9, 0.9, 1;
  const Predictor g = Coordinate(1);
  const Table data = GaussianData(2000, cov, Eigen::Vector2d(0, 3), 5);
  auto train = std::make_shared<const TrainingSet>(data, g);
  const GaussianCopulaEstimator est(train, g, 10000, Eigen::MatrixXd::Identity(2, 2));
  const CoalitionValue v = est.Value(Coalition::Of({0}, 2), std::vector<double>{2.5, 0}, 7);
  EXPECT_NEAR(v.value, data.col(1).mean(), 3 * v.std_error + 1e-3);
}

TEST(GaussianCopulaEstimatorTest, AgreesWithGaussianOnGaussianData) {
  Eigen::MatrixXd cov(3, 3);
  cov << 1, 0.6, 0.3, 0.6, 1, 0.5, 0.3, 0.5, 1;
  const Predictor g = Linear({0.3, 1.0, -0.7});
  auto train = std::make_shared<const TrainingSet>(
      GaussianData(5000, cov, Eigen::Vector3d::Zero(), 6), g);
  const GaussianEstimator gauss(train, g, 10000);
  const GaussianCopulaEstimator copula(train, g, 10000);
  const std::vector<double> x = {0.8, -0.3, 1.1};
  for (std::uint32_t m = 1; m < 7; ++m) {
    const CoalitionValue a = gauss.Value(Coalition(m, 3), x, 8);
    const CoalitionValue b = copula.Value(Coalition(m, 3), x, 8);
    EXPECT_NEAR(a.value, b.value, 3 * std::hypot(a.std_error, b.std_error) + 0.02) << m;
  }
}

TEST(GaussianCopulaEstimatorTest, SingularCorrelationTakesRidgePath) {
  const Table base = GaussianData(500, Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d::Zero(), 7);
  Table data(500, 3);
  data << base.col(0), base.col(1), base.col(0);
  const Predictor g = Linear({1, 1, 1});
  auto train = std::make_shared<const TrainingSet>(data, g);
  const GaussianCopulaEstimator est(train, g, 500);
  const std::vector<double> x = {0.3, 0.1, 0.3};
  const CoalitionValue v = est.Value(Coalition::Of({0, 2}, 3), x, 1);
  EXPECT_TRUE(v.ridge);
  EXPECT_TRUE(std::isfinite(v.value));
}

// The independence estimator keeps the free features of a training row
// together, so it only matches conditional simulation from an independence
// vine when the training features are independent. Columns are shuffled
// separately to make them so.
TEST(VineEstimatorsTest, IndependenceVinesReduceToIndependence) {
  const BurrParams params = BurrParams::Standard(0.5, 3);
  Rng rng(8);
  const Predictor g = AnalyticMeanPredictor(params);
  Table data = BurrSample(params, 2000, rng);
  oracle::Gen gen(8);
  for (int j = 0; j < 3; ++j) {
    const std::vector<int> perm = gen.Permutation(2000);
    const Eigen::VectorXd col = data.col(j);
    for (int i = 0; i < 2000; ++i) data(i, j) = col(perm[i]);
  }
  auto train = std::make_shared<const TrainingSet>(data, g);
  const FitMode indep = FixedMode{{PairCopula::Independence()}};
  const IndependenceEstimator plain(train, g, 1000);
  const VineRatioEstimator ratio(train, Vines(*train, ShapMethod::kRatio, indep), g, 1000);
  const VineCondSimEstimator condsim(train, Vines(*train, ShapMethod::kCondSim, indep), g, 10000);
  const std::vector<double> x = {0.6, 0.5, 0.4};
  for (std::uint32_t m = 1; m < 7; ++m) {
    const Coalition s(m, 3);
    const CoalitionValue a = plain.Value(s, x, 3);
    const CoalitionValue b = ratio.Value(s, x, 3);
    EXPECT_DOUBLE_EQ(a.value, b.value) << s.ToString();
    EXPECT_NEAR(b.effective_sample_size, 1000, 1e-6);
    const CoalitionValue c = condsim.Value(s, x, 3);
    EXPECT_NEAR(a.value, c.value, 3 * std::hypot(a.std_error, c.std_error)) << s.ToString();
    const auto w = ratio.ImplicitWeights(s, x, 3);
    for (double p : w.probs) EXPECT_NEAR(p, 1.0 / 1000, 1e-15);
  }
}

TEST(VineRatioProperty, WeightsNormalizedAndDegenerateInTails) {
  const BurrParams params = BurrParams::Standard(0.5, 3);
  Rng rng(9);
  const Predictor g = AnalyticMeanPredictor(params);
  auto train = std::make_shared<const TrainingSet>(BurrSample(params, 2000, rng), g);
  const VineRatioEstimator ratio(train, Vines(*train, ShapMethod::kRatio, ParametricMode{}), g, 1000);
  oracle::Gen gen(9);
  for (int trial = 0; trial < 30; ++trial) {
    const std::vector<double> x = {gen.Uniform(0.05, 3), gen.Uniform(0.05, 3), gen.Uniform(0.05, 3)};
    const Coalition s(static_cast<std::uint32_t>(gen.Int(1, 6)), 3);
    const auto w = ratio.ImplicitWeights(s, x, trial);
    double total = 0;
    for (double p : w.probs) {
      ASSERT_GE(p, 0.0);
      total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
  // Conditioning on an extreme upper-tail value of one feature.
  const std::vector<double> tail = {50.0, 0.5, 0.5};
  const CoalitionValue v = ratio.Value(Coalition::Of({0}, 3), tail, 1);
  EXPECT_LT(v.effective_sample_size, 200);
}

TEST(VineEstimatorsTest, TruthVineMatchesBurrOracle) {
  const BurrParams params = BurrParams::Standard(1.0, 3);
  Rng rng(10);
  const Predictor g = AnalyticMeanPredictor(params);
  auto train = std::make_shared<const TrainingSet>(BurrSample(params, 3000, rng), g);
  const FitMode truth = FixedMode{BurrTruthCopulas(1.0, 3)};
  const VineCondSimEstimator condsim(train, Vines(*train, ShapMethod::kCondSim, truth), g, 3000);
  const VineRatioEstimator ratio(train, Vines(*train, ShapMethod::kRatio, truth), g, 3000);
  const TrueBurrEstimator oracle(params, g, 20000, 77);
  const std::vector<double> x = {0.7, 0.45, 0.5};
  for (std::uint32_t m = 1; m < 7; ++m) {
    const Coalition s(m, 3);
    const CoalitionValue o = oracle.Value(s, x, 5);
    for (const TrainedEstimator* est : {static_cast<const TrainedEstimator*>(&condsim),
                                        static_cast<const TrainedEstimator*>(&ratio)}) {
      const CoalitionValue v = est->Value(s, x, 5);
      EXPECT_NEAR(v.value, o.value, 3 * std::hypot(v.std_error, o.std_error))
          << est->method() << " " << s.ToString();
    }
  }
}

TEST(VineSetTest, MissingPlanEntryIsCoverageError) {
  VineSet set;
  set.plan.dim = 3;
  try {
    set.ModelFor(Coalition::Of({0}, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kPlanCoverage);
  }
}

TEST(MahalanobisTest, ZeroForTrainingRows) {
  const Table data = GaussianData(50, Eigen::MatrixXd::Identity(3, 3), Eigen::Vector3d::Zero(), 11);
  const Table samples = data.topRows(10).rightCols(2);
  for (double d : MahalanobisDiagnostic(samples, data, {1, 2}, 1)) EXPECT_NEAR(d, 0.0, 1e-12);
  EXPECT_THROW(MahalanobisDiagnostic(Table(3, 0), data, {}, 1), Error);
}

// Training data whitened so its sample covariance is exactly the identity.
TEST(MahalanobisTest, IdentityCovarianceIsEuclidean) {
  Eigen::MatrixXd cov(2, 2);
  cov << 2, 0.8, 0.8, 1;
  Table raw = GaussianData(200, cov, Eigen::Vector2d::Zero(), 12);
  const Eigen::RowVectorXd mean = raw.colwise().mean();
  Eigen::MatrixXd centered = raw.rowwise() - mean;
  const Eigen::MatrixXd s = centered.transpose() * centered / 199.0;
  const Eigen::MatrixXd l = s.llt().matrixL();
  const Table train = (l.triangularView<Eigen::Lower>().solve(centered.transpose())).transpose();
  const Table samples = GaussianData(20, Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d::Zero(), 13);
  const std::vector<double> got = MahalanobisDiagnostic(samples, train, {0, 1}, 3);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> dist;
    for (int r = 0; r < 200; ++r) dist.push_back((samples.row(i) - train.row(r)).norm());
    std::sort(dist.begin(), dist.end());
    EXPECT_NEAR(got[i], (dist[0] + dist[1] + dist[2]) / 3, 1e-9);
  }
}

TEST(MahalanobisTest, IndependenceSamplesSitFurtherFromData) {
  const BurrParams params = BurrParams::Standard(0.3, 3);
  Rng rng(14);
  const Table data = BurrSample(params, 2000, rng);
  const Predictor g = Constant(0);
  auto train = std::make_shared<const TrainingSet>(data, g);
  const auto vines = Vines(*train, ShapMethod::kCondSim, ParametricMode{});
  const Coalition s = Coalition::Of({0}, 3);
  const std::vector<double> x = {Row(data, 0)[0], 0, 0};
  const Table vine_sample = vines->ModelFor(s).ConditionalSample(s, x, 500, rng);
  Table indep(500, 2);
  for (int i = 0; i < 500; ++i) {
    indep(i, 0) = data(rng.Index(2000), 1);
    indep(i, 1) = data(rng.Index(2000), 2);
  }
  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  const Table free_vine = vine_sample, free_indep = indep;
  Table vine_full(500, 3), indep_full(500, 3);
  vine_full << Eigen::VectorXd::Constant(500, x[0]), free_vine;
  indep_full << Eigen::VectorXd::Constant(500, x[0]), free_indep;
  EXPECT_GT(median(MahalanobisDiagnostic(indep_full, data, {0, 1, 2}, 10)),
            median(MahalanobisDiagnostic(vine_full, data, {0, 1, 2}, 10)));
}

}  // namespace
}  // namespace vineshap
