#ifndef VINESHAP_SIMSTUDY_H_
#define VINESHAP_SIMSTUDY_H_

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vineshap/bicop.h"
#include "vineshap/estimators.h"
#include "vineshap/explain.h"
#include "vineshap/table.h"

namespace vineshap {

class Rng;

// Multivariate Burr distribution with survival function
// (1 + sum_m r_m x_m^b_m)^(-p) on x > 0.
struct BurrParams {
  double p = 1.0;
  std::vector<double> b;
  std::vector<double> r;

  int dim() const { return static_cast<int>(b.size()); }
  void Validate() const;

  // The b and r vectors of the ten-dimensional study truncated to `dim`
  // entries (dim <= 10).
  static BurrParams Standard(double p, int dim);
};

double BurrLogDensity(const BurrParams& params, std::span<const double> x);
// Zero outside the support.
double BurrDensity(const BurrParams& params, std::span<const double> x);
// F_m(x) = 1 - (1 + r_m x^b_m)^(-p).
double BurrMarginalCdf(const BurrParams& params, int m, double x);
// Gamma-mixed Weibull construction.
Table BurrSample(const BurrParams& params, int n, Rng& rng);

// Parameters of x_{S-bar} | x_S = x_star; x_star has full length and only its
// S entries are read.
BurrParams BurrConditionalParams(const BurrParams& params, const Coalition& s,
                                 std::span<const double> x_star);
// K x |S-bar| draws, columns in increasing feature index.
Table BurrConditionalSample(const BurrParams& params, const Coalition& s,
                            std::span<const double> x_star, int k, Rng& rng);

// Pair copulas of the Burr distribution as a D-vine in any order: survival
// Clayton with theta = 1 / (p + t) in tree t.
std::vector<PairCopula> BurrTruthCopulas(double p, int dim);

// Response model: sums of u_a u_b exp(1.8 u_c u_d) over consecutive feature
// quadruples, with a trailing term built from the leftover features
// (u_a; u_a exp(1.8 u_b); u_a u_b exp(1.8 u_c)), u_m = F_m(x_m). The noise is
// noise_scale * (sum of each term's leading u) * eps. Defined for dim <= 10.
struct ResponseConfig {
  double noise_scale = 0.5;
};
double ResponseMean(const BurrParams& params, std::span<const double> x);
double GenerateResponse(const BurrParams& params, std::span<const double> x,
                        const ResponseConfig& noise, Rng& rng);
// Human-readable formula of the response for the given dimension.
std::string ResponseFormula(int dim, double noise_scale);

// The noiseless response mean as a predictor.
Predictor AnalyticMeanPredictor(const BurrParams& params);
// k-nearest-neighbour regression with inverse-distance weights on features
// standardized by the training mean and standard deviation.
Predictor KnnPredictor(const Table& x, std::vector<double> y, int k);

// v(S) from the exact Burr conditionals by Monte Carlo; v(empty) is E[g]
// estimated from an unconditional sample of the same size.
class TrueBurrEstimator : public ContributionEstimator {
 public:
  TrueBurrEstimator(BurrParams params, Predictor g, int k_oracle, std::uint64_t seed);

  std::string method() const override { return "truth"; }
  int dim() const override { return params_.dim(); }
  const Predictor& predictor() const override { return g_; }
  double Baseline() const override { return baseline_; }
  CoalitionValue Value(const Coalition& s, std::span<const double> x,
                       std::uint64_t seed) const override;

 private:
  BurrParams params_;
  Predictor g_;
  int k_;
  double baseline_ = 0.0;
};

Explanation TrueShapley(const BurrParams& params, const Predictor& g, std::span<const double> x,
                        int k_oracle, std::uint64_t seed, int threads = 1);

// (1/T) sum_i (1/M) sum_j |truth - estimate|.
double MeanAbsoluteError(const Table& estimates, const Table& truths);

inline const std::vector<std::string>& KnownStudyMethods() {
  static const std::vector<std::string> kMethods = {
      "independence",
      "gaussian",
      "gaussian-copula",
      "vine-condsim-parametric",
      "vine-condsim-nonparametric",
      "vine-condsim-truth",
      "vine-ratio-parametric",
      "vine-ratio-nonparametric",
      "vine-ratio-truth",
  };
  return kMethods;
}

struct ExperimentConfig {
  double p = 0.5;
  int dim = 4;
  int n_train = 1000;
  int n_test = 20;
  int repetitions = 5;
  int k = 1000;
  int k_oracle = 10000;
  std::vector<std::string> methods = {"independence", "gaussian-copula", "vine-ratio-parametric"};
  std::string predictor = "analytic_mean";  // or "knn"
  int knn_k = 10;
  double noise_scale = 0.5;
  int grid_size = 64;
  int candidates = 100;
  std::uint64_t seed = 1;
  int threads = 1;

  void Validate() const;
  // key=value lines, '#' comments. Unknown keys and bad values throw kUsage
  // naming the key.
  static ExperimentConfig Parse(const std::string& text);
  // Canonical key=value rendering (parsable by Parse).
  std::string ToText() const;
};

struct RepetitionResult {
  std::string method;
  int repetition = 0;
  double mae = 0.0;
  double seconds = 0.0;
};

struct SummaryRow {
  std::string method;
  double mean_mae = 0.0;
  double std_error = 0.0;
  int repetitions = 0;
};

struct ExperimentReport {
  std::vector<RepetitionResult> rows;
  std::vector<SummaryRow> summary;
};

// Fits the named method's estimator on a training set.
std::unique_ptr<ContributionEstimator> MakeStudyEstimator(const std::string& method,
                                                          std::shared_ptr<const TrainingSet> train,
                                                          const Predictor& g,
                                                          const ExperimentConfig& config,
                                                          std::uint64_t seed);

ExperimentReport RunExperiment(const ExperimentConfig& config);

std::vector<SummaryRow> Summarize(const std::vector<RepetitionResult>& rows,
                                  const std::vector<std::string>& methods);

}  // namespace vineshap

#endif  // VINESHAP_SIMSTUDY_H_
