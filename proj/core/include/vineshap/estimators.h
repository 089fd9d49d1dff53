#ifndef VINESHAP_ESTIMATORS_H_
#define VINESHAP_ESTIMATORS_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vineshap/dvine.h"
#include "vineshap/explain.h"
#include "vineshap/structure.h"
#include "vineshap/table.h"

namespace vineshap {

inline constexpr int kDefaultSamples = 1000;

// Training rows shared by the estimators: data, the mean prediction v(empty)
// and the pseudo-observations under the empirical margins.
class TrainingSet {
 public:
  TrainingSet(Table data, const Predictor& g);

  const Table& data() const { return data_; }
  const Table& pseudo() const { return pseudo_; }
  const SharedMarginals& marginals() const { return marginals_; }
  double mean_prediction() const { return mean_prediction_; }
  int rows() const { return static_cast<int>(data_.rows()); }
  int dim() const { return static_cast<int>(data_.cols()); }

  // K row indices drawn without replacement when K <= N, with replacement
  // otherwise. Deterministic in the seed.
  std::vector<int> Subsample(int k, std::uint64_t seed) const;

 private:
  Table data_;
  Table pseudo_;
  SharedMarginals marginals_;
  double mean_prediction_ = 0.0;
};

// Shared plumbing for estimators over a training set.
class TrainedEstimator : public ContributionEstimator {
 public:
  TrainedEstimator(std::shared_ptr<const TrainingSet> train, Predictor g, int k);

  int dim() const override { return train_->dim(); }
  const Predictor& predictor() const override { return g_; }
  double Baseline() const override { return train_->mean_prediction(); }
  int samples() const { return k_; }
  const TrainingSet& train() const { return *train_; }

 protected:
  // Mean and standard error of g over x with the S-bar columns from `free`.
  CoalitionValue Average(const Coalition& s, std::span<const double> x, const Table& free) const;
  void CheckCoalition(const Coalition& s, std::span<const double> x) const;

  std::shared_ptr<const TrainingSet> train_;
  Predictor g_;
  int k_;
};

// Features treated as independent: S-bar values come from training rows.
class IndependenceEstimator : public TrainedEstimator {
 public:
  using TrainedEstimator::TrainedEstimator;
  std::string method() const override { return "independence"; }
  CoalitionValue Value(const Coalition& s, std::span<const double> x,
                       std::uint64_t seed) const override;
};

// Conditional multivariate normal with mean mu_{S-bar} + Sigma_{S-bar,S}
// Sigma_{S,S}^-1 (x_S - mu_S).
struct ConditionalNormal {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cholesky;  // lower factor of the conditional covariance
  bool ridge = false;

  static ConditionalNormal Condition(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                                     const Coalition& s, std::span<const double> x);
  // K draws, one per row.
  Table Sample(int k, Rng& rng) const;
};

class GaussianEstimator : public TrainedEstimator {
 public:
  // Estimates mu and Sigma from the training data.
  GaussianEstimator(std::shared_ptr<const TrainingSet> train, Predictor g, int k);
  GaussianEstimator(std::shared_ptr<const TrainingSet> train, Predictor g, int k,
                    Eigen::VectorXd mu, Eigen::MatrixXd sigma);

  std::string method() const override { return "gaussian"; }
  CoalitionValue Value(const Coalition& s, std::span<const double> x,
                       std::uint64_t seed) const override;
  const Eigen::VectorXd& mu() const { return mu_; }
  const Eigen::MatrixXd& sigma() const { return sigma_; }

 private:
  Eigen::VectorXd mu_;
  Eigen::MatrixXd sigma_;
};

// Empirical margins joined by a Gaussian copula whose correlation matrix is
// the correlation of the normal scores.
class GaussianCopulaEstimator : public TrainedEstimator {
 public:
  GaussianCopulaEstimator(std::shared_ptr<const TrainingSet> train, Predictor g, int k);
  GaussianCopulaEstimator(std::shared_ptr<const TrainingSet> train, Predictor g, int k,
                          Eigen::MatrixXd correlation);

  std::string method() const override { return "gaussian-copula"; }
  CoalitionValue Value(const Coalition& s, std::span<const double> x,
                       std::uint64_t seed) const override;
  const Eigen::MatrixXd& correlation() const { return correlation_; }

 private:
  Eigen::MatrixXd correlation_;
};

// Normal-score correlation matrix of a table under its empirical margins.
Eigen::MatrixXd NormalScoreCorrelation(const Table& pseudo);

// Vines plus the cover plan that tells which vine serves which coalition.
struct VineSet {
  CoverPlan plan;
  std::vector<DVine> models;

  // Model serving the plan entry for S; throws kPlanCoverage if absent.
  const DVine& ModelFor(const Coalition& s) const;
};

// Conditional simulation from D-vines via the Rosenblatt transform.
class VineCondSimEstimator : public TrainedEstimator {
 public:
  VineCondSimEstimator(std::shared_ptr<const TrainingSet> train, std::shared_ptr<const VineSet> vines,
                       Predictor g, int k, std::string tag = "vine-condsim");

  std::string method() const override { return tag_; }
  CoalitionValue Value(const Coalition& s, std::span<const double> x,
                       std::uint64_t seed) const override;

 private:
  std::shared_ptr<const VineSet> vines_;
  std::string tag_;
};

// Training rows reweighted by c(u_{S-bar}, u*_S) / c(u_{S-bar}).
class VineRatioEstimator : public TrainedEstimator {
 public:
  VineRatioEstimator(std::shared_ptr<const TrainingSet> train, std::shared_ptr<const VineSet> vines,
                     Predictor g, int k, std::string tag = "vine-ratio");

  std::string method() const override { return tag_; }
  CoalitionValue Value(const Coalition& s, std::span<const double> x,
                       std::uint64_t seed) const override;

  struct Weights {
    std::vector<int> rows;      // training row per weight
    std::vector<double> probs;  // normalized, sums to 1
    bool fallback = false;
  };
  // Implicit sampling probabilities of the subsampled training rows.
  Weights ImplicitWeights(const Coalition& s, std::span<const double> x, std::uint64_t seed) const;

 private:
  std::shared_ptr<const VineSet> vines_;
  std::string tag_;
};

// For every sample row, the mean Mahalanobis distance to its `neighbors`
// nearest training rows, measured on the given feature columns with the
// training covariance of those columns.
std::vector<double> MahalanobisDiagnostic(const Table& samples, const Table& train,
                                          const std::vector<int>& columns, int neighbors);

}  // namespace vineshap

#endif  // VINESHAP_ESTIMATORS_H_
