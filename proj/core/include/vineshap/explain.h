#ifndef VINESHAP_EXPLAIN_H_
#define VINESHAP_EXPLAIN_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vineshap/coalition.h"
#include "vineshap/table.h"

namespace vineshap {

// Prediction function g. Batch evaluation maps each row of a table to one
// prediction and must be safe to call from several threads.
class Predictor {
 public:
  using BatchFn = std::function<std::vector<double>(const Table&)>;
  using PointFn = std::function<double(std::span<const double>)>;

  Predictor() = default;
  explicit Predictor(BatchFn fn) : batch_(std::move(fn)) {}
  static Predictor Pointwise(PointFn fn);

  double operator()(std::span<const double> x) const;
  std::vector<double> Batch(const Table& rows) const;
  explicit operator bool() const { return static_cast<bool>(batch_); }

 private:
  BatchFn batch_;
};

// Outcome of one contribution-function evaluation.
struct CoalitionValue {
  double value = 0.0;
  double std_error = 0.0;
  // 1 / sum(pi^2) for weighted estimators, the sample size otherwise.
  double effective_sample_size = 0.0;
  bool ridge = false;            // covariance needed regularization
  bool weight_fallback = false;  // all ratio weights underflowed
};

// Strategy producing v(S) at a query point.
class ContributionEstimator {
 public:
  virtual ~ContributionEstimator() = default;

  virtual std::string method() const = 0;
  virtual int dim() const = 0;
  virtual const Predictor& predictor() const = 0;
  // v(empty set).
  virtual double Baseline() const = 0;
  // v(S) for 0 < |S| < dim. `seed` identifies the explanation; estimators
  // derive all of their random streams from it and the coalition, so results
  // do not depend on evaluation order.
  virtual CoalitionValue Value(const Coalition& s, std::span<const double> x,
                               std::uint64_t seed) const = 0;
};

struct Explanation {
  double phi0 = 0.0;
  std::vector<double> phi;
  // v(S) and diagnostics indexed by coalition mask.
  std::vector<double> values;
  std::vector<CoalitionValue> diagnostics;
  std::string method;
  std::uint64_t seed = 0;
};

inline constexpr int kMaxExplainFeatures = 20;

struct ShapleyOptions {
  std::uint64_t seed = 1;
  int threads = 1;
};

// Exact Shapley values over all 2^dim coalitions. v(empty) is the estimator's
// baseline and v(all) = g(x).
Explanation Shapley(const ContributionEstimator& estimator, std::span<const double> x,
                    const ShapleyOptions& options = {});

// |S|! (dim - |S| - 1)! / dim!
double ShapleyWeight(int dim, int size);

// Shapley values from a complete table of coalition values indexed by mask.
std::vector<double> ShapleyFromValues(int dim, std::span<const double> values);

// Rows of g's input: x with the S-bar columns replaced by `free` (one row per
// sample, S-bar columns in increasing feature index).
Table CombineRows(const Coalition& s, std::span<const double> x, const Table& free);

}  // namespace vineshap

#endif  // VINESHAP_EXPLAIN_H_
