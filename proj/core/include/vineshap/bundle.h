#ifndef VINESHAP_BUNDLE_H_
#define VINESHAP_BUNDLE_H_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vineshap/dvine.h"
#include "vineshap/estimators.h"
#include "vineshap/structure.h"
#include "vineshap/table.h"

namespace vineshap {

// Cover plan for `method` followed by one vine per plan order, all sharing
// the given marginals. Orders are fitted on up to `threads` workers.
std::shared_ptr<VineSet> FitVineSet(const Table& pseudo, SharedMarginals marginals,
                                    ShapMethod method, const FitMode& mode, int candidates,
                                    std::uint64_t seed, int threads = 1);

// Model families a bundle can hold.
inline const std::vector<std::string>& BundleMethods() {
  static const std::vector<std::string> kMethods = {
      "vine-parametric", "vine-nonparametric", "gaussian", "gaussian-copula", "independence"};
  return kMethods;
}

struct BundleOptions {
  std::string method = "vine-parametric";
  ShapMethod shap_method = ShapMethod::kCondSim;
  std::uint64_t seed = 1;
  int candidates = kDefaultCandidates;
  int grid_size = 64;
  int threads = 1;
};

// Everything `explain` needs: training data, and the fitted dependence model.
struct ModelBundle {
  std::string method;
  ShapMethod shap_method = ShapMethod::kCondSim;
  std::uint64_t seed = 1;
  std::vector<std::string> columns;
  Table train;
  std::shared_ptr<const VineSet> vines;  // vine methods
  Eigen::VectorXd mu;                    // gaussian
  Eigen::MatrixXd sigma;                 // gaussian
  Eigen::MatrixXd correlation;           // gaussian-copula
};

ModelBundle FitBundle(Table train, std::vector<std::string> columns, const BundleOptions& options);

// Estimator over the bundle's training set; K samples per coalition.
std::unique_ptr<ContributionEstimator> MakeEstimator(const ModelBundle& bundle, const Predictor& g,
                                                     int k);

// Versioned text format; doubles are written in shortest round-trip form so
// parametric bundles reload bit-exactly.
void WriteBundle(std::ostream& out, const ModelBundle& bundle);
ModelBundle ReadBundle(std::istream& in);

}  // namespace vineshap

#endif  // VINESHAP_BUNDLE_H_
