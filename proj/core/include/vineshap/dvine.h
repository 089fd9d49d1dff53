#ifndef VINESHAP_DVINE_H_
#define VINESHAP_DVINE_H_

#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "vineshap/bicop.h"
#include "vineshap/coalition.h"
#include "vineshap/marginals.h"
#include "vineshap/table.h"

namespace vineshap {

class Rng;

// Contiguous run of positions [start, end] (0-based, inclusive) in a vine
// order.
struct Block {
  int start = 0;
  int end = 0;
  int length() const { return end - start + 1; }
  friend bool operator==(const Block&, const Block&) = default;
};

struct ParametricMode {
  ParametricOptions options;
};
struct NonparametricMode {
  int grid_size = 64;
};
// Installs known copulas without estimation. Tree t uses
// per_tree[min(t, per_tree.size() - 1)].
struct FixedMode {
  std::vector<PairCopula> per_tree;
};
using FitMode = std::variant<ParametricMode, NonparametricMode, FixedMode>;

using SharedMarginals = std::shared_ptr<const std::vector<EmpiricalMarginal>>;

SharedMarginals FitMarginals(const Table& data);
// Column-wise marginal cdf of every cell.
Table PseudoObservations(const Table& data, const std::vector<EmpiricalMarginal>& marginals);

// Simplified D-vine copula with empirical margins.
//
// Tree t (0-based) has edges e = 0 .. dim-2-t; edge (t, e) links the variables
// at order positions e and e+t+1 conditioned on the positions between them.
// The pair copula's first argument belongs to position e.
//
// Copula-scale vectors passed to and returned from this class use the
// original feature indexing; the order permutation is applied internally.
class DVine {
 public:
  DVine(std::vector<int> order, std::vector<std::vector<PairCopula>> pairs,
        SharedMarginals marginals);

  // Sequential fit. Marginals and pseudo-observations are computed from data.
  static DVine Fit(const Table& data, std::vector<int> order, const FitMode& mode);
  // Fit on precomputed pseudo-observations (columns in feature order), so
  // that several orders can share one set of marginals.
  static DVine FitPseudo(const Table& u, SharedMarginals marginals, std::vector<int> order,
                         const FitMode& mode);

  int dim() const { return static_cast<int>(order_.size()); }
  const std::vector<int>& order() const { return order_; }
  const PairCopula& pair(int tree, int edge) const { return pairs_[tree][edge]; }
  const std::vector<std::vector<PairCopula>>& pairs() const { return pairs_; }
  const std::vector<EmpiricalMarginal>& marginals() const { return *marginals_; }
  const SharedMarginals& shared_marginals() const { return marginals_; }

  std::vector<double> ToCopulaScale(std::span<const double> x) const;

  double CopulaLogDensity(std::span<const double> u) const;

  // Log-density of the sub-vine on the block. u_block holds the values of the
  // block's variables in order position sequence.
  double MarginalCopulaLogDensity(const Block& block, std::span<const double> u_block) const;
  // Same, for a feature set given by mask; u is a full-length vector in feature
  // indexing. Throws kUnsupportedBlock unless the set is contiguous in the order.
  double MarginalCopulaLogDensity(const Coalition& set, std::span<const double> u) const;
  std::optional<Block> FindBlock(const Coalition& set) const;

  // w[order[k]] = F(u[order[k]] | u[order[0..k-1]]).
  std::vector<double> Rosenblatt(std::span<const double> u) const;
  std::vector<double> InverseRosenblatt(std::span<const double> w) const;

  bool IsPrefix(const Coalition& s) const;
  bool IsSuffix(const Coalition& s) const;

  // Samples x_{S-bar} | x_S = x_star on the data scale. x_star has full length;
  // only the entries in S are read. Returns K rows with the S-bar columns in
  // increasing feature index. S must be a proper, non-empty prefix or suffix
  // of the order (kUnsupportedCoalition otherwise).
  Table ConditionalSample(const Coalition& s, std::span<const double> x_star, int k,
                          Rng& rng) const;

  // Same model with the order reversed.
  DVine Reversed() const;

 private:
  std::vector<int> order_;
  std::vector<int> position_;  // inverse of order_
  std::vector<std::vector<PairCopula>> pairs_;
  SharedMarginals marginals_;
};

}  // namespace vineshap

#endif  // VINESHAP_DVINE_H_
