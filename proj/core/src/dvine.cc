#include "vineshap/dvine.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "vineshap/error.h"
#include "vineshap/rng.h"

namespace vineshap {
namespace {

void ValidateOrder(const std::vector<int>& order) {
  std::vector<bool> seen(order.size(), false);
  for (int j : order) {
    if (j < 0 || j >= static_cast<int>(order.size()) || seen[j]) {
      ThrowInvalid("vine order is not a permutation of 0.." + std::to_string(order.size() - 1));
    }
    seen[j] = true;
  }
}

// Read access to the pair copulas either in the stored orientation or as the
// order-reversed vine. Reversing maps edge (t, e) to (t, dim-2-t-e) with the
// copula arguments swapped.
class VineView {
 public:
  VineView(const std::vector<std::vector<PairCopula>>& pairs, int dim, bool reversed)
      : pairs_(pairs), dim_(dim), reversed_(reversed) {}

  double LogDensity(int t, int e, TailProb a, TailProb b) const {
    return reversed_ ? At(t, e).LogDensity(b, a) : At(t, e).LogDensity(a, b);
  }
  // F(a | b), a being the edge's first argument.
  TailProb CondFirstGivenSecond(int t, int e, TailProb a, TailProb b) const {
    return At(t, e).HFunc(a, b, reversed_ ? CondOn::kFirst : CondOn::kSecond);
  }
  // F(b | a).
  TailProb CondSecondGivenFirst(int t, int e, TailProb a, TailProb b) const {
    return At(t, e).HFunc(b, a, reversed_ ? CondOn::kSecond : CondOn::kFirst);
  }
  // Solves CondSecondGivenFirst(t, e, a, b) = w for b.
  TailProb InvSecondGivenFirst(int t, int e, TailProb w, TailProb a) const {
    return At(t, e).HInv(w, a, reversed_ ? CondOn::kSecond : CondOn::kFirst);
  }

 private:
  const PairCopula& At(int t, int e) const {
    return reversed_ ? pairs_[t][dim_ - 2 - t - e] : pairs_[t][e];
  }

  const std::vector<std::vector<PairCopula>>& pairs_;
  int dim_;
  bool reversed_;
};

// Log-density of the sub-vine over positions [start, start + len) given values
// in position order. If w is non-null the Rosenblatt transform of the block
// is written to it.
double SubVineRecursion(const VineView& view, int start, std::span<const double> values,
                        TailProb* w) {
  const int len = static_cast<int>(values.size());
  std::vector<TailProb> a(len);
  for (int k = 0; k < len; ++k) a[k] = TailProb::Of(std::clamp(values[k], kBoundaryEps, 1.0 - kBoundaryEps));
  std::vector<TailProb> b(a);
  if (w != nullptr && len > 0) w[0] = a[0];
  double log_density = 0.0;
  for (int t = 0; t + 1 < len; ++t) {
    const bool last = t + 2 == len;
    for (int e = 0; e + t + 1 < len; ++e) {
      const TailProb x = a[e], y = b[e + 1];
      log_density += view.LogDensity(t, start + e, x, y);
      if (!last || w != nullptr) {
        a[e] = view.CondFirstGivenSecond(t, start + e, x, y);
        b[e] = view.CondSecondGivenFirst(t, start + e, x, y);
      }
    }
    if (w != nullptr) w[t + 1] = b[0];
  }
  return log_density;
}

// Incremental inverse Rosenblatt transform along an order. Rows r of the
// tables hold the tree-(r-1) pseudo-observations; row 0 is the copula scale.
class InverseState {
 public:
  explicit InverseState(int dim)
      : dim_(dim), a_(static_cast<std::size_t>(dim) * dim), b_(a_.size()) {}

  // Sets position k from its Rosenblatt coordinate; positions < k must be set.
  TailProb Step(const VineView& view, int k, TailProb w) {
    TailProb cur = w;
    for (int t = k - 1; t >= 0; --t) {
      const int e = k - 1 - t;
      cur = view.InvSecondGivenFirst(t, e, cur, A(t, e));
      B(t, e + 1) = cur;
    }
    A(0, k) = cur;
    B(0, k) = cur;
    for (int t = 0; t < k; ++t) {
      const int e = k - 1 - t;
      A(t + 1, e) = view.CondFirstGivenSecond(t, e, A(t, e), B(t, e + 1));
    }
    return cur;
  }

 private:
  TailProb& A(int row, int e) { return a_[static_cast<std::size_t>(row) * dim_ + e]; }
  TailProb& B(int row, int e) { return b_[static_cast<std::size_t>(row) * dim_ + e]; }

  int dim_;
  std::vector<TailProb> a_;
  std::vector<TailProb> b_;
};

}  // namespace

SharedMarginals FitMarginals(const Table& data) {
  auto out = std::make_shared<std::vector<EmpiricalMarginal>>();
  out->reserve(data.cols());
  std::vector<double> col(data.rows());
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    for (Eigen::Index i = 0; i < data.rows(); ++i) col[i] = data(i, j);
    out->push_back(EmpiricalMarginal::Fit(col));
  }
  return out;
}

Table PseudoObservations(const Table& data, const std::vector<EmpiricalMarginal>& marginals) {
  if (static_cast<std::size_t>(data.cols()) != marginals.size()) {
    ThrowInvalid("pseudo-observations: column count does not match marginals");
  }
  Table u(data.rows(), data.cols());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) u(i, j) = marginals[j].Cdf(data(i, j));
  }
  return u;
}

DVine::DVine(std::vector<int> order, std::vector<std::vector<PairCopula>> pairs,
             SharedMarginals marginals)
    : order_(std::move(order)), pairs_(std::move(pairs)), marginals_(std::move(marginals)) {
  ValidateOrder(order_);
  const int m = dim();
  if (static_cast<int>(pairs_.size()) != std::max(0, m - 1)) {
    ThrowInvalid("vine needs " + std::to_string(m - 1) + " trees");
  }
  for (int t = 0; t + 1 < m; ++t) {
    if (static_cast<int>(pairs_[t].size()) != m - 1 - t) {
      ThrowInvalid("tree " + std::to_string(t) + " has the wrong number of edges");
    }
  }
  if (!marginals_ || static_cast<int>(marginals_->size()) != m) {
    ThrowInvalid("vine needs one marginal per variable");
  }
  position_.assign(m, 0);
  for (int k = 0; k < m; ++k) position_[order_[k]] = k;
}

DVine DVine::Fit(const Table& data, std::vector<int> order, const FitMode& mode) {
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data.data()[i])) ThrowInvalid("vine fit: non-finite data");
  }
  SharedMarginals marginals = FitMarginals(data);
  const Table u = PseudoObservations(data, *marginals);
  return FitPseudo(u, std::move(marginals), std::move(order), mode);
}

DVine DVine::FitPseudo(const Table& u, SharedMarginals marginals, std::vector<int> order,
                       const FitMode& mode) {
  ValidateOrder(order);
  const int m = static_cast<int>(order.size());
  if (u.cols() != m) ThrowInvalid("vine fit: order length does not match column count");
  if (u.rows() < 30) {
    ThrowInvalid("vine fit needs at least 30 observations, got " + std::to_string(u.rows()));
  }
  const auto n = static_cast<std::size_t>(u.rows());

  // a[k], b[k]: current-tree pseudo-observations indexed by position, with
  // tail-accurate copies carried between trees.
  std::vector<std::vector<double>> a(m, std::vector<double>(n)), b;
  std::vector<std::vector<TailProb>> ta(m, std::vector<TailProb>(n)), tb;
  for (int k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      a[k][i] = u(static_cast<Eigen::Index>(i), order[k]);
      ta[k][i] = TailProb::Of(std::clamp(a[k][i], kBoundaryEps, 1.0 - kBoundaryEps));
    }
  }
  b = a;
  tb = ta;

  std::vector<std::vector<PairCopula>> pairs(std::max(0, m - 1));
  for (int t = 0; t + 1 < m; ++t) {
    for (int e = 0; e + t + 1 < m; ++e) {
      const std::vector<double>& x = a[e];
      const std::vector<double>& y = b[e + 1];
      PairCopula pc = std::visit(
          [&](const auto& md) -> PairCopula {
            using T = std::decay_t<decltype(md)>;
            if constexpr (std::is_same_v<T, ParametricMode>) {
              return FitParametric(x, y, md.options);
            } else if constexpr (std::is_same_v<T, NonparametricMode>) {
              return FitNonparametric(x, y, md.grid_size);
            } else {
              if (md.per_tree.empty()) ThrowInvalid("fixed vine mode needs at least one copula");
              return md.per_tree[std::min<std::size_t>(t, md.per_tree.size() - 1)];
            }
          },
          mode);
      pairs[t].push_back(pc);
    }
    if (t + 2 == m) break;
    for (int e = 0; e + t + 1 < m; ++e) {
      const PairCopula& pc = pairs[t][e];
      for (std::size_t i = 0; i < n; ++i) {
        const TailProb x = ta[e][i], y = tb[e + 1][i];
        ta[e][i] = pc.HFunc(x, y, CondOn::kSecond);
        tb[e][i] = pc.HFunc(y, x, CondOn::kFirst);
        a[e][i] = ta[e][i].p;
        b[e][i] = tb[e][i].p;
      }
    }
  }
  return DVine(std::move(order), std::move(pairs), std::move(marginals));
}

std::vector<double> DVine::ToCopulaScale(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) ThrowInvalid("dimension mismatch");
  std::vector<double> u(x.size());
  for (int j = 0; j < dim(); ++j) u[j] = (*marginals_)[j].Cdf(x[j]);
  return u;
}

double DVine::CopulaLogDensity(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != dim()) ThrowInvalid("dimension mismatch");
  std::vector<double> by_pos(dim());
  for (int k = 0; k < dim(); ++k) by_pos[k] = u[order_[k]];
  return SubVineRecursion(VineView(pairs_, dim(), false), 0, by_pos, nullptr);
}

double DVine::MarginalCopulaLogDensity(const Block& block, std::span<const double> u_block) const {
  if (block.start < 0 || block.end >= dim() || block.start > block.end) {
    throw Error(ErrorKind::kUnsupportedBlock, "invalid block");
  }
  if (static_cast<int>(u_block.size()) != block.length()) {
    ThrowInvalid("block values have the wrong length");
  }
  return SubVineRecursion(VineView(pairs_, dim(), false), block.start, u_block, nullptr);
}

std::optional<Block> DVine::FindBlock(const Coalition& set) const {
  if (set.empty()) return std::nullopt;
  int lo = dim(), hi = -1;
  for (int j : set.members()) {
    lo = std::min(lo, position_[j]);
    hi = std::max(hi, position_[j]);
  }
  if (hi - lo + 1 != set.size()) return std::nullopt;
  return Block{lo, hi};
}

double DVine::MarginalCopulaLogDensity(const Coalition& set, std::span<const double> u) const {
  const std::optional<Block> block = FindBlock(set);
  if (!block) {
    throw Error(ErrorKind::kUnsupportedBlock,
                "set " + set.ToString() + " is not contiguous in the vine order");
  }
  std::vector<double> values(block->length());
  for (int k = block->start; k <= block->end; ++k) values[k - block->start] = u[order_[k]];
  return MarginalCopulaLogDensity(*block, values);
}

std::vector<double> DVine::Rosenblatt(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != dim()) ThrowInvalid("dimension mismatch");
  std::vector<double> by_pos(dim());
  std::vector<TailProb> w_pos(dim());
  for (int k = 0; k < dim(); ++k) by_pos[k] = u[order_[k]];
  SubVineRecursion(VineView(pairs_, dim(), false), 0, by_pos, w_pos.data());
  std::vector<double> w(dim());
  for (int k = 0; k < dim(); ++k) w[order_[k]] = w_pos[k].p;
  return w;
}

std::vector<double> DVine::InverseRosenblatt(std::span<const double> w) const {
  if (static_cast<int>(w.size()) != dim()) ThrowInvalid("dimension mismatch");
  const VineView view(pairs_, dim(), false);
  InverseState state(dim());
  std::vector<double> u(dim());
  for (int k = 0; k < dim(); ++k) {
    u[order_[k]] = std::clamp(state.Step(view, k, TailProb::Of(w[order_[k]])).p, kBoundaryEps,
                              1.0 - kBoundaryEps);
  }
  return u;
}

bool DVine::IsPrefix(const Coalition& s) const {
  const int size = s.size();
  for (int k = 0; k < size; ++k) {
    if (!s.contains(order_[k])) return false;
  }
  return true;
}

bool DVine::IsSuffix(const Coalition& s) const {
  const int size = s.size();
  for (int k = 0; k < size; ++k) {
    if (!s.contains(order_[dim() - 1 - k])) return false;
  }
  return true;
}

Table DVine::ConditionalSample(const Coalition& s, std::span<const double> x_star, int k,
                               Rng& rng) const {
  const int m = dim();
  if (static_cast<int>(x_star.size()) != m) ThrowInvalid("conditioning vector has wrong length");
  if (k < 1) ThrowInvalid("sample size must be positive");
  const int fixed = s.size();
  if (fixed == 0 || fixed == m) {
    throw Error(ErrorKind::kUnsupportedCoalition, "conditioning set must be proper and non-empty");
  }
  bool reversed;
  if (IsPrefix(s)) {
    reversed = false;
  } else if (IsSuffix(s)) {
    reversed = true;
  } else {
    throw Error(ErrorKind::kUnsupportedCoalition,
                "coalition " + s.ToString() + " is neither a prefix nor a suffix of the order");
  }
  // Position sequence of the (possibly reversed) order.
  std::vector<int> seq(order_);
  if (reversed) std::reverse(seq.begin(), seq.end());
  const VineView view(pairs_, m, reversed);

  // Steps 1-2: copula-scale conditioning values, placeholders elsewhere, then
  // the forward transform. Only the conditioning coordinates are kept.
  std::vector<double> u_pos(m, 0.5);
  std::vector<TailProb> w_pos(m);
  for (int p = 0; p < fixed; ++p) u_pos[p] = (*marginals_)[seq[p]].Cdf(x_star[seq[p]]);
  SubVineRecursion(view, 0, u_pos, w_pos.data());

  InverseState prefix(m);
  for (int p = 0; p < fixed; ++p) prefix.Step(view, p, w_pos[p]);

  const std::vector<int> free_features = s.complement().members();
  Table out(k, m - fixed);
  std::vector<double> u_free(m);
  for (int r = 0; r < k; ++r) {
    // Steps 3-5: fresh uniforms for the free coordinates, inverse transform.
    InverseState state = prefix;
    for (int p = fixed; p < m; ++p) {
      u_free[seq[p]] = std::clamp(state.Step(view, p, TailProb::Of(rng.Uniform())).p, kBoundaryEps,
                                  1.0 - kBoundaryEps);
    }
    // Step 6: back to the data scale.
    for (std::size_t c = 0; c < free_features.size(); ++c) {
      const int j = free_features[c];
      out(r, static_cast<Eigen::Index>(c)) = (*marginals_)[j].Quantile(u_free[j]);
    }
  }
  return out;
}

DVine DVine::Reversed() const {
  const int m = dim();
  std::vector<int> order(order_.rbegin(), order_.rend());
  std::vector<std::vector<PairCopula>> pairs(pairs_.size());
  for (int t = 0; t + 1 < m; ++t) {
    for (int e = 0; e + t + 1 < m; ++e) pairs[t].push_back(pairs_[t][m - 2 - t - e].Swapped());
  }
  return DVine(std::move(order), std::move(pairs), marginals_);
}

}  // namespace vineshap
