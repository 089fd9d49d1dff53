#include "vineshap/structure.h"

#include <algorithm>
#include <numeric>
#include <set>

#include "vineshap/error.h"
#include "vineshap/rng.h"

namespace vineshap {
namespace {

void CheckDim(int dim) {
  if (dim < 2 || dim > kMaxFeatures) {
    ThrowInvalid("feature count must lie in [2, " + std::to_string(kMaxFeatures) + "], got " +
                 std::to_string(dim));
  }
}

std::vector<int> RandomPermutation(int dim, Rng& rng) {
  std::vector<int> p(dim);
  std::iota(p.begin(), p.end(), 0);
  for (int i = dim - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.Index(static_cast<std::uint64_t>(i) + 1));
    std::swap(p[i], p[j]);
  }
  return p;
}

// An order that serves `target` (prefix, or leading block).
std::vector<int> OrderServing(std::uint32_t target, int dim) {
  std::vector<int> order;
  for (int j = 0; j < dim; ++j) {
    if ((target >> j) & 1u) order.push_back(j);
  }
  for (int j = 0; j < dim; ++j) {
    if (!((target >> j) & 1u)) order.push_back(j);
  }
  return order;
}

}  // namespace

std::string ShapMethodName(ShapMethod method) {
  return method == ShapMethod::kCondSim ? "condsim" : "ratio";
}

ShapMethod ParseShapMethod(const std::string& name) {
  if (name == "condsim") return ShapMethod::kCondSim;
  if (name == "ratio") return ShapMethod::kRatio;
  throw Error(ErrorKind::kUsage, "unknown shapley method '" + name + "' (condsim|ratio)");
}

std::uint32_t PlanKey(const Coalition& s, ShapMethod method) {
  return method == ShapMethod::kCondSim ? s.mask() : s.complement().mask();
}

std::vector<Coalition> RequiredSets(int dim, ShapMethod method) {
  CheckDim(dim);
  std::vector<Coalition> out;
  const std::uint32_t full = Coalition::FullMask(dim);
  for (std::uint32_t s = 1; s < full; ++s) {
    const Coalition c(s, dim);
    if (method == ShapMethod::kCondSim) {
      out.push_back(c);
    } else if (c.complement().size() >= 2) {
      out.push_back(c.complement());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<Coalition, Assignment>> CoveredSets(const std::vector<int>& order,
                                                          ShapMethod method) {
  const int dim = static_cast<int>(order.size());
  std::vector<std::pair<Coalition, Assignment>> out;
  if (method == ShapMethod::kCondSim) {
    std::uint32_t prefix = 0, suffix = 0;
    for (int k = 1; k < dim; ++k) {
      prefix |= 1u << order[k - 1];
      suffix |= 1u << order[dim - k];
      out.push_back({Coalition(prefix, dim), {0, Role::kPrefix, 0, k - 1}});
      out.push_back({Coalition(suffix, dim), {0, Role::kSuffix, dim - k, dim - 1}});
    }
  } else {
    for (int start = 0; start < dim; ++start) {
      std::uint32_t block = 1u << order[start];
      for (int end = start + 1; end < dim; ++end) {
        block |= 1u << order[end];
        out.push_back({Coalition(block, dim), {0, Role::kBlock, start, end}});
      }
    }
  }
  return out;
}

CoverPlan GreedyCover(int dim, ShapMethod method, int candidates, Rng& rng) {
  CheckDim(dim);
  if (candidates < 1) ThrowInvalid("candidate count must be at least 1");
  CoverPlan plan;
  plan.dim = dim;
  plan.method = method;

  std::set<std::uint32_t> remaining;
  for (const Coalition& c : RequiredSets(dim, method)) remaining.insert(c.mask());

  auto score = [&](const std::vector<int>& order) {
    int n = 0;
    for (const auto& [set, role] : CoveredSets(order, method)) n += remaining.count(set.mask()) ? 1 : 0;
    return n;
  };
  auto adopt = [&](const std::vector<int>& order) {
    const int index = static_cast<int>(plan.orders.size());
    plan.orders.push_back(order);
    for (auto [set, a] : CoveredSets(order, method)) {
      if (remaining.erase(set.mask())) {
        a.order_index = index;
        plan.assignment.emplace(set.mask(), a);
      }
    }
  };

  while (!remaining.empty()) {
    std::vector<int> best;
    int best_score = -1;
    for (int b = 0; b < candidates; ++b) {
      std::vector<int> order = RandomPermutation(dim, rng);
      const int sc = score(order);
      if (sc > best_score || (sc == best_score && order < best)) {
        best_score = sc;
        best = std::move(order);
      }
    }
    // No random draw made progress: fall back to an order built around the
    // first outstanding set so that every round shrinks the remainder.
    if (best_score == 0) best = OrderServing(*remaining.begin(), dim);
    adopt(best);
  }
  if (plan.orders.empty()) {
    // Nothing to cover (ratio method with two features); the joint density
    // still needs one vine.
    plan.orders.push_back(RandomPermutation(dim, rng));
  }
  return plan;
}

}  // namespace vineshap
