#ifndef VINESHAP_STRUCTURE_H_
#define VINESHAP_STRUCTURE_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vineshap/coalition.h"

namespace vineshap {

class Rng;

// How v(S) is obtained from a vine: conditional simulation needs S to be a
// prefix or suffix of an order; the ratio method needs the complement of S to
// be a contiguous block.
enum class ShapMethod { kCondSim, kRatio };

std::string ShapMethodName(ShapMethod method);
ShapMethod ParseShapMethod(const std::string& name);

enum class Role { kPrefix, kSuffix, kBlock };

struct Assignment {
  int order_index = 0;
  Role role = Role::kPrefix;
  // Block bounds in order positions (inclusive). For prefix/suffix roles the
  // bounds describe the conditioning set's positions.
  int start = 0;
  int end = 0;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

// Orders plus, for every required set, which order serves it and how.
// Keys are the required-set masks: S for kCondSim, the complement of S for
// kRatio.
struct CoverPlan {
  int dim = 0;
  ShapMethod method = ShapMethod::kCondSim;
  std::vector<std::vector<int>> orders;
  std::map<std::uint32_t, Assignment> assignment;

  friend bool operator==(const CoverPlan&, const CoverPlan&) = default;
};

// Sets that must be covered:
//   kCondSim: every S with 0 < |S| < dim
//   kRatio:   every complement of such an S with at least two members
std::vector<Coalition> RequiredSets(int dim, ShapMethod method);

// Sets an order serves, with the role it serves each in. kCondSim yields the
// 2(dim-1) proper prefixes and suffixes; kRatio yields every contiguous block
// of length >= 2 (including the full order).
std::vector<std::pair<Coalition, Assignment>> CoveredSets(const std::vector<int>& order,
                                                          ShapMethod method);

inline constexpr int kDefaultCandidates = 100;

// Randomized greedy set cover: each round draws `candidates` random
// permutations and keeps the one covering most of the remaining sets (ties go
// to the lexicographically smallest permutation). The plan always holds at
// least one order.
CoverPlan GreedyCover(int dim, ShapMethod method, int candidates, Rng& rng);

// Key into CoverPlan::assignment for coalition S.
std::uint32_t PlanKey(const Coalition& s, ShapMethod method);

}  // namespace vineshap

#endif  // VINESHAP_STRUCTURE_H_
