#ifndef VINESHAP_KENDALL_H_
#define VINESHAP_KENDALL_H_

#include <span>

namespace vineshap {

// Kendall's tau-b in O(n log n) (Knight's merge-sort algorithm).
// Returns 0 when either variable is constant.
double KendallTau(std::span<const double> x, std::span<const double> y);

}  // namespace vineshap

#endif  // VINESHAP_KENDALL_H_
