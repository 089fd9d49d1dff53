#include "vineshap/kendall.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "vineshap/error.h"

namespace vineshap {
namespace {

// Sorts y in place and returns the number of strict inversions.
std::int64_t MergeCount(std::vector<double>& y, std::vector<double>& buf,
                        std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = MergeCount(y, buf, lo, mid) + MergeCount(y, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (y[j] < y[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = y[j++];
    } else {
      buf[k++] = y[i++];
    }
  }
  while (i < mid) buf[k++] = y[i++];
  while (j < hi) buf[k++] = y[j++];
  std::copy(buf.begin() + lo, buf.begin() + hi, y.begin() + lo);
  return swaps;
}

std::int64_t Pairs(std::int64_t t) { return t * (t - 1) / 2; }

}  // namespace

double KendallTau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) ThrowInvalid("KendallTau: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) return 0.0;

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  std::int64_t x_ties = 0, joint_ties = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && x[idx[j]] == x[idx[i]]) ++j;
    x_ties += Pairs(static_cast<std::int64_t>(j - i));
    for (std::size_t a = i; a < j;) {
      std::size_t b = a;
      while (b < j && y[idx[b]] == y[idx[a]]) ++b;
      joint_ties += Pairs(static_cast<std::int64_t>(b - a));
      a = b;
    }
    i = j;
  }

  std::vector<double> ys(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[idx[i]];
  const std::int64_t swaps = MergeCount(ys, buf, 0, n);

  std::int64_t y_ties = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && ys[j] == ys[i]) ++j;
    y_ties += Pairs(static_cast<std::int64_t>(j - i));
    i = j;
  }

  const std::int64_t total = Pairs(static_cast<std::int64_t>(n));
  const double denom = std::sqrt(static_cast<double>(total - x_ties) *
                                 static_cast<double>(total - y_ties));
  if (denom == 0.0) return 0.0;
  const std::int64_t con_minus_dis = total - x_ties - y_ties + joint_ties - 2 * swaps;
  return static_cast<double>(con_minus_dis) / denom;
}

}  // namespace vineshap
