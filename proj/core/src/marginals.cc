#include "vineshap/marginals.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vineshap/error.h"

namespace vineshap {

EmpiricalMarginal EmpiricalMarginal::Fit(std::span<const double> sample) {
  if (sample.size() < 2) {
    ThrowInvalid("empirical marginal needs at least 2 values, got " +
                 std::to_string(sample.size()));
  }
  std::vector<double> sorted(sample.begin(), sample.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!std::isfinite(sorted[i])) {
      ThrowInvalid("non-finite value at position " + std::to_string(i));
    }
  }
  std::sort(sorted.begin(), sorted.end());
  return EmpiricalMarginal(std::move(sorted));
}

double EmpiricalMarginal::Cdf(double x) const {
  const double n = static_cast<double>(sorted_.size());
  const auto rank = static_cast<double>(
      std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin());
  return std::clamp(rank, 1.0, n) / (n + 1.0);
}

double EmpiricalMarginal::Quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) {
    ThrowInvalid("quantile level must lie in (0,1), got " + std::to_string(u));
  }
  const int n = size();
  double t = u * (n + 1);
  // Snap to the grid so that Quantile(Cdf(x_i)) returns x_i exactly.
  const double nearest = std::round(t);
  if (std::abs(t - nearest) < 8 * std::numeric_limits<double>::epsilon() * (n + 1)) {
    t = nearest;
  }
  if (t <= 1.0) return sorted_.front();
  if (t >= n) return sorted_.back();
  const int k = static_cast<int>(std::floor(t));  // 1 <= k < n
  const double frac = t - k;
  if (frac == 0.0) return sorted_[k - 1];
  return sorted_[k - 1] + frac * (sorted_[k] - sorted_[k - 1]);
}

}  // namespace vineshap
