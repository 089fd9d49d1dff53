#ifndef VINESHAP_MARGINALS_H_
#define VINESHAP_MARGINALS_H_

#include <span>
#include <vector>

namespace vineshap {

// Empirical univariate margin. Maps data to the copula scale with the
// plotting position rank/(n+1) and back with a piecewise-linear quantile.
class EmpiricalMarginal {
 public:
  // Requires at least two finite values. Ties are kept.
  static EmpiricalMarginal Fit(std::span<const double> sample);

  // rank(x)/(n+1) where rank counts sample values <= x, clamped to
  // [1/(n+1), n/(n+1)]. Never returns 0 or 1.
  double Cdf(double x) const;

  // Linear interpolation between order statistics placed at k/(n+1),
  // constant beyond the extreme positions. Requires 0 < u < 1.
  double Quantile(double u) const;

  const std::vector<double>& sorted_sample() const { return sorted_; }
  int size() const { return static_cast<int>(sorted_.size()); }

 private:
  explicit EmpiricalMarginal(std::vector<double> sorted) : sorted_(std::move(sorted)) {}

  std::vector<double> sorted_;
};

}  // namespace vineshap

#endif  // VINESHAP_MARGINALS_H_
