// Reference computations used by the tests. Nothing here calls into the
// library code it is meant to check.
#ifndef VINESHAP_TESTS_ORACLES_H_
#define VINESHAP_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

// Central difference of f at x with Richardson extrapolation over h, h/2, h/4.
inline double Derivative(const std::function<double(double)>& f, double x, double h) {
  double d[3];
  for (int i = 0; i < 3; ++i) {
    const double s = h / (1 << i);
    d[i] = (f(x + s) - f(x - s)) / (2 * s);
  }
  const double r1 = (4 * d[1] - d[0]) / 3, r2 = (4 * d[2] - d[1]) / 3;
  return (16 * r2 - r1) / 15;
}

// Mixed partial d^2 f / dx dy, same extrapolation scheme.
inline double MixedDerivative(const std::function<double(double, double)>& f, double x, double y,
                              double h) {
  double d[3];
  for (int i = 0; i < 3; ++i) {
    const double s = h / (1 << i);
    d[i] = (f(x + s, y + s) - f(x + s, y - s) - f(x - s, y + s) + f(x - s, y - s)) / (4 * s * s);
  }
  const double r1 = (4 * d[1] - d[0]) / 3, r2 = (4 * d[2] - d[1]) / 3;
  return (16 * r2 - r1) / 15;
}

inline double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double PhiDensity(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI); }

// Plain bisection for the standard normal quantile.
inline double PhiInverse(double p) {
  double lo = -40, hi = 40;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (Phi(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Clayton cdf with the rotation conventions
//   90:  v - C(1-u, v)   180: u + v - 1 + C(1-u, 1-v)   270: u - C(u, 1-v)
inline double ClaytonCdf(double u, double v, double theta, int rotation = 0) {
  auto base = [theta](double a, double b) {
    return std::pow(std::pow(a, -theta) + std::pow(b, -theta) - 1.0, -1.0 / theta);
  };
  switch (rotation) {
    case 90:
      return v - base(1 - u, v);
    case 180:
      return u + v - 1 + base(1 - u, 1 - v);
    case 270:
      return u - base(u, 1 - v);
    default:
      return base(u, v);
  }
}

// P(X <= x, Y <= y) for a standard bivariate normal with correlation rho, by
// tanh-sinh quadrature of phi(s) Phi((y - rho s) / sqrt(1 - rho^2)) over
// [-40, x]; the mass below -40 is far under double precision.
inline double BivariateNormalCdf(double x, double y, double rho) {
  const double s = std::sqrt(1 - rho * rho);
  auto integrand = [&](double t) { return PhiDensity(t) * Phi((y - rho * t) / s); };
  static thread_local boost::math::quadrature::tanh_sinh<double> quad;
  return quad.integrate(integrand, -40.0, x);
}

// Gaussian copula log-density for correlation matrix r.
inline double GaussianCopulaLogDensity(const Eigen::MatrixXd& r, const std::vector<double>& u) {
  const int d = static_cast<int>(u.size());
  Eigen::VectorXd z(d);
  for (int i = 0; i < d; ++i) z(i) = PhiInverse(u[i]);
  const Eigen::MatrixXd inv = r.inverse();
  const double quad = z.dot((inv - Eigen::MatrixXd::Identity(d, d)) * z);
  return -0.5 * std::log(r.determinant()) - 0.5 * quad;
}

// O(n^2) Kendall tau-b.
inline double KendallTauBrute(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double conc = 0, disc = 0, tx = 0, ty = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = (x[i] > x[j]) - (x[i] < x[j]);
      const double b = (y[i] > y[j]) - (y[i] < y[j]);
      if (a == 0 && b == 0) continue;
      if (a == 0) {
        ++tx;
      } else if (b == 0) {
        ++ty;
      } else if (a * b > 0) {
        ++conc;
      } else {
        ++disc;
      }
    }
  }
  const double denom = std::sqrt((conc + disc + tx) * (conc + disc + ty));
  return denom > 0 ? (conc - disc) / denom : 0.0;
}

// Upper tail of the chi-square uniformity statistic with `bins` equal cells.
inline double ChiSquareUniformPValue(const std::vector<double>& u, int bins) {
  std::vector<double> count(bins, 0.0);
  for (double x : u) count[std::min(bins - 1, static_cast<int>(x * bins))] += 1;
  const double expected = static_cast<double>(u.size()) / bins;
  double stat = 0;
  for (double c : count) stat += (c - expected) * (c - expected) / expected;
  boost::math::chi_squared dist(bins - 1);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// One-sample Kolmogorov-Smirnov test against a continuous cdf; p-value from
// the asymptotic Kolmogorov distribution with Stephens' small-sample factor.
inline double KsPValue(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double en = std::sqrt(n);
  const double lambda = (en + 0.12 + 0.11 / en) * d;
  double q = 0, sign = 1;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    q += term;
    sign = -sign;
    if (std::abs(term) < 1e-16) break;
  }
  return std::clamp(2 * q, 0.0, 1.0);
}

// Two-sample Kolmogorov-Smirnov test.
inline double KsTwoSamplePValue(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  const double lambda = (en + 0.12 + 0.11 / en) * d;
  double q = 0, sign = 1;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    q += term;
    sign = -sign;
    if (std::abs(term) < 1e-16) break;
  }
  return std::clamp(2 * q, 0.0, 1.0);
}

// Shapley values straight from the definition, with factorials.
inline std::vector<double> ShapleyBrute(int dim, const std::vector<double>& v) {
  std::vector<double> phi(dim, 0.0);
  const double mfact = std::tgamma(dim + 1.0);
  for (int j = 0; j < dim; ++j) {
    for (std::uint32_t s = 0; s < (1u << dim); ++s) {
      if (s & (1u << j)) continue;
      const int k = __builtin_popcount(s);
      const double w = std::tgamma(k + 1.0) * std::tgamma(dim - k + 0.0) / mfact;
      phi[j] += w * (v[s | (1u << j)] - v[s]);
    }
  }
  return phi;
}

// Shapley values as the average marginal contribution over all orderings.
inline std::vector<double> ShapleyPermutations(int dim, const std::vector<double>& v) {
  std::vector<int> perm(dim);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> phi(dim, 0.0);
  double count = 0;
  do {
    std::uint32_t s = 0;
    for (int j : perm) {
      phi[j] += v[s | (1u << j)] - v[s];
      s |= 1u << j;
    }
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (double& p : phi) p /= count;
  return phi;
}

// Hand-rolled generator for property tests; independent of the library RNG.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}
  double Uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  // Open interval, away from the boundary by `margin`.
  double Unit(double margin = 1e-6) { return Uniform(margin, 1.0 - margin); }
  int Int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  double Normal() { return std::normal_distribution<double>()(engine_); }
  std::vector<int> Permutation(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), engine_);
    return p;
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace oracle

#endif  // VINESHAP_TESTS_ORACLES_H_
