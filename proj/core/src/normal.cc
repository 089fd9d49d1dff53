#include "vineshap/normal.h"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace vineshap {

double NormCdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double NormPdf(double x) { return std::exp(NormLogPdf(x)); }

double NormLogPdf(double x) {
  return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
}

double NormQuantile(double p) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace vineshap
