#include "vineshap/explain.h"

#include <bit>
#include <cmath>

#include "vineshap/error.h"
#include "vineshap/parallel.h"

namespace vineshap {

Predictor Predictor::Pointwise(PointFn fn) {
  return Predictor([fn = std::move(fn)](const Table& rows) {
    std::vector<double> out(rows.rows());
    for (Eigen::Index i = 0; i < rows.rows(); ++i) out[i] = fn(Row(rows, i));
    return out;
  });
}

double Predictor::operator()(std::span<const double> x) const {
  Table row(1, static_cast<Eigen::Index>(x.size()));
  std::copy(x.begin(), x.end(), row.data());
  return Batch(row).at(0);
}

std::vector<double> Predictor::Batch(const Table& rows) const {
  if (!batch_) ThrowInvalid("predictor is not set");
  std::vector<double> out = batch_(rows);
  if (out.size() != static_cast<std::size_t>(rows.rows())) {
    ThrowInvalid("predictor returned " + std::to_string(out.size()) + " values for " +
                 std::to_string(rows.rows()) + " rows");
  }
  return out;
}

double ShapleyWeight(int dim, int size) {
  // 1 / (dim * C(dim-1, size))
  double binom = 1.0;
  for (int i = 1; i <= size; ++i) binom = binom * (dim - size - 1 + i) / i;
  return 1.0 / (dim * binom);
}

std::vector<double> ShapleyFromValues(int dim, std::span<const double> values) {
  const std::uint32_t count = 1u << dim;
  if (values.size() != count) ThrowInvalid("coalition table must have 2^dim entries");
  std::vector<double> weight(dim);
  for (int s = 0; s < dim; ++s) weight[s] = ShapleyWeight(dim, s);
  std::vector<double> phi(dim, 0.0);
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    const int size = std::popcount(mask);
    if (size == dim) continue;
    for (int j = 0; j < dim; ++j) {
      if ((mask >> j) & 1u) continue;
      phi[j] += weight[size] * (values[mask | (1u << j)] - values[mask]);
    }
  }
  return phi;
}

Table CombineRows(const Coalition& s, std::span<const double> x, const Table& free) {
  const int dim = static_cast<int>(x.size());
  Table rows(free.rows(), dim);
  for (Eigen::Index r = 0; r < free.rows(); ++r) {
    Eigen::Index c = 0;
    for (int j = 0; j < dim; ++j) rows(r, j) = s.contains(j) ? x[j] : free(r, c++);
  }
  return rows;
}

Explanation Shapley(const ContributionEstimator& estimator, std::span<const double> x,
                    const ShapleyOptions& options) {
  const int dim = estimator.dim();
  if (dim > kMaxExplainFeatures) {
    throw Error(ErrorKind::kUsage, "exact Shapley enumeration is limited to " +
                                       std::to_string(kMaxExplainFeatures) +
                                       " features; reduce the feature count");
  }
  if (static_cast<int>(x.size()) != dim) ThrowInvalid("query point has the wrong dimension");
  for (double xi : x) {
    if (!std::isfinite(xi)) ThrowInvalid("query point has non-finite entries");
  }

  const std::uint32_t full = Coalition::FullMask(dim);
  Explanation out;
  out.method = estimator.method();
  out.seed = options.seed;
  out.values.assign(full + 1, 0.0);
  out.diagnostics.assign(full + 1, CoalitionValue{});

  out.values[0] = estimator.Baseline();
  out.values[full] = estimator.predictor()(x);
  out.diagnostics[0].value = out.values[0];
  out.diagnostics[full].value = out.values[full];

  ParallelFor(static_cast<int>(full) - 1, options.threads, [&](int i) {
    const auto mask = static_cast<std::uint32_t>(i + 1);
    CoalitionValue cv = estimator.Value(Coalition(mask, dim), x, options.seed);
    out.values[mask] = cv.value;
    out.diagnostics[mask] = cv;
  });

  out.phi0 = out.values[0];
  out.phi = ShapleyFromValues(dim, out.values);
  return out;
}

}  // namespace vineshap
