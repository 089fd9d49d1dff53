#include "vineshap/estimators.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Cholesky>

#include "vineshap/error.h"
#include "vineshap/normal.h"
#include "vineshap/rng.h"

namespace vineshap {
namespace {

// Stream id for the per-explanation training subsample; coalition streams use
// mask + 1 >= 1.
constexpr std::uint64_t kSubsampleStream = 0;

std::vector<int> Complement(const Coalition& s) { return s.complement().members(); }

Table GatherRows(const Table& data, const std::vector<int>& rows, const std::vector<int>& cols) {
  Table out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = data(rows[r], cols[c]);
  }
  return out;
}

Eigen::MatrixXd Covariance(const Table& data) {
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - mean;
  return centered.transpose() * centered / static_cast<double>(data.rows() - 1);
}

// Cholesky factor of a symmetric matrix, ridged by 1e-8 * trace when the
// plain factorization fails.
Eigen::MatrixXd SafeCholesky(const Eigen::MatrixXd& a, bool* ridge) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 0) {
    return llt.matrixL();
  }
  *ridge = true;
  const double bump = std::max(1e-8 * a.trace(), 1e-300);
  Eigen::MatrixXd b = a;
  for (int attempt = 0; attempt < 40; ++attempt) {
    b.diagonal().array() += bump * std::pow(10.0, attempt);
    Eigen::LLT<Eigen::MatrixXd> retry(b);
    if (retry.info() == Eigen::Success) return retry.matrixL();
    b = a;
  }
  throw Error(ErrorKind::kNumeric, "covariance matrix could not be regularized");
}

double Clamp01(double u) {
  constexpr double kLo = 1e-16;
  return std::clamp(u, kLo, 1.0 - kLo);
}

}  // namespace

TrainingSet::TrainingSet(Table data, const Predictor& g) : data_(std::move(data)) {
  if (data_.rows() < 2) ThrowInvalid("training set needs at least 2 rows");
  if (data_.cols() < 1) ThrowInvalid("training set has no columns");
  marginals_ = FitMarginals(data_);
  pseudo_ = PseudoObservations(data_, *marginals_);
  const std::vector<double> pred = g.Batch(data_);
  const double inv = 1.0 / static_cast<double>(pred.size());
  for (double p : pred) mean_prediction_ += (p - pred[0]) * inv;
  mean_prediction_ += pred[0];
}

std::vector<int> TrainingSet::Subsample(int k, std::uint64_t seed) const {
  if (k < 1) ThrowInvalid("sample size must be positive");
  const int n = rows();
  Rng rng(seed);
  std::vector<int> out(k);
  if (k <= n) {
    // Partial Fisher-Yates.
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < k; ++i) {
      const int j = i + static_cast<int>(rng.Index(static_cast<std::uint64_t>(n - i)));
      std::swap(idx[i], idx[j]);
      out[i] = idx[i];
    }
  } else {
    for (int i = 0; i < k; ++i) out[i] = static_cast<int>(rng.Index(static_cast<std::uint64_t>(n)));
  }
  return out;
}

TrainedEstimator::TrainedEstimator(std::shared_ptr<const TrainingSet> train, Predictor g, int k)
    : train_(std::move(train)), g_(std::move(g)), k_(k) {
  if (!train_) ThrowInvalid("training set is missing");
  if (k_ < 1) ThrowInvalid("sample size K must be at least 1");
  if (!g_) ThrowInvalid("predictor is not set");
}

void TrainedEstimator::CheckCoalition(const Coalition& s, std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) ThrowInvalid("query point has the wrong dimension");
  if (s.dim() != dim() || s.empty() || s.size() == dim()) {
    throw Error(ErrorKind::kUnsupportedCoalition, "coalition must be proper and non-empty");
  }
}

CoalitionValue TrainedEstimator::Average(const Coalition& s, std::span<const double> x,
                                         const Table& free) const {
  const std::vector<double> y = g_.Batch(CombineRows(s, x, free));
  const double n = static_cast<double>(y.size());
  // Accumulated around the first value so a constant predictor is reproduced
  // exactly.
  const double inv = 1.0 / n;
  double mean = 0.0;
  for (double v : y) mean += (v - y[0]) * inv;
  mean += y[0];
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  CoalitionValue out;
  out.value = mean;
  out.std_error = y.size() > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  out.effective_sample_size = n;
  return out;
}

CoalitionValue IndependenceEstimator::Value(const Coalition& s, std::span<const double> x,
                                            std::uint64_t seed) const {
  CheckCoalition(s, x);
  const std::vector<int> rows = train_->Subsample(k_, DeriveSeed(seed, kSubsampleStream));
  return Average(s, x, GatherRows(train_->data(), rows, Complement(s)));
}

ConditionalNormal ConditionalNormal::Condition(const Eigen::VectorXd& mu,
                                               const Eigen::MatrixXd& sigma, const Coalition& s,
                                               std::span<const double> x) {
  const std::vector<int> fixed = s.members();
  const std::vector<int> free = Complement(s);
  const auto nf = static_cast<Eigen::Index>(fixed.size());
  const auto nu = static_cast<Eigen::Index>(free.size());
  Eigen::MatrixXd s_ss(nf, nf), s_us(nu, nf), s_uu(nu, nu);
  Eigen::VectorXd diff(nf), mean(nu);
  for (Eigen::Index i = 0; i < nf; ++i) {
    diff(i) = x[fixed[i]] - mu(fixed[i]);
    for (Eigen::Index j = 0; j < nf; ++j) s_ss(i, j) = sigma(fixed[i], fixed[j]);
  }
  for (Eigen::Index i = 0; i < nu; ++i) {
    mean(i) = mu(free[i]);
    for (Eigen::Index j = 0; j < nf; ++j) s_us(i, j) = sigma(free[i], fixed[j]);
    for (Eigen::Index j = 0; j < nu; ++j) s_uu(i, j) = sigma(free[i], free[j]);
  }

  ConditionalNormal out;
  const Eigen::MatrixXd l_ss = SafeCholesky(s_ss, &out.ridge);
  // A = Sigma_{S-bar,S} Sigma_{S,S}^-1 via two triangular solves.
  const Eigen::MatrixXd half = l_ss.triangularView<Eigen::Lower>().solve(s_us.transpose());
  out.mean = mean + half.transpose() * l_ss.triangularView<Eigen::Lower>().solve(diff);
  Eigen::MatrixXd cond = s_uu - half.transpose() * half;
  cond = 0.5 * (cond + cond.transpose());
  out.cholesky = SafeCholesky(cond, &out.ridge);
  return out;
}

Table ConditionalNormal::Sample(int k, Rng& rng) const {
  const Eigen::Index d = mean.size();
  Table out(k, d);
  Eigen::VectorXd z(d);
  for (int r = 0; r < k; ++r) {
    for (Eigen::Index i = 0; i < d; ++i) z(i) = rng.Normal();
    out.row(r) = (mean + cholesky.triangularView<Eigen::Lower>() * z).transpose();
  }
  return out;
}

GaussianEstimator::GaussianEstimator(std::shared_ptr<const TrainingSet> train, Predictor g, int k)
    : TrainedEstimator(std::move(train), std::move(g), k) {
  mu_ = train_->data().colwise().mean().transpose();
  sigma_ = Covariance(train_->data());
}

GaussianEstimator::GaussianEstimator(std::shared_ptr<const TrainingSet> train, Predictor g, int k,
                                     Eigen::VectorXd mu, Eigen::MatrixXd sigma)
    : TrainedEstimator(std::move(train), std::move(g), k), mu_(std::move(mu)),
      sigma_(std::move(sigma)) {
  if (mu_.size() != dim() || sigma_.rows() != dim() || sigma_.cols() != dim()) {
    ThrowInvalid("gaussian parameters do not match the feature count");
  }
}

CoalitionValue GaussianEstimator::Value(const Coalition& s, std::span<const double> x,
                                        std::uint64_t seed) const {
  CheckCoalition(s, x);
  const ConditionalNormal cn = ConditionalNormal::Condition(mu_, sigma_, s, x);
  Rng rng(DeriveSeed(seed, s.mask() + 1ull));
  CoalitionValue out = Average(s, x, cn.Sample(k_, rng));
  out.ridge = cn.ridge;
  return out;
}

Eigen::MatrixXd NormalScoreCorrelation(const Table& pseudo) {
  Table z = pseudo.unaryExpr([](double u) { return NormQuantile(u); });
  Eigen::MatrixXd cov = Covariance(z);
  const Eigen::VectorXd sd = cov.diagonal().array().sqrt();
  for (Eigen::Index i = 0; i < cov.rows(); ++i) {
    for (Eigen::Index j = 0; j < cov.cols(); ++j) {
      cov(i, j) = (sd(i) > 0 && sd(j) > 0) ? cov(i, j) / (sd(i) * sd(j)) : (i == j ? 1.0 : 0.0);
    }
  }
  return cov;
}

GaussianCopulaEstimator::GaussianCopulaEstimator(std::shared_ptr<const TrainingSet> train,
                                                 Predictor g, int k)
    : TrainedEstimator(std::move(train), std::move(g), k) {
  correlation_ = NormalScoreCorrelation(train_->pseudo());
}

GaussianCopulaEstimator::GaussianCopulaEstimator(std::shared_ptr<const TrainingSet> train,
                                                 Predictor g, int k, Eigen::MatrixXd correlation)
    : TrainedEstimator(std::move(train), std::move(g), k), correlation_(std::move(correlation)) {
  if (correlation_.rows() != dim() || correlation_.cols() != dim()) {
    ThrowInvalid("correlation matrix does not match the feature count");
  }
}

CoalitionValue GaussianCopulaEstimator::Value(const Coalition& s, std::span<const double> x,
                                              std::uint64_t seed) const {
  CheckCoalition(s, x);
  const auto& marg = *train_->marginals();
  std::vector<double> z(dim(), 0.0);
  for (int j : s.members()) z[j] = NormQuantile(marg[j].Cdf(x[j]));
  const ConditionalNormal cn =
      ConditionalNormal::Condition(Eigen::VectorXd::Zero(dim()), correlation_, s, z);
  Rng rng(DeriveSeed(seed, s.mask() + 1ull));
  Table free = cn.Sample(k_, rng);
  const std::vector<int> cols = Complement(s);
  for (Eigen::Index r = 0; r < free.rows(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      free(r, c) = marg[cols[c]].Quantile(Clamp01(NormCdf(free(r, c))));
    }
  }
  CoalitionValue out = Average(s, x, free);
  out.ridge = cn.ridge;
  return out;
}

const DVine& VineSet::ModelFor(const Coalition& s) const {
  const auto it = plan.assignment.find(PlanKey(s, plan.method));
  if (it == plan.assignment.end() || it->second.order_index < 0 ||
      it->second.order_index >= static_cast<int>(models.size())) {
    throw Error(ErrorKind::kPlanCoverage, "coalition " + s.ToString() + " is not covered by the plan");
  }
  return models[it->second.order_index];
}

VineCondSimEstimator::VineCondSimEstimator(std::shared_ptr<const TrainingSet> train,
                                           std::shared_ptr<const VineSet> vines, Predictor g,
                                           int k, std::string tag)
    : TrainedEstimator(std::move(train), std::move(g), k), vines_(std::move(vines)),
      tag_(std::move(tag)) {
  if (!vines_ || vines_->models.empty()) ThrowInvalid("no vine models supplied");
  if (vines_->plan.method != ShapMethod::kCondSim) ThrowInvalid("plan was built for the ratio method");
}

CoalitionValue VineCondSimEstimator::Value(const Coalition& s, std::span<const double> x,
                                           std::uint64_t seed) const {
  CheckCoalition(s, x);
  const DVine& model = vines_->ModelFor(s);
  Rng rng(DeriveSeed(seed, s.mask() + 1ull));
  return Average(s, x, model.ConditionalSample(s, x, k_, rng));
}

VineRatioEstimator::VineRatioEstimator(std::shared_ptr<const TrainingSet> train,
                                       std::shared_ptr<const VineSet> vines, Predictor g, int k,
                                       std::string tag)
    : TrainedEstimator(std::move(train), std::move(g), k), vines_(std::move(vines)),
      tag_(std::move(tag)) {
  if (!vines_ || vines_->models.empty()) ThrowInvalid("no vine models supplied");
  if (vines_->plan.method != ShapMethod::kRatio) ThrowInvalid("plan was built for the condsim method");
}

VineRatioEstimator::Weights VineRatioEstimator::ImplicitWeights(const Coalition& s,
                                                                std::span<const double> x,
                                                                std::uint64_t seed) const {
  CheckCoalition(s, x);
  const Coalition free = s.complement();
  // A single free feature has a uniform copula margin; any model carries the
  // full density.
  const DVine& model = free.size() >= 2 ? vines_->ModelFor(s) : vines_->models.front();
  const auto& marg = *train_->marginals();
  std::vector<double> u_star(dim());
  for (int j : s.members()) u_star[j] = marg[j].Cdf(x[j]);

  Weights out;
  out.rows = train_->Subsample(k_, DeriveSeed(seed, kSubsampleStream));
  std::vector<double> logw(out.rows.size());
  std::vector<double> u(dim());
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    const std::span<const double> row = Row(train_->pseudo(), out.rows[i]);
    for (int j = 0; j < dim(); ++j) u[j] = s.contains(j) ? u_star[j] : row[j];
    double lw = model.CopulaLogDensity(u);
    if (free.size() >= 2) lw -= model.MarginalCopulaLogDensity(free, u);
    logw[i] = lw;
  }
  double top = -std::numeric_limits<double>::infinity();
  for (double lw : logw) {
    if (std::isfinite(lw)) top = std::max(top, lw);
  }
  out.probs.assign(logw.size(), 0.0);
  double total = 0.0;
  if (std::isfinite(top)) {
    for (std::size_t i = 0; i < logw.size(); ++i) {
      out.probs[i] = std::isfinite(logw[i]) ? std::exp(logw[i] - top) : 0.0;
      total += out.probs[i];
    }
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    out.fallback = true;
    std::fill(out.probs.begin(), out.probs.end(), 1.0);
    total = static_cast<double>(out.probs.size());
  }
  for (double& p : out.probs) p /= total;
  return out;
}

CoalitionValue VineRatioEstimator::Value(const Coalition& s, std::span<const double> x,
                                         std::uint64_t seed) const {
  const Weights w = ImplicitWeights(s, x, seed);
  const std::vector<double> y =
      g_.Batch(CombineRows(s, x, GatherRows(train_->data(), w.rows, Complement(s))));
  CoalitionValue out;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    out.value += (y[i] - y[0]) * w.probs[i];
    sum_sq += w.probs[i] * w.probs[i];
  }
  out.value += y[0];
  double var = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - out.value;
    var += w.probs[i] * w.probs[i] * d * d;
  }
  out.std_error = std::sqrt(var);
  out.effective_sample_size = 1.0 / sum_sq;
  out.weight_fallback = w.fallback;
  return out;
}

std::vector<double> MahalanobisDiagnostic(const Table& samples, const Table& train,
                                          const std::vector<int>& columns, int neighbors) {
  const auto d = static_cast<Eigen::Index>(columns.size());
  if (d == 0) ThrowInvalid("mahalanobis diagnostic needs at least one column");
  if (samples.cols() != d) ThrowInvalid("sample table must have one column per selected feature");
  if (neighbors < 1 || neighbors > train.rows()) {
    ThrowInvalid("neighbor count must lie in [1, training rows]");
  }
  std::vector<int> all(train.rows());
  std::iota(all.begin(), all.end(), 0);
  const Table ref = GatherRows(train, all, columns);
  bool ridge = false;
  const Eigen::MatrixXd l = SafeCholesky(ref.rows() > 1 ? Covariance(ref)
                                                        : Eigen::MatrixXd::Identity(d, d),
                                         &ridge);
  // Whiten both tables so distances become Euclidean.
  const auto lower = l.triangularView<Eigen::Lower>();
  const Eigen::MatrixXd white_ref = lower.solve(ref.transpose());
  const Eigen::MatrixXd white_smp = lower.solve(samples.transpose());

  std::vector<double> out(samples.rows());
  std::vector<double> dist(ref.rows());
  for (Eigen::Index s = 0; s < samples.rows(); ++s) {
    for (Eigen::Index r = 0; r < ref.rows(); ++r) {
      dist[r] = (white_ref.col(r) - white_smp.col(s)).norm();
    }
    std::partial_sort(dist.begin(), dist.begin() + neighbors, dist.end());
    out[s] = std::accumulate(dist.begin(), dist.begin() + neighbors, 0.0) / neighbors;
  }
  return out;
}

}  // namespace vineshap
