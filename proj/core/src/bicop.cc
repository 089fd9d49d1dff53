#include "vineshap/bicop.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "vineshap/error.h"
#include "vineshap/kendall.h"
#include "vineshap/normal.h"
#include "vineshap/rng.h"

namespace vineshap {
namespace {

constexpr double kMaxRho = 0.9999;
constexpr double kMinTheta = 1e-4;
constexpr double kMaxTheta = 50.0;

double Clamp01(double x) { return std::clamp(x, kBoundaryEps, 1.0 - kBoundaryEps); }

// log(1 + e^z) without overflow.
double Softplus(double z) { return z > 35.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// log(a^-theta + b^-theta - 1) for a, b in (0, 1).
double ClaytonLogSum(double theta, double log_a, double log_b) {
  const double xa = -theta * log_a;
  const double xb = -theta * log_b;
  const double m = std::max(xa, xb);
  if (m < 30.0) return std::log1p(std::expm1(xa) + std::expm1(xb));
  return m + std::log(std::exp(xa - m) + std::exp(xb - m) - std::exp(-m));
}

// log(e^x - 1) for x > 0.
double LogExpm1(double x) { return x > 1.0 ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x)); }

// Keeps both tails of a probability strictly positive.
constexpr double kTailFloor = 1e-300;
TailProb Floor(TailProb x) { return {std::max(x.p, kTailFloor), std::max(x.q, kTailFloor)}; }

// log p, using whichever of p and q is more accurate.
double LogP(TailProb x) { return x.p <= 0.5 ? std::log(x.p) : std::log1p(-x.q); }

// Normal score of a probability.
double Score(TailProb x) { return x.p <= 0.5 ? NormQuantile(x.p) : -NormQuantile(x.q); }
TailProb FromScore(double z) { return {NormCdf(z), NormCdf(-z)}; }

// The probability with log p = lp <= 0.
TailProb FromLog(double lp) {
  lp = std::min(lp, 0.0);
  return {std::exp(lp), -std::expm1(lp)};
}

int SwappedRotation(int rotation) {
  switch (rotation) {
    case 90:
      return 270;
    case 270:
      return 90;
    default:
      return rotation;
  }
}

double GoldenSectionMax(double lo, double hi, const auto& f) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 80 && b - a > 1e-9; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::string FamilyName(CopulaFamily family) {
  switch (family) {
    case CopulaFamily::kIndependence:
      return "independence";
    case CopulaFamily::kGaussian:
      return "gaussian";
    case CopulaFamily::kClayton:
      return "clayton";
    case CopulaFamily::kGrid:
      return "grid";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// GridDensity

GridDensity::GridDensity(int grid_size, std::vector<double> values)
    : size_(grid_size), values_(std::move(values)) {
  if (size_ < 2) ThrowInvalid("grid size must be at least 2");
  if (values_.size() != static_cast<std::size_t>(size_) * size_) {
    ThrowInvalid("grid payload has " + std::to_string(values_.size()) + " values, expected " +
                 std::to_string(size_ * size_));
  }
  double sum = 0.0;
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) ThrowInvalid("grid density values must be finite and >= 0");
    sum += v;
  }
  // Every knot carries weight 1/G along each axis under the interpolant.
  const double integral = sum / (static_cast<double>(size_) * size_);
  if (!(integral > 0.0)) ThrowInvalid("grid density integrates to zero");
  for (double& v : values_) v /= integral;

  const int g = size_;
  std::vector<double> by_v(values_.size()), by_u(values_.size());
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      by_v[j * g + i] = values_[i * g + j];
      by_u[i * g + j] = values_[i * g + j];
    }
  }
  given_second_ = BuildSlices(by_v, g);
  given_first_ = BuildSlices(by_u, g);
}

GridDensity::Slices GridDensity::BuildSlices(const std::vector<double>& by_slice, int g) {
  Slices s;
  s.density = by_slice;
  s.cumulative.assign(static_cast<std::size_t>(g) * (g + 1), 0.0);
  const double step = 1.0 / g;
  for (int k = 0; k < g; ++k) {
    const double* d = &by_slice[static_cast<std::size_t>(k) * g];
    double* c = &s.cumulative[static_cast<std::size_t>(k) * (g + 1)];
    c[0] = d[0] * 0.5 * step;
    for (int i = 1; i < g; ++i) c[i] = c[i - 1] + 0.5 * (d[i - 1] + d[i]) * step;
    c[g] = c[g - 1] + d[g - 1] * 0.5 * step;
  }
  return s;
}

namespace {

// Interpolation position of x among knots (i + 0.5)/g.
struct Bracket {
  int lo;
  int hi;
  double weight;  // weight on hi
};

Bracket Locate(double x, int g) {
  const double t = x * g - 0.5;
  if (t <= 0.0) return {0, 0, 0.0};
  if (t >= g - 1) return {g - 1, g - 1, 0.0};
  const int lo = static_cast<int>(std::floor(t));
  return {lo, lo + 1, t - lo};
}

}  // namespace

double GridDensity::Density(double u, double v) const {
  u = Clamp01(u);
  v = Clamp01(v);
  const int g = size_;
  const Bracket bu = Locate(u, g), bv = Locate(v, g);
  auto at = [&](int i, int j) { return values_[static_cast<std::size_t>(i) * g + j]; };
  const double lo = (1.0 - bv.weight) * at(bu.lo, bv.lo) + bv.weight * at(bu.lo, bv.hi);
  const double hi = (1.0 - bv.weight) * at(bu.hi, bv.lo) + bv.weight * at(bu.hi, bv.hi);
  return (1.0 - bu.weight) * lo + bu.weight * hi;
}

double GridDensity::TrapezoidIntegral() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum / (static_cast<double>(size_) * size_);
}

double GridDensity::SliceCdf(const Slices& s, double x, double given) const {
  const int g = size_;
  const Bracket b = Locate(given, g);
  const double w0 = 1.0 - b.weight, w1 = b.weight;
  const double* d0 = &s.density[static_cast<std::size_t>(b.lo) * g];
  const double* d1 = &s.density[static_cast<std::size_t>(b.hi) * g];
  const double* c0 = &s.cumulative[static_cast<std::size_t>(b.lo) * (g + 1)];
  const double* c1 = &s.cumulative[static_cast<std::size_t>(b.hi) * (g + 1)];
  auto dens = [&](int i) { return w0 * d0[i] + w1 * d1[i]; };
  auto cum = [&](int i) { return w0 * c0[i] + w1 * c1[i]; };

  const double step = 1.0 / g;
  const double p = x * g - 0.5;
  double integral;
  if (p <= 0.0) {
    integral = x * dens(0);
  } else if (p >= g - 1) {
    integral = cum(g - 1) + (x - (g - 0.5) * step) * dens(g - 1);
  } else {
    const int k = static_cast<int>(std::floor(p));
    const double t = x - (k + 0.5) * step;
    const double slope = (dens(k + 1) - dens(k)) * g;
    integral = cum(k) + dens(k) * t + 0.5 * slope * t * t;
  }
  return std::clamp(integral / cum(g), 0.0, 1.0);
}

double GridDensity::SliceQuantile(const Slices& s, double w, double given) const {
  const int g = size_;
  const Bracket b = Locate(given, g);
  const double w0 = 1.0 - b.weight, w1 = b.weight;
  const double* d0 = &s.density[static_cast<std::size_t>(b.lo) * g];
  const double* d1 = &s.density[static_cast<std::size_t>(b.hi) * g];
  const double* c0 = &s.cumulative[static_cast<std::size_t>(b.lo) * (g + 1)];
  const double* c1 = &s.cumulative[static_cast<std::size_t>(b.hi) * (g + 1)];
  auto dens = [&](int i) { return w0 * d0[i] + w1 * d1[i]; };
  auto cum = [&](int i) { return w0 * c0[i] + w1 * c1[i]; };

  const double step = 1.0 / g;
  const double target = w * cum(g);
  double x;
  if (target <= cum(0)) {
    const double d = dens(0);
    x = d > 0.0 ? target / d : 0.5 * step;
  } else if (target >= cum(g - 1)) {
    const double d = dens(g - 1);
    x = (g - 0.5) * step + (d > 0.0 ? (target - cum(g - 1)) / d : 0.0);
  } else {
    int lo = 0, hi = g - 1;  // cum(lo) <= target < cum(hi)
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      if (cum(mid) <= target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double r = target - cum(lo);
    const double a = dens(lo);
    const double slope = (dens(lo + 1) - a) * g;
    // Solve a t + slope t^2 / 2 = r for the root in [0, step].
    const double disc = std::max(0.0, a * a + 2.0 * slope * r);
    const double denom = a + std::sqrt(disc);
    const double t = denom > 0.0 ? 2.0 * r / denom : 0.0;
    x = (lo + 0.5) * step + std::clamp(t, 0.0, step);
  }
  return Clamp01(x);
}

double GridDensity::CondCdfGivenSecond(double u, double v) const {
  return SliceCdf(given_second_, Clamp01(u), Clamp01(v));
}

double GridDensity::CondCdfGivenFirst(double v, double u) const {
  return SliceCdf(given_first_, Clamp01(v), Clamp01(u));
}

double GridDensity::CondQuantileGivenSecond(double w, double v) const {
  return SliceQuantile(given_second_, std::clamp(w, 0.0, 1.0), Clamp01(v));
}

double GridDensity::CondQuantileGivenFirst(double w, double u) const {
  return SliceQuantile(given_first_, std::clamp(w, 0.0, 1.0), Clamp01(u));
}

GridDensity GridDensity::Transposed() const {
  const int g = size_;
  std::vector<double> t(values_.size());
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) t[j * g + i] = values_[i * g + j];
  }
  return GridDensity(g, std::move(t));
}

// ---------------------------------------------------------------------------
// PairCopula

PairCopula PairCopula::Independence() {
  return PairCopula(CopulaFamily::kIndependence, 0.0, 0, nullptr);
}

PairCopula PairCopula::Gaussian(double rho) {
  if (!(rho > -1.0 && rho < 1.0)) ThrowInvalid("gaussian rho must lie in (-1,1)");
  return PairCopula(CopulaFamily::kGaussian, rho, 0, nullptr);
}

PairCopula PairCopula::Clayton(double theta, int rotation) {
  if (!(theta > 0.0) || !std::isfinite(theta)) ThrowInvalid("clayton theta must be > 0");
  if (rotation != 0 && rotation != 90 && rotation != 180 && rotation != 270) {
    ThrowInvalid("rotation must be one of 0, 90, 180, 270");
  }
  return PairCopula(CopulaFamily::kClayton, theta, rotation, nullptr);
}

PairCopula PairCopula::Grid(GridDensity grid) {
  return PairCopula(CopulaFamily::kGrid, 0.0, 0,
                    std::make_shared<const GridDensity>(std::move(grid)));
}

int PairCopula::num_parameters() const {
  switch (family_) {
    case CopulaFamily::kIndependence:
      return 0;
    case CopulaFamily::kGaussian:
    case CopulaFamily::kClayton:
      return 1;
    case CopulaFamily::kGrid:
      return grid_->grid_size() * grid_->grid_size();
  }
  return 0;
}

TailProb PairCopula::BaseH(TailProb a, TailProb b) const {
  switch (family_) {
    case CopulaFamily::kIndependence:
      return a;
    case CopulaFamily::kGaussian: {
      const double rho = parameter_;
      return FromScore((Score(a) - rho * Score(b)) / std::sqrt(1.0 - rho * rho));
    }
    case CopulaFamily::kClayton: {
      const double theta = parameter_;
      // (1 + (a^(-theta) - 1) b^theta)^(-(1+1/theta))
      const double z = LogExpm1(-theta * LogP(a)) + theta * LogP(b);
      return FromLog(-(1.0 + 1.0 / theta) * Softplus(z));
    }
    case CopulaFamily::kGrid:
      break;
  }
  return a;
}

TailProb PairCopula::BaseHInv(TailProb w, TailProb b) const {
  switch (family_) {
    case CopulaFamily::kIndependence:
      return w;
    case CopulaFamily::kGaussian: {
      const double rho = parameter_;
      return FromScore(std::sqrt(1.0 - rho * rho) * Score(w) + rho * Score(b));
    }
    case CopulaFamily::kClayton: {
      const double theta = parameter_;
      // a = ((w^(-theta/(1+theta)) - 1) b^(-theta) + 1)^(-1/theta)
      const double z = LogExpm1(-theta / (1.0 + theta) * LogP(w)) - theta * LogP(b);
      return FromLog(-Softplus(z) / theta);
    }
    case CopulaFamily::kGrid:
      break;
  }
  return w;
}

double PairCopula::BaseLogDensity(TailProb a, TailProb b) const {
  switch (family_) {
    case CopulaFamily::kIndependence:
      return 0.0;
    case CopulaFamily::kGaussian: {
      const double rho = parameter_;
      const double x = Score(a), y = Score(b);
      const double one_minus = 1.0 - rho * rho;
      return -0.5 * std::log(one_minus) -
             (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * one_minus);
    }
    case CopulaFamily::kClayton: {
      const double theta = parameter_;
      const double la = LogP(a), lb = LogP(b);
      return std::log1p(theta) - (1.0 + theta) * (la + lb) -
             (2.0 + 1.0 / theta) * ClaytonLogSum(theta, la, lb);
    }
    case CopulaFamily::kGrid:
      break;
  }
  return 0.0;
}

double PairCopula::LogDensity(TailProb u, TailProb v) const {
  u = Floor(u);
  v = Floor(v);
  if (family_ == CopulaFamily::kGrid) return std::log(grid_->Density(u.p, v.p));
  switch (rotation_) {
    case 90:
      return BaseLogDensity(u.Complement(), v);
    case 180:
      return BaseLogDensity(u.Complement(), v.Complement());
    case 270:
      return BaseLogDensity(u, v.Complement());
    default:
      return BaseLogDensity(u, v);
  }
}

double PairCopula::LogDensity(double u, double v) const {
  return LogDensity(TailProb::Of(Clamp01(u)), TailProb::Of(Clamp01(v)));
}

double PairCopula::Density(double u, double v) const { return std::exp(LogDensity(u, v)); }

TailProb PairCopula::HFunc(TailProb free, TailProb given, CondOn on) const {
  free = Floor(free);
  given = Floor(given);
  if (family_ == CopulaFamily::kGrid) {
    return TailProb::Of(on == CondOn::kSecond ? grid_->CondCdfGivenSecond(free.p, given.p)
                                              : grid_->CondCdfGivenFirst(free.p, given.p));
  }
  // Conditioning on the first argument is conditioning on the second argument
  // of the swapped copula; the base families are exchangeable.
  const int rot = on == CondOn::kSecond ? rotation_ : SwappedRotation(rotation_);
  switch (rot) {
    case 90:
      return BaseH(free.Complement(), given).Complement();
    case 180:
      return BaseH(free.Complement(), given.Complement()).Complement();
    case 270:
      return BaseH(free, given.Complement());
    default:
      return BaseH(free, given);
  }
}

double PairCopula::HFunc(double free, double given, CondOn on) const {
  return HFunc(TailProb::Of(Clamp01(free)), TailProb::Of(Clamp01(given)), on).p;
}

TailProb PairCopula::HInv(TailProb w, TailProb given, CondOn on) const {
  w = Floor(w);
  given = Floor(given);
  if (family_ == CopulaFamily::kGrid) {
    return TailProb::Of(on == CondOn::kSecond ? grid_->CondQuantileGivenSecond(w.p, given.p)
                                              : grid_->CondQuantileGivenFirst(w.p, given.p));
  }
  const int rot = on == CondOn::kSecond ? rotation_ : SwappedRotation(rotation_);
  switch (rot) {
    case 90:
      return BaseHInv(w.Complement(), given).Complement();
    case 180:
      return BaseHInv(w.Complement(), given.Complement()).Complement();
    case 270:
      return BaseHInv(w, given.Complement());
    default:
      return BaseHInv(w, given);
  }
}

double PairCopula::HInv(double w, double given, CondOn on) const {
  // w is a probability level, not a copula coordinate, so interior values
  // such as 1e-12 are left alone.
  return Clamp01(HInv(TailProb::Of(w), TailProb::Of(Clamp01(given)), on).p);
}

PairCopula PairCopula::Swapped() const {
  if (family_ == CopulaFamily::kGrid) return Grid(grid_->Transposed());
  return PairCopula(family_, parameter_, SwappedRotation(rotation_), nullptr);
}

double PairCopula::KendallTau() const {
  switch (family_) {
    case CopulaFamily::kIndependence:
      return 0.0;
    case CopulaFamily::kGaussian:
      return 2.0 / std::numbers::pi * std::asin(parameter_);
    case CopulaFamily::kClayton: {
      const double tau = parameter_ / (parameter_ + 2.0);
      return (rotation_ == 90 || rotation_ == 270) ? -tau : tau;
    }
    case CopulaFamily::kGrid:
      break;
  }
  throw Error(ErrorKind::kInvalidInput, "Kendall's tau is not available for grid copulas");
}

std::vector<double> PairCopula::Simulate(int n, Rng& rng) const {
  std::vector<double> out(2 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double u = rng.Uniform();
    const double w = rng.Uniform();
    out[2 * i] = u;
    out[2 * i + 1] = HInv(w, u, CondOn::kFirst);
  }
  return out;
}

std::string PairCopula::Describe() const {
  std::ostringstream os;
  os << FamilyName(family_);
  switch (family_) {
    case CopulaFamily::kGaussian:
      os << "(rho=" << parameter_ << ")";
      break;
    case CopulaFamily::kClayton:
      os << "(theta=" << parameter_ << ", rot=" << rotation_ << ")";
      break;
    case CopulaFamily::kGrid:
      os << "(" << grid_->grid_size() << "x" << grid_->grid_size() << ")";
      break;
    default:
      break;
  }
  return os.str();
}

bool operator==(const PairCopula& a, const PairCopula& b) {
  if (a.family_ != b.family_ || a.parameter_ != b.parameter_ || a.rotation_ != b.rotation_) {
    return false;
  }
  if (a.family_ != CopulaFamily::kGrid) return true;
  return a.grid_->grid_size() == b.grid_->grid_size() && a.grid_->values() == b.grid_->values();
}

// ---------------------------------------------------------------------------
// Fitting

namespace {

double LogLik(const PairCopula& pc, std::span<const double> u, std::span<const double> v) {
  double ll = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) ll += pc.LogDensity(u[i], v[i]);
  return ll;
}

bool IsConstant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double a) { return a == x[0]; });
}

}  // namespace

PairCopula FitParametric(std::span<const double> u, std::span<const double> v,
                         const ParametricOptions& options, FitInfo* info) {
  if (u.size() != v.size()) ThrowInvalid("pair copula fit: column length mismatch");
  if (u.size() < 10) {
    ThrowInvalid("pair copula fit needs at least 10 observations, got " + std::to_string(u.size()));
  }
  FitInfo local;
  FitInfo& out = info ? *info : local;
  out = FitInfo{};

  if (IsConstant(u) || IsConstant(v)) {
    out.degenerate = true;
    return PairCopula::Independence();
  }
  const double tau = KendallTau(u, v);
  out.tau = tau;
  if (std::abs(tau) < options.independence_tau && options.allow_independence) {
    return PairCopula::Independence();
  }

  struct Candidate {
    PairCopula copula;
    double ll;
    double aic;
  };
  std::vector<Candidate> candidates;
  auto add = [&](const PairCopula& pc) {
    const double ll = LogLik(pc, u, v);
    candidates.push_back({pc, ll, -2.0 * ll + 2.0 * pc.num_parameters()});
  };

  if (options.allow_independence) candidates.push_back({PairCopula::Independence(), 0.0, 0.0});
  if (options.allow_gaussian) {
    double rho = std::clamp(std::sin(std::numbers::pi * tau / 2.0), -kMaxRho, kMaxRho);
    if (options.refine_mle) {
      rho = GoldenSectionMax(std::max(-kMaxRho, rho - 0.2), std::min(kMaxRho, rho + 0.2),
                             [&](double r) { return LogLik(PairCopula::Gaussian(r), u, v); });
    }
    add(PairCopula::Gaussian(rho));
  }
  if (options.allow_clayton) {
    const double abs_tau = std::min(std::abs(tau), 0.96);
    double theta = std::clamp(2.0 * abs_tau / (1.0 - abs_tau), kMinTheta, kMaxTheta);
    const int rotations[2] = {tau >= 0.0 ? 0 : 90, tau >= 0.0 ? 180 : 270};
    for (int rot : rotations) {
      double t = theta;
      if (options.refine_mle) {
        t = GoldenSectionMax(std::max(kMinTheta, 0.5 * theta), std::min(kMaxTheta, 2.0 * theta + 0.1),
                             [&](double th) { return LogLik(PairCopula::Clayton(th, rot), u, v); });
      }
      add(PairCopula::Clayton(t, rot));
    }
  }
  if (candidates.empty()) ThrowInvalid("pair copula fit: empty family set");

  const auto best = std::min_element(candidates.begin(), candidates.end(),
                                     [](const Candidate& a, const Candidate& b) { return a.aic < b.aic; });
  out.log_likelihood = best->ll;
  out.aic = best->aic;
  return best->copula;
}

PairCopula FitNonparametric(std::span<const double> u, std::span<const double> v, int grid_size) {
  if (u.size() != v.size()) ThrowInvalid("pair copula fit: column length mismatch");
  const auto n = static_cast<Eigen::Index>(u.size());
  if (n < 30) {
    ThrowInvalid("nonparametric pair copula fit needs at least 30 observations, got " +
                 std::to_string(n));
  }
  if (grid_size < 2) ThrowInvalid("grid size must be at least 2");

  Eigen::VectorXd z1(n), z2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    z1[i] = NormQuantile(Clamp01(u[i]));
    z2[i] = NormQuantile(Clamp01(v[i]));
  }
  auto sd = [&](const Eigen::VectorXd& z) {
    const double mean = z.mean();
    return std::sqrt((z.array() - mean).square().sum() / static_cast<double>(n - 1));
  };
  const double scale = std::pow(static_cast<double>(n), -1.0 / 6.0);
  const double h1 = sd(z1) * scale, h2 = sd(z2) * scale;
  if (!(h1 > 0.0) || !(h2 > 0.0)) ThrowInvalid("nonparametric pair copula fit: constant column");

  const int g = grid_size;
  Eigen::VectorXd knots(g);
  for (int i = 0; i < g; ++i) knots[i] = NormQuantile((i + 0.5) / g);

  // Separable product kernel: f(q_i, q_j) = mean_n K1(i, n) K2(j, n).
  Eigen::MatrixXd k1(g, n), k2(g, n);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (int i = 0; i < g; ++i) {
      k1(i, s) = NormPdf((knots[i] - z1[s]) / h1) / h1;
      k2(i, s) = NormPdf((knots[i] - z2[s]) / h2) / h2;
    }
  }
  const Eigen::MatrixXd joint = (k1 * k2.transpose()) / static_cast<double>(n);

  std::vector<double> values(static_cast<std::size_t>(g) * g);
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      values[i * g + j] = joint(i, j) / (NormPdf(knots[i]) * NormPdf(knots[j]));
    }
  }
  return PairCopula::Grid(GridDensity(g, std::move(values)));
}

}  // namespace vineshap
