#ifndef VINESHAP_BICOP_H_
#define VINESHAP_BICOP_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace vineshap {

class Rng;

enum class CopulaFamily { kIndependence, kGaussian, kClayton, kGrid };

// Which copula argument the h-function conditions on.
enum class CondOn { kFirst, kSecond };

std::string FamilyName(CopulaFamily family);

// Density table of a nonparametric pair copula on the G x G mesh with knots at
// (i + 0.5) / G. Between knots the density is bilinear, outside the outermost
// knots it is held constant, so one-dimensional integrals along either axis
// are exact for the interpolant.
class GridDensity {
 public:
  // values[i * G + j] is the density at (knot_i, knot_j); i runs along the
  // first argument. Values are rescaled so the interpolant integrates to 1.
  GridDensity(int grid_size, std::vector<double> values);

  int grid_size() const { return size_; }
  const std::vector<double>& values() const { return values_; }

  double Density(double u, double v) const;
  // Integral of the density over (0,1)^2 by the trapezoid rule on the knots.
  double TrapezoidIntegral() const;
  // F(u | v): conditional cdf of the first argument given the second.
  double CondCdfGivenSecond(double u, double v) const;
  double CondCdfGivenFirst(double v, double u) const;
  double CondQuantileGivenSecond(double w, double v) const;
  double CondQuantileGivenFirst(double w, double u) const;
  // Density table of (V, U).
  GridDensity Transposed() const;

 private:
  // Cumulative integrals along one axis for every knot of the other axis.
  struct Slices {
    // density[s * G + i]: density along the free axis at knot i for slice s.
    std::vector<double> density;
    // cumulative[s * (G + 1) + i]: integral from 0 to knot i; the final entry
    // is the integral up to 1.
    std::vector<double> cumulative;
  };
  static Slices BuildSlices(const std::vector<double>& by_slice, int g);
  double SliceCdf(const Slices& s, double x, double given) const;
  double SliceQuantile(const Slices& s, double w, double given) const;

  int size_;
  std::vector<double> values_;
  Slices given_second_;
  Slices given_first_;
};

// A probability together with its complement. Vine recursions pass these
// between trees so that values near 1 keep their precision in q.
struct TailProb {
  double p = 0.5;
  double q = 0.5;  // 1 - p

  static TailProb Of(double x) { return {x, 1.0 - x}; }
  TailProb Complement() const { return {q, p}; }
};

// A bivariate copula: independence, Gaussian, Clayton with one of four
// rotations (0, 90, 180, 270 degrees), or a nonparametric grid.
// Immutable; copies are cheap.
class PairCopula {
 public:
  static PairCopula Independence();
  static PairCopula Gaussian(double rho);
  static PairCopula Clayton(double theta, int rotation = 0);
  static PairCopula Grid(GridDensity grid);

  PairCopula() : PairCopula(Independence()) {}

  CopulaFamily family() const { return family_; }
  double parameter() const { return parameter_; }
  int rotation() const { return rotation_; }
  int num_parameters() const;
  const GridDensity* grid() const { return grid_.get(); }

  double Density(double u, double v) const;
  double LogDensity(double u, double v) const;

  // Conditional cdf of the free variable given the conditioning value:
  //   HFunc(u, v, kSecond) = dC(u, v)/dv = F(u | v)
  //   HFunc(v, u, kFirst)  = dC(u, v)/du = F(v | u)
  double HFunc(double free, double given, CondOn on) const;
  // Inverse of HFunc in its first argument.
  double HInv(double w, double given, CondOn on) const;

  // Tail-accurate forms. Inputs are only kept away from 0 and 1 by a floor
  // near the smallest double rather than by kBoundaryEps.
  double LogDensity(TailProb u, TailProb v) const;
  TailProb HFunc(TailProb free, TailProb given, CondOn on) const;
  TailProb HInv(TailProb w, TailProb given, CondOn on) const;

  // F(v | u) and F(u | v) in copula argument order.
  double H1(double u, double v) const { return HFunc(v, u, CondOn::kFirst); }
  double H2(double u, double v) const { return HFunc(u, v, CondOn::kSecond); }

  // The copula of (V, U).
  PairCopula Swapped() const;

  // Population Kendall's tau; parametric families only.
  double KendallTau() const;

  // Draws n pairs; returns them interleaved (u0, v0, u1, v1, ...).
  std::vector<double> Simulate(int n, Rng& rng) const;

  std::string Describe() const;

  friend bool operator==(const PairCopula& a, const PairCopula& b);

 private:
  PairCopula(CopulaFamily family, double parameter, int rotation,
             std::shared_ptr<const GridDensity> grid)
      : family_(family), parameter_(parameter), rotation_(rotation), grid_(std::move(grid)) {}

  // Unrotated h-function dC(a, b)/db and its inverse in a.
  TailProb BaseH(TailProb a, TailProb b) const;
  TailProb BaseHInv(TailProb w, TailProb b) const;
  double BaseLogDensity(TailProb a, TailProb b) const;

  CopulaFamily family_;
  double parameter_;
  int rotation_;
  std::shared_ptr<const GridDensity> grid_;
};

// Inputs on the copula scale are clamped to [kBoundaryEps, 1 - kBoundaryEps].
inline constexpr double kBoundaryEps = 1e-10;

struct ParametricOptions {
  bool allow_independence = true;
  bool allow_gaussian = true;
  bool allow_clayton = true;
  // Refine the tau-inversion estimate with a golden-section likelihood search.
  bool refine_mle = false;
  // |tau| below this threshold selects independence.
  double independence_tau = 0.02;
};

struct FitInfo {
  double tau = 0.0;
  double log_likelihood = 0.0;
  double aic = 0.0;
  // Set when a column is constant and independence was forced.
  bool degenerate = false;
};

// Kendall's tau inversion per candidate family, then minimum-AIC selection.
// Clayton rotations are restricted to the quadrant of tau and the better of
// the two tail orientations is kept by likelihood.
PairCopula FitParametric(std::span<const double> u, std::span<const double> v,
                         const ParametricOptions& options = {}, FitInfo* info = nullptr);

// Transformation kernel estimator: Gaussian product kernel on normal scores
// with bandwidths sd * N^(-1/6), mapped back to the copula scale and tabulated
// on a grid_size x grid_size mesh.
PairCopula FitNonparametric(std::span<const double> u, std::span<const double> v,
                            int grid_size = 64);

}  // namespace vineshap

#endif  // VINESHAP_BICOP_H_
