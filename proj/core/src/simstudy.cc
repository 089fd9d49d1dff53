#include "vineshap/simstudy.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "vineshap/bundle.h"
#include "vineshap/error.h"
#include "vineshap/rng.h"
#include "vineshap/serialize.h"

namespace vineshap {
namespace {

constexpr double kExpSlope = 1.8;

// Indices of one response term; size 1, 2, 3 or 4.
using Term = std::vector<int>;

std::vector<Term> ResponseTerms(int dim) {
  if (dim < 1 || dim > 10) ThrowInvalid("the response model is defined for 1 to 10 features");
  std::vector<Term> terms;
  int q = 0;
  for (; q + 4 <= dim; q += 4) terms.push_back({q, q + 1, q + 2, q + 3});
  Term rest;
  for (; q < dim; ++q) rest.push_back(q);
  if (!rest.empty()) terms.push_back(rest);
  return terms;
}

double TermValue(const Term& t, const std::vector<double>& u) {
  switch (t.size()) {
    case 1:
      return u[t[0]];
    case 2:
      return u[t[0]] * std::exp(kExpSlope * u[t[1]]);
    case 3:
      return u[t[0]] * u[t[1]] * std::exp(kExpSlope * u[t[2]]);
    default:
      return u[t[0]] * u[t[1]] * std::exp(kExpSlope * u[t[2]] * u[t[3]]);
  }
}

// With `strict`, points outside the support are rejected; otherwise
// F_m(x) = 0 for x <= 0 keeps the predictor total.
std::vector<double> ToUniform(const BurrParams& params, std::span<const double> x, bool strict) {
  if (static_cast<int>(x.size()) != params.dim()) ThrowInvalid("point has the wrong dimension");
  std::vector<double> u(x.size());
  for (int m = 0; m < params.dim(); ++m) {
    if (!std::isfinite(x[m]) || (strict && !(x[m] >= 0.0))) {
      ThrowInvalid("point lies outside the Burr support");
    }
    u[m] = BurrMarginalCdf(params, m, x[m]);
  }
  return u;
}

double NoiseFactor(const std::vector<Term>& terms, const std::vector<double>& u) {
  double s = 0.0;
  for (const Term& t : terms) s += u[t[0]];
  return s;
}

// Mean accumulated around the first value; exact for constant input.
double PivotMean(const std::vector<double>& y) {
  const double inv = 1.0 / static_cast<double>(y.size());
  double mean = 0.0;
  for (double v : y) mean += (v - y[0]) * inv;
  return mean + y[0];
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

void BurrParams::Validate() const {
  if (!(p > 0.0) || !std::isfinite(p)) ThrowInvalid("Burr p must be positive");
  if (b.empty()) ThrowInvalid("Burr parameters need at least one dimension");
  if (b.size() != r.size()) ThrowInvalid("Burr b and r vectors differ in length");
  for (std::size_t m = 0; m < b.size(); ++m) {
    if (!(b[m] > 0.0) || !(r[m] > 0.0) || !std::isfinite(b[m]) || !std::isfinite(r[m])) {
      ThrowInvalid("Burr b and r entries must be positive and finite");
    }
  }
}

BurrParams BurrParams::Standard(double p, int dim) {
  static const double kB[] = {2, 4, 6, 2, 4, 6, 2, 4, 6, 6};
  static const double kR[] = {1, 3, 5, 1, 3, 5, 1, 3, 5, 5};
  if (dim < 1 || dim > 10) ThrowInvalid("standard Burr parameters exist for 1 to 10 features");
  BurrParams out;
  out.p = p;
  out.b.assign(kB, kB + dim);
  out.r.assign(kR, kR + dim);
  out.Validate();
  return out;
}

double BurrLogDensity(const BurrParams& params, std::span<const double> x) {
  const int m = params.dim();
  if (static_cast<int>(x.size()) != m) ThrowInvalid("point has the wrong dimension");
  double log_num = std::lgamma(params.p + m) - std::lgamma(params.p);
  double s = 1.0;
  for (int j = 0; j < m; ++j) {
    if (!(x[j] > 0.0)) return -HUGE_VAL;
    log_num += std::log(params.b[j] * params.r[j]) + (params.b[j] - 1.0) * std::log(x[j]);
    s += params.r[j] * std::pow(x[j], params.b[j]);
  }
  return log_num - (params.p + m) * std::log(s);
}

double BurrDensity(const BurrParams& params, std::span<const double> x) {
  return std::exp(BurrLogDensity(params, x));
}

double BurrMarginalCdf(const BurrParams& params, int m, double x) {
  if (x <= 0.0) return 0.0;
  // 1 - (1 + t)^(-p) with t = r x^b, computed without cancellation.
  const double t = params.r[m] * std::pow(x, params.b[m]);
  return -std::expm1(-params.p * std::log1p(t));
}

Table BurrSample(const BurrParams& params, int n, Rng& rng) {
  params.Validate();
  if (n < 0) ThrowInvalid("sample size must be non-negative");
  const int m = params.dim();
  Table out(n, m);
  for (int i = 0; i < n; ++i) {
    const double g = rng.Gamma(params.p);
    for (int j = 0; j < m; ++j) {
      out(i, j) = std::pow(rng.Exponential() / (g * params.r[j]), 1.0 / params.b[j]);
    }
  }
  return out;
}

BurrParams BurrConditionalParams(const BurrParams& params, const Coalition& s,
                                 std::span<const double> x_star) {
  const int m = params.dim();
  if (s.dim() != m || s.empty() || s.size() == m) {
    throw Error(ErrorKind::kUnsupportedCoalition, "conditioning set must be proper and non-empty");
  }
  if (static_cast<int>(x_star.size()) != m) ThrowInvalid("conditioning vector has wrong length");
  double denom = 1.0;
  for (int j : s.members()) {
    if (!(x_star[j] >= 0.0)) ThrowInvalid("conditioning value outside the Burr support");
    denom += params.r[j] * std::pow(x_star[j], params.b[j]);
  }
  BurrParams out;
  out.p = params.p + s.size();
  for (int j : s.complement().members()) {
    out.b.push_back(params.b[j]);
    out.r.push_back(params.r[j] / denom);
  }
  return out;
}

Table BurrConditionalSample(const BurrParams& params, const Coalition& s,
                            std::span<const double> x_star, int k, Rng& rng) {
  return BurrSample(BurrConditionalParams(params, s, x_star), k, rng);
}

std::vector<PairCopula> BurrTruthCopulas(double p, int dim) {
  std::vector<PairCopula> out;
  for (int t = 0; t + 1 < std::max(dim, 2); ++t) out.push_back(PairCopula::Clayton(1.0 / (p + t), 180));
  return out;
}

double ResponseMean(const BurrParams& params, std::span<const double> x) {
  const std::vector<double> u = ToUniform(params, x, false);
  double y = 0.0;
  for (const Term& t : ResponseTerms(params.dim())) y += TermValue(t, u);
  return y;
}

double GenerateResponse(const BurrParams& params, std::span<const double> x,
                        const ResponseConfig& noise, Rng& rng) {
  if (!(noise.noise_scale >= 0.0)) ThrowInvalid("noise scale must be non-negative");
  const std::vector<double> u = ToUniform(params, x, true);
  const std::vector<Term> terms = ResponseTerms(params.dim());
  double y = 0.0;
  for (const Term& t : terms) y += TermValue(t, u);
  if (noise.noise_scale > 0.0) y += noise.noise_scale * NoiseFactor(terms, u) * rng.Normal();
  return y;
}

std::string ResponseFormula(int dim, double noise_scale) {
  auto u = [](int j) { return "u" + std::to_string(j + 1); };
  std::string out = "y =";
  std::string noise;
  bool first = true;
  for (const Term& t : ResponseTerms(dim)) {
    out += first ? " " : " + ";
    first = false;
    switch (t.size()) {
      case 1:
        out += u(t[0]);
        break;
      case 2:
        out += u(t[0]) + "*exp(1.8*" + u(t[1]) + ")";
        break;
      case 3:
        out += u(t[0]) + "*" + u(t[1]) + "*exp(1.8*" + u(t[2]) + ")";
        break;
      default:
        out += u(t[0]) + "*" + u(t[1]) + "*exp(1.8*" + u(t[2]) + "*" + u(t[3]) + ")";
    }
    noise += (noise.empty() ? "" : "+") + u(t[0]);
  }
  return out + " + " + FormatDouble(noise_scale) + "*(" + noise + ")*eps";
}

Predictor AnalyticMeanPredictor(const BurrParams& params) {
  params.Validate();
  ResponseTerms(params.dim());
  return Predictor::Pointwise([params](std::span<const double> x) { return ResponseMean(params, x); });
}

Predictor KnnPredictor(const Table& x, std::vector<double> y, int k) {
  const Eigen::Index n = x.rows();
  if (n < 1 || static_cast<Eigen::Index>(y.size()) != n) ThrowInvalid("knn needs matching x and y");
  if (k < 1) ThrowInvalid("knn needs k >= 1");
  k = static_cast<int>(std::min<Eigen::Index>(k, n));
  const Eigen::RowVectorXd mean = x.colwise().mean();
  Eigen::RowVectorXd sd = ((x.rowwise() - mean).array().square().colwise().sum() /
                           static_cast<double>(std::max<Eigen::Index>(n - 1, 1)))
                              .sqrt();
  for (Eigen::Index j = 0; j < sd.size(); ++j) {
    if (!(sd(j) > 0.0)) sd(j) = 1.0;
  }
  auto ref = std::make_shared<const Table>((x.rowwise() - mean).array().rowwise() / sd.array());
  auto resp = std::make_shared<const std::vector<double>>(std::move(y));
  return Predictor([ref, resp, mean, sd, k](const Table& rows) {
    std::vector<double> out(rows.rows());
    std::vector<std::pair<double, int>> dist(ref->rows());
    Eigen::RowVectorXd q;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      q = (rows.row(i) - mean).array() / sd.array();
      for (Eigen::Index r = 0; r < ref->rows(); ++r) {
        dist[r] = {(ref->row(r) - q).squaredNorm(), static_cast<int>(r)};
      }
      std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
      if (dist[0].first < 1e-24) {
        // Exact matches: plain average of the coinciding rows.
        double sum = 0.0;
        int cnt = 0;
        for (int j = 0; j < k && dist[j].first < 1e-24; ++j, ++cnt) sum += (*resp)[dist[j].second];
        out[i] = sum / cnt;
        continue;
      }
      double wsum = 0.0, ysum = 0.0;
      for (int j = 0; j < k; ++j) {
        const double w = 1.0 / std::sqrt(dist[j].first);
        wsum += w;
        ysum += w * (*resp)[dist[j].second];
      }
      out[i] = ysum / wsum;
    }
    return out;
  });
}

TrueBurrEstimator::TrueBurrEstimator(BurrParams params, Predictor g, int k_oracle,
                                     std::uint64_t seed)
    : params_(std::move(params)), g_(std::move(g)), k_(k_oracle) {
  params_.Validate();
  if (k_ < 1) ThrowInvalid("oracle sample size must be positive");
  Rng rng(DeriveSeed(seed, 0));
  const std::vector<double> y = g_.Batch(BurrSample(params_, k_, rng));
  baseline_ = PivotMean(y);
}

CoalitionValue TrueBurrEstimator::Value(const Coalition& s, std::span<const double> x,
                                        std::uint64_t seed) const {
  Rng rng(DeriveSeed(seed, s.mask() + 1ull));
  const Table free = BurrConditionalSample(params_, s, x, k_, rng);
  const std::vector<double> y = g_.Batch(CombineRows(s, x, free));
  const double n = static_cast<double>(y.size());
  CoalitionValue out;
  out.value = PivotMean(y);
  double ss = 0.0;
  for (double v : y) ss += (v - out.value) * (v - out.value);
  out.std_error = y.size() > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  out.effective_sample_size = n;
  return out;
}

Explanation TrueShapley(const BurrParams& params, const Predictor& g, std::span<const double> x,
                        int k_oracle, std::uint64_t seed, int threads) {
  if (k_oracle < 1000) ThrowInvalid("oracle sample size must be at least 1000");
  const TrueBurrEstimator est(params, g, k_oracle, seed);
  return Shapley(est, x, ShapleyOptions{seed, threads});
}

double MeanAbsoluteError(const Table& estimates, const Table& truths) {
  if (estimates.rows() != truths.rows() || estimates.cols() != truths.cols()) {
    ThrowInvalid("estimate and truth tables differ in shape");
  }
  if (estimates.size() == 0) ThrowInvalid("empty tables");
  return (estimates - truths).cwiseAbs().mean();
}

void ExperimentConfig::Validate() const {
  auto bad = [](const std::string& key, const std::string& why) {
    throw Error(ErrorKind::kUsage, "config key '" + key + "': " + why);
  };
  if (!(p > 0.0) || !std::isfinite(p)) bad("p", "must be positive");
  if (dim < 2 || dim > 10) bad("M", "must lie in [2, 10]");
  if (n_train < 50) bad("n_train", "must be at least 50");
  if (n_test < 1) bad("n_test", "must be at least 1");
  if (repetitions < 1) bad("reps", "must be at least 1");
  if (k < 1) bad("K", "must be at least 1");
  if (k_oracle < 1000) bad("K_oracle", "must be at least 1000");
  if (methods.empty()) bad("methods", "at least one method is required");
  const auto& known = KnownStudyMethods();
  for (const auto& m : methods) {
    if (std::find(known.begin(), known.end(), m) == known.end()) bad("methods", "unknown method '" + m + "'");
  }
  if (predictor != "analytic_mean" && predictor != "knn") bad("predictor", "must be analytic_mean or knn");
  if (knn_k < 1) bad("knn_k", "must be at least 1");
  if (!(noise_scale >= 0.0)) bad("noise_scale", "must be non-negative");
  if (grid_size < 4) bad("grid_size", "must be at least 4");
  if (candidates < 1) bad("candidates", "must be at least 1");
  if (threads < 1) bad("threads", "must be at least 1");
}

ExperimentConfig ExperimentConfig::Parse(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kUsage, "config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    auto num = [&]() {
      try {
        return ParseDouble(value);
      } catch (const Error&) {
        throw Error(ErrorKind::kUsage, "config key '" + key + "': not a number: '" + value + "'");
      }
    };
    auto integer = [&]() {
      try {
        return ParseInt(value);
      } catch (const Error&) {
        throw Error(ErrorKind::kUsage, "config key '" + key + "': not an integer: '" + value + "'");
      }
    };
    if (key == "p") {
      c.p = num();
    } else if (key == "M" || key == "dim") {
      c.dim = integer();
    } else if (key == "n_train") {
      c.n_train = integer();
    } else if (key == "n_test") {
      c.n_test = integer();
    } else if (key == "reps" || key == "repetitions") {
      c.repetitions = integer();
    } else if (key == "K" || key == "k") {
      c.k = integer();
    } else if (key == "K_oracle" || key == "k_oracle") {
      c.k_oracle = integer();
    } else if (key == "methods") {
      c.methods.clear();
      std::istringstream ms(value);
      std::string m;
      while (std::getline(ms, m, ',')) {
        m = Trim(m);
        if (!m.empty()) c.methods.push_back(m);
      }
    } else if (key == "predictor") {
      c.predictor = value;
    } else if (key == "knn_k") {
      c.knn_k = integer();
    } else if (key == "noise_scale") {
      c.noise_scale = num();
    } else if (key == "grid_size") {
      c.grid_size = integer();
    } else if (key == "candidates" || key == "B") {
      c.candidates = integer();
    } else if (key == "seed") {
      try {
        std::size_t used = 0;
        c.seed = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        throw Error(ErrorKind::kUsage, "config key 'seed': not an unsigned integer: '" + value + "'");
      }
    } else if (key == "threads") {
      c.threads = integer();
    } else {
      throw Error(ErrorKind::kUsage, "unknown config key '" + key + "'");
    }
  }
  c.Validate();
  return c;
}

std::string ExperimentConfig::ToText() const {
  std::ostringstream os;
  os << "p=" << FormatDouble(p) << '\n'
     << "M=" << dim << '\n'
     << "n_train=" << n_train << '\n'
     << "n_test=" << n_test << '\n'
     << "reps=" << repetitions << '\n'
     << "K=" << k << '\n'
     << "K_oracle=" << k_oracle << '\n'
     << "methods=";
  for (std::size_t i = 0; i < methods.size(); ++i) os << (i ? "," : "") << methods[i];
  os << '\n'
     << "predictor=" << predictor << '\n'
     << "knn_k=" << knn_k << '\n'
     << "noise_scale=" << FormatDouble(noise_scale) << '\n'
     << "grid_size=" << grid_size << '\n'
     << "candidates=" << candidates << '\n'
     << "seed=" << seed << '\n';
  return os.str();
}

std::unique_ptr<ContributionEstimator> MakeStudyEstimator(const std::string& method,
                                                          std::shared_ptr<const TrainingSet> train,
                                                          const Predictor& g,
                                                          const ExperimentConfig& config,
                                                          std::uint64_t seed) {
  if (method == "independence") return std::make_unique<IndependenceEstimator>(train, g, config.k);
  if (method == "gaussian") return std::make_unique<GaussianEstimator>(train, g, config.k);
  if (method == "gaussian-copula") {
    return std::make_unique<GaussianCopulaEstimator>(train, g, config.k);
  }
  const bool condsim = method.rfind("vine-condsim-", 0) == 0;
  const bool ratio = method.rfind("vine-ratio-", 0) == 0;
  if (!condsim && !ratio) throw Error(ErrorKind::kUsage, "unknown method '" + method + "'");
  const std::string fit = method.substr(condsim ? 13 : 11);
  FitMode mode;
  if (fit == "parametric") {
    mode = ParametricMode{};
  } else if (fit == "nonparametric") {
    mode = NonparametricMode{config.grid_size};
  } else if (fit == "truth") {
    mode = FixedMode{BurrTruthCopulas(config.p, train->dim())};
  } else {
    throw Error(ErrorKind::kUsage, "unknown method '" + method + "'");
  }
  auto vines = FitVineSet(train->pseudo(), train->marginals(),
                          condsim ? ShapMethod::kCondSim : ShapMethod::kRatio, mode,
                          config.candidates, seed, config.threads);
  if (condsim) return std::make_unique<VineCondSimEstimator>(train, vines, g, config.k, method);
  return std::make_unique<VineRatioEstimator>(train, vines, g, config.k, method);
}

std::vector<SummaryRow> Summarize(const std::vector<RepetitionResult>& rows,
                                  const std::vector<std::string>& methods) {
  std::vector<SummaryRow> out;
  for (const auto& m : methods) {
    std::vector<double> v;
    for (const auto& r : rows) {
      if (r.method == m) v.push_back(r.mae);
    }
    SummaryRow s;
    s.method = m;
    s.repetitions = static_cast<int>(v.size());
    if (!v.empty()) {
      const double n = static_cast<double>(v.size());
      s.mean_mae = std::accumulate(v.begin(), v.end(), 0.0) / n;
      double ss = 0.0;
      for (double x : v) ss += (x - s.mean_mae) * (x - s.mean_mae);
      s.std_error = v.size() > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
    }
    out.push_back(s);
  }
  return out;
}

ExperimentReport RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  const BurrParams burr = BurrParams::Standard(config.p, config.dim);
  const int m = config.dim;
  ExperimentReport report;
  for (int rep = 0; rep < config.repetitions; ++rep) {
    const std::uint64_t rs = DeriveSeed(config.seed, static_cast<std::uint64_t>(rep) + 1);
    std::string stage = "sampling";
    std::string method;
    try {
      Rng train_rng(DeriveSeed(rs, 1));
      Table x_train = BurrSample(burr, config.n_train, train_rng);
      Predictor g;
      if (config.predictor == "knn") {
        Rng noise_rng(DeriveSeed(rs, 2));
        std::vector<double> y(config.n_train);
        for (int i = 0; i < config.n_train; ++i) {
          y[i] = GenerateResponse(burr, Row(x_train, i), ResponseConfig{config.noise_scale}, noise_rng);
        }
        g = KnnPredictor(x_train, std::move(y), config.knn_k);
      } else {
        g = AnalyticMeanPredictor(burr);
      }
      Rng test_rng(DeriveSeed(rs, 3));
      const Table x_test = BurrSample(burr, config.n_test, test_rng);

      stage = "oracle";
      Table truth(config.n_test, m);
      for (int i = 0; i < config.n_test; ++i) {
        const Explanation e = TrueShapley(burr, g, Row(x_test, i), config.k_oracle,
                                          DeriveSeed(rs, 6, static_cast<std::uint64_t>(i)),
                                          config.threads);
        for (int j = 0; j < m; ++j) truth(i, j) = e.phi[j];
      }

      auto train = std::make_shared<const TrainingSet>(std::move(x_train), g);
      for (const auto& name : config.methods) {
        method = name;
        stage = "fit";
        const auto start = std::chrono::steady_clock::now();
        const auto est = MakeStudyEstimator(name, train, g, config, DeriveSeed(rs, 4));
        stage = "explain";
        Table phi(config.n_test, m);
        for (int i = 0; i < config.n_test; ++i) {
          const Explanation e =
              Shapley(*est, Row(x_test, i),
                      ShapleyOptions{DeriveSeed(rs, 5, static_cast<std::uint64_t>(i)), config.threads});
          for (int j = 0; j < m; ++j) phi(i, j) = e.phi[j];
        }
        report.rows.push_back({name, rep, MeanAbsoluteError(phi, truth), Seconds(start)});
      }
    } catch (const Error& e) {
      std::string where = "repetition " + std::to_string(rep) + " (" + stage;
      if (!method.empty()) where += ", method " + method;
      throw Error(e.kind(), where + "): " + e.what());
    }
  }
  report.summary = Summarize(report.rows, config.methods);
  return report;
}

}  // namespace vineshap
