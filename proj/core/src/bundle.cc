#include "vineshap/bundle.h"

#include <istream>
#include <optional>
#include <ostream>

#include "vineshap/error.h"
#include "vineshap/parallel.h"
#include "vineshap/rng.h"
#include "vineshap/serialize.h"

namespace vineshap {
namespace {

constexpr int kBundleVersion = 1;

bool IsVineMethod(const std::string& method) {
  return method == "vine-parametric" || method == "vine-nonparametric";
}

void WriteMatrix(std::ostream& out, const Eigen::MatrixXd& m) {
  Table t = m;
  WriteTable(out, t);
}

}  // namespace

std::shared_ptr<VineSet> FitVineSet(const Table& pseudo, SharedMarginals marginals,
                                    ShapMethod method, const FitMode& mode, int candidates,
                                    std::uint64_t seed, int threads) {
  const int dim = static_cast<int>(pseudo.cols());
  Rng rng(seed);
  auto out = std::make_shared<VineSet>();
  out->plan = GreedyCover(dim, method, candidates, rng);
  const int n = static_cast<int>(out->plan.orders.size());
  std::vector<std::optional<DVine>> fitted(n);
  ParallelFor(n, threads, [&](int i) {
    fitted[i].emplace(DVine::FitPseudo(pseudo, marginals, out->plan.orders[i], mode));
  });
  out->models.reserve(n);
  for (auto& f : fitted) out->models.push_back(std::move(*f));
  return out;
}

ModelBundle FitBundle(Table train, std::vector<std::string> columns, const BundleOptions& options) {
  const int dim = static_cast<int>(train.cols());
  if (static_cast<int>(columns.size()) != dim) ThrowInvalid("column names do not match the data");
  if (dim > kMaxExplainFeatures) {
    throw Error(ErrorKind::kUsage, "at most " + std::to_string(kMaxExplainFeatures) +
                                       " features are supported, got " + std::to_string(dim));
  }
  ModelBundle b;
  b.method = options.method;
  b.shap_method = options.shap_method;
  b.seed = options.seed;
  b.columns = std::move(columns);
  b.train = std::move(train);

  if (IsVineMethod(b.method)) {
    if (dim < 2) ThrowInvalid("vine models need at least 2 features");
    SharedMarginals marginals = FitMarginals(b.train);
    const Table pseudo = PseudoObservations(b.train, *marginals);
    FitMode mode = ParametricMode{};
    if (b.method == "vine-nonparametric") mode = NonparametricMode{options.grid_size};
    b.vines = FitVineSet(pseudo, marginals, b.shap_method, mode, options.candidates, b.seed,
                         options.threads);
  } else if (b.method == "gaussian") {
    if (b.train.rows() < 2) ThrowInvalid("gaussian fit needs at least 2 rows");
    b.mu = b.train.colwise().mean().transpose();
    const Eigen::MatrixXd centered = b.train.rowwise() - b.mu.transpose();
    b.sigma = centered.transpose() * centered / static_cast<double>(b.train.rows() - 1);
  } else if (b.method == "gaussian-copula") {
    const SharedMarginals marginals = FitMarginals(b.train);
    b.correlation = NormalScoreCorrelation(PseudoObservations(b.train, *marginals));
  } else if (b.method != "independence") {
    throw Error(ErrorKind::kUsage, "unknown method '" + b.method + "'");
  }
  return b;
}

std::unique_ptr<ContributionEstimator> MakeEstimator(const ModelBundle& bundle, const Predictor& g,
                                                     int k) {
  auto train = std::make_shared<const TrainingSet>(bundle.train, g);
  if (IsVineMethod(bundle.method)) {
    if (bundle.shap_method == ShapMethod::kCondSim) {
      return std::make_unique<VineCondSimEstimator>(train, bundle.vines, g, k,
                                                    "vine-condsim-" + bundle.method.substr(5));
    }
    return std::make_unique<VineRatioEstimator>(train, bundle.vines, g, k,
                                                "vine-ratio-" + bundle.method.substr(5));
  }
  if (bundle.method == "gaussian") {
    return std::make_unique<GaussianEstimator>(train, g, k, bundle.mu, bundle.sigma);
  }
  if (bundle.method == "gaussian-copula") {
    return std::make_unique<GaussianCopulaEstimator>(train, g, k, bundle.correlation);
  }
  if (bundle.method == "independence") return std::make_unique<IndependenceEstimator>(train, g, k);
  throw Error(ErrorKind::kUsage, "unknown method '" + bundle.method + "'");
}

void WriteBundle(std::ostream& out, const ModelBundle& b) {
  out << "vineshap-bundle " << kBundleVersion << '\n';
  out << "method " << b.method << '\n';
  out << "shap " << ShapMethodName(b.shap_method) << '\n';
  out << "seed " << b.seed << '\n';
  out << "columns " << b.columns.size();
  for (const auto& c : b.columns) {
    if (c.empty() || c.find_first_of(" \t\r\n") != std::string::npos) {
      ThrowInvalid("column name '" + c + "' is empty or contains whitespace");
    }
    out << ' ' << c;
  }
  out << '\n';
  WriteTable(out, b.train);
  if (IsVineMethod(b.method)) {
    WritePlan(out, b.vines->plan);
    out << "models " << b.vines->models.size() << '\n';
    // All models share the training marginals, which are rebuilt on load.
    for (const DVine& v : b.vines->models) WriteDVine(out, v, false);
  } else if (b.method == "gaussian") {
    WriteMatrix(out, b.mu.transpose());
    WriteMatrix(out, b.sigma);
  } else if (b.method == "gaussian-copula") {
    WriteMatrix(out, b.correlation);
  }
  out << "end\n";
}

ModelBundle ReadBundle(std::istream& in) {
  TokenReader r(in);
  const std::vector<std::string> head = r.Expect("vineshap-bundle", 1);
  if (head[0] != std::to_string(kBundleVersion)) r.Fail("unsupported bundle version " + head[0]);
  ModelBundle b;
  b.method = r.Expect("method", 1)[0];
  try {
    b.shap_method = ParseShapMethod(r.Expect("shap", 1)[0]);
  } catch (const Error& e) {
    r.Fail(e.what());
  }
  b.seed = std::stoull(r.Expect("seed", 1)[0]);
  std::vector<std::string> cols = r.Expect("columns", static_cast<std::size_t>(-1));
  if (cols.empty() || cols.size() != 1 + static_cast<std::size_t>(ParseInt(cols[0]))) {
    r.Fail("bad column list");
  }
  b.columns.assign(cols.begin() + 1, cols.end());
  b.train = ReadTable(r);
  if (b.train.cols() != static_cast<Eigen::Index>(b.columns.size())) {
    r.Fail("training table does not match the column list");
  }
  if (IsVineMethod(b.method)) {
    auto vines = std::make_shared<VineSet>();
    vines->plan = ReadPlan(r);
    const int n = ParseInt(r.Expect("models", 1)[0]);
    if (n != static_cast<int>(vines->plan.orders.size())) r.Fail("model count does not match plan");
    SharedMarginals marginals = FitMarginals(b.train);
    for (int i = 0; i < n; ++i) vines->models.push_back(ReadDVine(r, marginals));
    b.vines = std::move(vines);
  } else if (b.method == "gaussian") {
    b.mu = ReadTable(r).transpose();
    b.sigma = ReadTable(r);
  } else if (b.method == "gaussian-copula") {
    b.correlation = ReadTable(r);
  } else if (b.method != "independence") {
    r.Fail("unknown method '" + b.method + "'");
  }
  r.Expect("end", 0);
  return b;
}

}  // namespace vineshap
