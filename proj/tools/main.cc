// vineshap: fit dependence models, explain predictions, simulate Burr data
// and run the benchmark study.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "csv.h"
#include "predictors.h"
#include "vineshap/bundle.h"
#include "vineshap/error.h"
#include "vineshap/explain.h"
#include "vineshap/rng.h"
#include "vineshap/serialize.h"
#include "vineshap/simstudy.h"

namespace vs = vineshap;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

int ExitCode(vs::ErrorKind kind) {
  switch (kind) {
    case vs::ErrorKind::kUsage:
      return kExitUsage;
    case vs::ErrorKind::kNumeric:
    case vs::ErrorKind::kPlanCoverage:
      return kExitNumeric;
    default:
      return kExitData;
  }
}

std::vector<double> ParseNumberList(const std::string& flag, const std::string& text) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(vs::ParseDouble(tok));
    } catch (const vs::Error&) {
      throw vs::Error(vs::ErrorKind::kUsage, "flag " + flag + ": bad number '" + tok + "'");
    }
  }
  return out;
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) vs::ThrowInvalid(path + ": cannot open for writing");
  return out;
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::string train;
  std::string method = "vine-parametric";
  std::string shap = "condsim";
  std::uint64_t seed = 1;
  std::string out;
  std::string response;
  int threads = 1;
  int candidates = vs::kDefaultCandidates;
  int grid_size = 64;
};

int RunFit(const FitArgs& a) {
  vs::cli::Dataset data = vs::cli::ReadCsv(a.train);
  if (!a.response.empty()) vs::cli::DropColumn(data, a.response);
  if (data.values.rows() < 2) vs::ThrowInvalid(a.train + ": at least 2 data rows are required");
  const auto& known = vs::BundleMethods();
  if (std::find(known.begin(), known.end(), a.method) == known.end()) {
    throw vs::Error(vs::ErrorKind::kUsage, "--method: unknown method '" + a.method + "'");
  }
  vs::BundleOptions opt;
  opt.method = a.method;
  opt.shap_method = vs::ParseShapMethod(a.shap);
  opt.seed = a.seed;
  opt.candidates = a.candidates;
  opt.grid_size = a.grid_size;
  opt.threads = a.threads;

  const auto start = std::chrono::steady_clock::now();
  const vs::ModelBundle bundle = vs::FitBundle(data.values, data.columns, opt);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  {
    std::ofstream out = OpenOut(a.out);
    vs::WriteBundle(out, bundle);
    if (!out) vs::ThrowInvalid(a.out + ": write failed");
  }
  // Wall time lives in a sidecar so the bundle itself stays reproducible.
  json manifest;
  manifest["method"] = bundle.method;
  manifest["shap_method"] = vs::ShapMethodName(bundle.shap_method);
  manifest["M"] = data.columns.size();
  manifest["N"] = data.values.rows();
  manifest["seed"] = bundle.seed;
  manifest["columns"] = data.columns;
  manifest["orders"] = bundle.vines ? bundle.vines->plan.orders.size() : 0;
  manifest["fit_seconds"] = seconds;
  std::ofstream(a.out + ".manifest.json") << manifest.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct ExplainArgs {
  std::string model;
  std::string data;
  std::string predictor;
  std::string predictor_cmd;
  std::string method;
  int k = vs::kDefaultSamples;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out;
  bool diagnostics = false;
};

int RunExplain(const ExplainArgs& a) {
  std::ifstream in(a.model);
  if (!in) vs::ThrowInvalid(a.model + ": cannot open model bundle");
  vs::ModelBundle bundle = vs::ReadBundle(in);
  if (!a.method.empty() && a.method != bundle.method) {
    if (a.method != "independence" && a.method != "gaussian" && a.method != "gaussian-copula") {
      throw vs::Error(vs::ErrorKind::kUsage,
                      "--method: bundle holds '" + bundle.method + "'; only independence, gaussian "
                      "and gaussian-copula can be refitted from it");
    }
    vs::BundleOptions opt;
    opt.method = a.method;
    opt.seed = bundle.seed;
    bundle = vs::FitBundle(bundle.train, bundle.columns, opt);
  }
  vs::cli::Dataset test = vs::cli::ReadCsv(a.data);
  vs::cli::SelectColumns(test, bundle.columns);
  const int dim = static_cast<int>(bundle.columns.size());

  if (a.predictor.empty() == a.predictor_cmd.empty()) {
    throw vs::Error(vs::ErrorKind::kUsage, "give exactly one of --predictor and --predictor-cmd");
  }
  const vs::Predictor g = a.predictor.empty()
                              ? vs::cli::ProcessPredictor(a.predictor_cmd, bundle.columns)
                              : vs::cli::BuiltinPredictor(a.predictor, dim);
  const auto estimator = vs::MakeEstimator(bundle, g, a.k);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!a.out.empty()) {
    file = OpenOut(a.out);
    out = &file;
  }
  for (Eigen::Index i = 0; i < test.values.rows(); ++i) {
    const vs::Explanation e = vs::Shapley(
        *estimator, vs::Row(test.values, i),
        vs::ShapleyOptions{vs::DeriveSeed(a.seed, static_cast<std::uint64_t>(i)), a.threads});
    json rec;
    rec["row_id"] = i;
    rec["features"] = bundle.columns;
    rec["phi0"] = e.phi0;
    rec["phi"] = e.phi;
    rec["prediction"] = e.values.back();
    rec["method"] = e.method;
    rec["K"] = a.k;
    rec["seed"] = a.seed;
    if (a.diagnostics) {
      json diag = json::array();
      for (std::uint32_t mask = 1; mask + 1 < e.values.size(); ++mask) {
        const vs::CoalitionValue& cv = e.diagnostics[mask];
        diag.push_back({{"coalition", vs::Coalition(mask, dim).ToString()},
                        {"value", cv.value},
                        {"std_error", cv.std_error},
                        {"effective_sample_size", cv.effective_sample_size},
                        {"ridge", cv.ridge},
                        {"weight_fallback", cv.weight_fallback}});
      }
      rec["diagnostics"] = diag;
    }
    *out << rec.dump() << '\n';
  }
  out->flush();
  if (!*out) vs::ThrowInvalid("writing explanations failed");
  return 0;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  double p = 0.5;
  std::string b;
  std::string r;
  int n = 1000;
  std::uint64_t seed = 1;
  std::string out;
  bool response = false;
  double noise = 0.5;
};

int RunSimulate(const SimulateArgs& a) {
  vs::BurrParams params;
  params.p = a.p;
  params.b = ParseNumberList("--b", a.b);
  params.r = ParseNumberList("--r", a.r);
  try {
    params.Validate();
  } catch (const vs::Error& e) {
    throw vs::Error(vs::ErrorKind::kUsage, std::string("invalid Burr parameters: ") + e.what());
  }
  if (a.n < 0) throw vs::Error(vs::ErrorKind::kUsage, "--n must be non-negative");
  vs::Rng rng(vs::DeriveSeed(a.seed, 1));
  const vs::Table x = vs::BurrSample(params, a.n, rng);
  std::vector<std::string> header;
  for (int j = 0; j < params.dim(); ++j) header.push_back("x" + std::to_string(j + 1));
  if (!a.response) {
    vs::cli::WriteCsv(a.out, header, x);
    return 0;
  }
  header.push_back("y");
  vs::Table xy(x.rows(), x.cols() + 1);
  xy.leftCols(x.cols()) = x;
  vs::Rng noise_rng(vs::DeriveSeed(a.seed, 2));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    xy(i, x.cols()) =
        vs::GenerateResponse(params, vs::Row(x, i), vs::ResponseConfig{a.noise}, noise_rng);
  }
  vs::cli::WriteCsv(a.out, header, xy);
  return 0;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string config;
  std::string out;
  int threads = 0;
  std::optional<std::uint64_t> seed;
};

int RunBench(const BenchArgs& a) {
  std::ifstream in(a.config);
  if (!in) vs::ThrowInvalid(a.config + ": cannot open config file");
  std::stringstream text;
  text << in.rdbuf();
  vs::ExperimentConfig config = vs::ExperimentConfig::Parse(text.str());
  if (a.threads > 0) config.threads = a.threads;
  if (a.seed) config.seed = *a.seed;

  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) vs::ThrowInvalid(a.out + ": cannot create directory");
  const vs::ExperimentReport report = vs::RunExperiment(config);

  const fs::path dir(a.out);
  {
    std::ofstream m = OpenOut((dir / "manifest.txt").string());
    m << "# response: " << vs::ResponseFormula(config.dim, config.noise_scale) << '\n';
    m << "# predictor at test time: noiseless mean (analytic_mean) or fitted knn\n";
    m << config.ToText();
  }
  {
    std::ofstream r = OpenOut((dir / "repetitions.csv").string());
    r << "method,repetition,mae\n";
    for (const auto& row : report.rows) {
      r << row.method << ',' << row.repetition << ',' << vs::FormatDouble(row.mae) << '\n';
    }
  }
  {
    std::ofstream s = OpenOut((dir / "summary.csv").string());
    s << "method,mean_mae,std_error,repetitions\n";
    for (const auto& row : report.summary) {
      s << row.method << ',' << vs::FormatDouble(row.mean_mae) << ','
        << vs::FormatDouble(row.std_error) << ',' << row.repetitions << '\n';
    }
  }
  {
    // Timings vary from run to run and are kept apart from the results.
    std::ofstream t = OpenOut((dir / "timings.csv").string());
    t << "method,repetition,seconds\n";
    for (const auto& row : report.rows) {
      t << row.method << ',' << row.repetition << ',' << row.seconds << '\n';
    }
  }
  for (const auto& row : report.summary) {
    std::cout << row.method << ": mean MAE " << row.mean_mae << " (se " << row.std_error << ")\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shapley explanations under dependent features with D-vine copulas"};
  app.require_subcommand(1);

  FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit a dependence model bundle on training data");
  fit_cmd->add_option("train", fit.train, "training CSV")->required();
  fit_cmd->add_option("--method", fit.method,
                      "vine-parametric | vine-nonparametric | gaussian | gaussian-copula | independence")
      ->capture_default_str();
  fit_cmd->add_option("--shap", fit.shap, "condsim | ratio (vine methods)")->capture_default_str();
  fit_cmd->add_option("--seed", fit.seed, "seed for the order search")->capture_default_str();
  fit_cmd->add_option("--out", fit.out, "output bundle path")->required();
  fit_cmd->add_option("--response", fit.response, "column to exclude from the features");
  fit_cmd->add_option("--threads", fit.threads, "worker threads")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--candidates", fit.candidates, "random orders per greedy round")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit_cmd->add_option("--grid-size", fit.grid_size, "nonparametric grid size")
      ->check(CLI::Range(4, 1024))
      ->capture_default_str();

  ExplainArgs ex;
  CLI::App* ex_cmd = app.add_subcommand("explain", "Shapley values for every row of a CSV");
  ex_cmd->add_option("model", ex.model, "model bundle from 'fit'")->required();
  ex_cmd->add_option("data", ex.data, "CSV of points to explain")->required();
  ex_cmd->add_option("--predictor", ex.predictor, "built-in predictor (const:C, linear:b0,..., burr-mean:P)");
  ex_cmd->add_option("--predictor-cmd", ex.predictor_cmd,
                     "shell command reading query CSV on stdin, printing one prediction per line");
  ex_cmd->add_option("--method", ex.method, "override with a baseline refitted on the bundle data");
  ex_cmd->add_option("--k", ex.k, "samples per coalition")->check(CLI::PositiveNumber)->capture_default_str();
  ex_cmd->add_option("--seed", ex.seed, "explanation seed")->capture_default_str();
  ex_cmd->add_option("--threads", ex.threads, "worker threads")->check(CLI::PositiveNumber);
  ex_cmd->add_option("--out", ex.out, "output JSON lines (default stdout)");
  ex_cmd->add_flag("--diagnostics", ex.diagnostics, "include per-coalition diagnostics");

  SimulateArgs sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "draw from a multivariate Burr distribution");
  sim_cmd->add_option("--p", sim.p, "Burr p")->capture_default_str();
  sim_cmd->add_option("--b", sim.b, "comma-separated b vector")->required();
  sim_cmd->add_option("--r", sim.r, "comma-separated r vector")->required();
  sim_cmd->add_option("--n", sim.n, "number of rows")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "seed")->capture_default_str();
  sim_cmd->add_option("--out", sim.out, "output CSV")->required();
  sim_cmd->add_flag("--with-response", sim.response, "append a response column y");
  sim_cmd->add_option("--noise", sim.noise, "response noise scale")->capture_default_str();

  BenchArgs bench;
  std::uint64_t bench_seed = 0;
  CLI::App* bench_cmd = app.add_subcommand("bench", "run the Burr benchmark study");
  bench_cmd->add_option("config", bench.config, "key=value config file")->required();
  bench_cmd->add_option("--out", bench.out, "output directory")->required();
  bench_cmd->add_option("--threads", bench.threads, "worker threads (overrides config)")
      ->check(CLI::PositiveNumber);
  CLI::Option* seed_opt = bench_cmd->add_option("--seed", bench_seed, "seed (overrides config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*fit_cmd) return RunFit(fit);
    if (*ex_cmd) return RunExplain(ex);
    if (*sim_cmd) return RunSimulate(sim);
    if (*bench_cmd) {
      if (*seed_opt) bench.seed = bench_seed;
      return RunBench(bench);
    }
  } catch (const vs::Error& e) {
    std::cerr << "vineshap: " << e.what() << '\n';
    return ExitCode(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "vineshap: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
