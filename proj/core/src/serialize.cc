#include "vineshap/serialize.h"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "vineshap/error.h"

namespace vineshap {

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double ParseDouble(const std::string& text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) ThrowInvalid("not a number: '" + text + "'");
  return v;
}

int ParseInt(const std::string& text) {
  int v = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) ThrowInvalid("not an integer: '" + text + "'");
  return v;
}

std::vector<std::string> TokenReader::Line() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
    if (!tokens.empty()) return tokens;
  }
  Fail("unexpected end of input");
}

std::vector<std::string> TokenReader::Expect(const std::string& keyword, std::size_t count) {
  std::vector<std::string> tokens = Line();
  if (tokens[0] != keyword) Fail("expected '" + keyword + "', found '" + tokens[0] + "'");
  tokens.erase(tokens.begin());
  if (count != static_cast<std::size_t>(-1) && tokens.size() != count) {
    Fail("'" + keyword + "' expects " + std::to_string(count) + " fields, found " +
         std::to_string(tokens.size()));
  }
  return tokens;
}

void TokenReader::Fail(const std::string& what) const {
  ThrowInvalid("model file line " + std::to_string(line_) + ": " + what);
}

namespace {
constexpr std::size_t kAny = static_cast<std::size_t>(-1);
}  // namespace

void WritePairCopula(std::ostream& out, const PairCopula& pc) {
  out << "copula ";
  switch (pc.family()) {
    case CopulaFamily::kIndependence:
      out << "independence";
      break;
    case CopulaFamily::kGaussian:
      out << "gaussian " << FormatDouble(pc.parameter());
      break;
    case CopulaFamily::kClayton:
      out << "clayton " << FormatDouble(pc.parameter()) << ' ' << pc.rotation();
      break;
    case CopulaFamily::kGrid: {
      const GridDensity& g = *pc.grid();
      out << "grid " << g.grid_size();
      for (double v : g.values()) out << ' ' << FormatDouble(v);
      break;
    }
  }
  out << '\n';
}

PairCopula ReadPairCopula(TokenReader& in) {
  const std::vector<std::string> tok = in.Expect("copula", kAny);
  if (tok.empty()) in.Fail("copula family missing");
  try {
    if (tok[0] == "independence" && tok.size() == 1) return PairCopula::Independence();
    if (tok[0] == "gaussian" && tok.size() == 2) return PairCopula::Gaussian(ParseDouble(tok[1]));
    if (tok[0] == "clayton" && tok.size() == 3) {
      return PairCopula::Clayton(ParseDouble(tok[1]), ParseInt(tok[2]));
    }
    if (tok[0] == "grid" && tok.size() >= 2) {
      const int g = ParseInt(tok[1]);
      if (g < 2 || tok.size() != 2 + static_cast<std::size_t>(g) * g) in.Fail("bad grid payload");
      std::vector<double> values(static_cast<std::size_t>(g) * g);
      for (std::size_t i = 0; i < values.size(); ++i) values[i] = ParseDouble(tok[2 + i]);
      return PairCopula::Grid(GridDensity(g, std::move(values)));
    }
  } catch (const Error& e) {
    in.Fail(e.what());
  }
  in.Fail("unknown copula record '" + tok[0] + "'");
}

void WriteDVine(std::ostream& out, const DVine& vine, bool include_marginals) {
  const int m = vine.dim();
  out << "dvine 1 " << m << ' ' << (include_marginals ? 1 : 0) << '\n';
  out << "order";
  for (int j : vine.order()) out << ' ' << j;
  out << '\n';
  for (int t = 0; t + 1 < m; ++t) {
    for (int e = 0; e + t + 1 < m; ++e) WritePairCopula(out, vine.pair(t, e));
  }
  if (include_marginals) {
    for (int j = 0; j < m; ++j) {
      const auto& s = vine.marginals()[j].sorted_sample();
      out << "marginal " << s.size();
      for (double v : s) out << ' ' << FormatDouble(v);
      out << '\n';
    }
  }
  out << "end\n";
}

DVine ReadDVine(TokenReader& in, SharedMarginals marginals) {
  const std::vector<std::string> head = in.Expect("dvine", 3);
  if (head[0] != "1") in.Fail("unsupported vine format version " + head[0]);
  const int m = ParseInt(head[1]);
  const bool has_marginals = head[2] == "1";
  if (m < 1 || m > kMaxFeatures) in.Fail("bad vine dimension");
  const std::vector<std::string> ord = in.Expect("order", static_cast<std::size_t>(m));
  std::vector<int> order(m);
  for (int k = 0; k < m; ++k) order[k] = ParseInt(ord[k]);
  std::vector<std::vector<PairCopula>> pairs(m > 1 ? m - 1 : 0);
  for (int t = 0; t + 1 < m; ++t) {
    for (int e = 0; e + t + 1 < m; ++e) pairs[t].push_back(ReadPairCopula(in));
  }
  if (has_marginals) {
    auto own = std::make_shared<std::vector<EmpiricalMarginal>>();
    for (int j = 0; j < m; ++j) {
      const std::vector<std::string> tok = in.Expect("marginal", kAny);
      if (tok.empty() || tok.size() != 1 + static_cast<std::size_t>(ParseInt(tok[0]))) {
        in.Fail("bad marginal record");
      }
      std::vector<double> sample(tok.size() - 1);
      for (std::size_t i = 0; i < sample.size(); ++i) sample[i] = ParseDouble(tok[i + 1]);
      own->push_back(EmpiricalMarginal::Fit(sample));
    }
    marginals = std::move(own);
  }
  if (!marginals) in.Fail("vine has no marginals and none were supplied");
  in.Expect("end", 0);
  try {
    return DVine(std::move(order), std::move(pairs), std::move(marginals));
  } catch (const Error& e) {
    in.Fail(e.what());
  }
}

namespace {

const char* RoleName(Role role) {
  switch (role) {
    case Role::kPrefix:
      return "prefix";
    case Role::kSuffix:
      return "suffix";
    case Role::kBlock:
      return "block";
  }
  return "?";
}

}  // namespace

void WritePlan(std::ostream& out, const CoverPlan& plan) {
  out << "plan " << ShapMethodName(plan.method) << ' ' << plan.dim << ' ' << plan.orders.size()
      << ' ' << plan.assignment.size() << '\n';
  for (const auto& order : plan.orders) {
    out << "order";
    for (int j : order) out << ' ' << j;
    out << '\n';
  }
  for (const auto& [mask, a] : plan.assignment) {
    out << "assign " << mask << ' ' << a.order_index << ' ' << RoleName(a.role) << ' ' << a.start
        << ' ' << a.end << '\n';
  }
}

CoverPlan ReadPlan(TokenReader& in) {
  const std::vector<std::string> head = in.Expect("plan", 4);
  CoverPlan plan;
  try {
    plan.method = ParseShapMethod(head[0]);
  } catch (const Error& e) {
    in.Fail(e.what());
  }
  plan.dim = ParseInt(head[1]);
  const int n_orders = ParseInt(head[2]);
  const int n_assign = ParseInt(head[3]);
  if (plan.dim < 1 || plan.dim > kMaxFeatures || n_orders < 0 || n_assign < 0) {
    in.Fail("bad plan header");
  }
  for (int i = 0; i < n_orders; ++i) {
    const std::vector<std::string> tok = in.Expect("order", static_cast<std::size_t>(plan.dim));
    std::vector<int> order(plan.dim);
    for (int k = 0; k < plan.dim; ++k) order[k] = ParseInt(tok[k]);
    plan.orders.push_back(std::move(order));
  }
  for (int i = 0; i < n_assign; ++i) {
    const std::vector<std::string> tok = in.Expect("assign", 5);
    Assignment a;
    const auto mask = static_cast<std::uint32_t>(std::stoul(tok[0]));
    a.order_index = ParseInt(tok[1]);
    if (tok[2] == "prefix") {
      a.role = Role::kPrefix;
    } else if (tok[2] == "suffix") {
      a.role = Role::kSuffix;
    } else if (tok[2] == "block") {
      a.role = Role::kBlock;
    } else {
      in.Fail("unknown role '" + tok[2] + "'");
    }
    a.start = ParseInt(tok[3]);
    a.end = ParseInt(tok[4]);
    if (a.order_index < 0 || a.order_index >= n_orders) in.Fail("assignment order out of range");
    plan.assignment.emplace(mask, a);
  }
  return plan;
}

void WriteTable(std::ostream& out, const Table& t) {
  out << "table " << t.rows() << ' ' << t.cols() << '\n';
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    out << "row";
    for (Eigen::Index j = 0; j < t.cols(); ++j) out << ' ' << FormatDouble(t(i, j));
    out << '\n';
  }
}

Table ReadTable(TokenReader& in) {
  const std::vector<std::string> head = in.Expect("table", 2);
  const int rows = ParseInt(head[0]);
  const int cols = ParseInt(head[1]);
  if (rows < 0 || cols < 0) in.Fail("bad table shape");
  Table t(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const std::vector<std::string> tok = in.Expect("row", static_cast<std::size_t>(cols));
    for (int j = 0; j < cols; ++j) t(i, j) = ParseDouble(tok[j]);
  }
  return t;
}

}  // namespace vineshap
