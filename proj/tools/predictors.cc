#include "predictors.h"

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>

#include "vineshap/error.h"
#include "vineshap/serialize.h"
#include "vineshap/simstudy.h"

namespace vineshap::cli {
namespace {

std::vector<double> ParseList(const std::string& text, const std::string& spec) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(ParseDouble(tok));
    } catch (const Error&) {
      throw Error(ErrorKind::kUsage, "predictor '" + spec + "': bad number '" + tok + "'");
    }
  }
  return out;
}

std::string ShellQuote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

}  // namespace

Predictor BuiltinPredictor(const std::string& spec, int dim) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (name == "const") {
    const std::vector<double> c = ParseList(arg, spec);
    if (c.size() != 1) throw Error(ErrorKind::kUsage, "predictor 'const' takes one value");
    const double v = c[0];
    return Predictor([v](const Table& rows) { return std::vector<double>(rows.rows(), v); });
  }
  if (name == "linear") {
    const std::vector<double> beta = ParseList(arg, spec);
    if (static_cast<int>(beta.size()) != dim + 1) {
      throw Error(ErrorKind::kUsage, "predictor 'linear' needs " + std::to_string(dim + 1) +
                                         " coefficients (intercept first)");
    }
    return Predictor::Pointwise([beta](std::span<const double> x) {
      double y = beta[0];
      for (std::size_t j = 0; j < x.size(); ++j) y += beta[j + 1] * x[j];
      return y;
    });
  }
  if (name == "burr-mean") {
    const std::vector<double> p = ParseList(arg, spec);
    if (p.size() != 1) throw Error(ErrorKind::kUsage, "predictor 'burr-mean' takes p");
    return AnalyticMeanPredictor(BurrParams::Standard(p[0], dim));
  }
  throw Error(ErrorKind::kUsage, "unknown predictor '" + spec + "' (const:C, linear:b0,..., burr-mean:P)");
}

Predictor ProcessPredictor(const std::string& command, std::vector<std::string> columns) {
  auto mutex = std::make_shared<std::mutex>();
  return Predictor([command, columns = std::move(columns), mutex](const Table& rows) {
    std::lock_guard<std::mutex> lock(*mutex);
    char path[] = "/tmp/vineshap-queryXXXXXX";
    const int fd = mkstemp(path);
    if (fd < 0) throw Error(ErrorKind::kInvalidInput, "cannot create a temporary file");
    close(fd);
    struct Cleanup {
      const char* p;
      ~Cleanup() { std::remove(p); }
    } cleanup{path};
    {
      std::ofstream out(path);
      for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << columns[j];
      out << '\n';
      for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index j = 0; j < rows.cols(); ++j) out << (j ? "," : "") << FormatDouble(rows(i, j));
        out << '\n';
      }
      if (!out) throw Error(ErrorKind::kInvalidInput, "cannot write predictor input");
    }
    const std::string shell = "(" + command + ") < " + ShellQuote(path);
    FILE* pipe = popen(shell.c_str(), "r");
    if (pipe == nullptr) throw Error(ErrorKind::kInvalidInput, "cannot start predictor '" + command + "'");
    std::vector<double> out;
    std::string line;
    char buf[256];
    bool bad = false;
    std::string bad_line;
    while (fgets(buf, sizeof(buf), pipe) != nullptr) {
      line += buf;
      if (line.empty() || line.back() != '\n') continue;
      line.pop_back();
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) {
        try {
          out.push_back(ParseDouble(line));
        } catch (const Error&) {
          if (!bad) bad_line = line;
          bad = true;
        }
      }
      line.clear();
    }
    if (!line.empty()) {
      try {
        out.push_back(ParseDouble(line));
      } catch (const Error&) {
        if (!bad) bad_line = line;
        bad = true;
      }
    }
    const int status = pclose(pipe);
    if (status != 0) {
      throw Error(ErrorKind::kInvalidInput, "predictor '" + command + "' exited with status " +
                                                std::to_string(status));
    }
    if (bad) {
      throw Error(ErrorKind::kInvalidInput,
                  "predictor protocol violation: non-numeric line '" + bad_line + "'");
    }
    if (out.size() != static_cast<std::size_t>(rows.rows())) {
      throw Error(ErrorKind::kInvalidInput,
                  "predictor protocol violation: expected " + std::to_string(rows.rows()) +
                      " lines, got " + std::to_string(out.size()));
    }
    return out;
  });
}

}  // namespace vineshap::cli
