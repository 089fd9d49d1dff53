#include "csv.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "vineshap/error.h"
#include "vineshap/serialize.h"

namespace vineshap::cli {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(Trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string Unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

}  // namespace

Dataset ReadCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) ThrowInvalid(path + ": cannot open file");
  std::string line;
  if (!std::getline(in, line)) ThrowInvalid(path + ": empty file (a header row is required)");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  Dataset data;
  std::set<std::string> seen;
  for (const std::string& raw : SplitFields(line)) {
    const std::string name = Unquote(raw);
    if (name.empty()) ThrowInvalid(path + ": line 1: empty column name");
    if (!seen.insert(name).second) ThrowInvalid(path + ": line 1: duplicate column '" + name + "'");
    data.columns.push_back(name);
  }
  const std::size_t m = data.columns.size();

  std::vector<double> cells;
  int line_no = 1;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const std::vector<std::string> fields = SplitFields(line);
    if (fields.size() != m) {
      ThrowInvalid(path + ": line " + std::to_string(line_no) + ": expected " + std::to_string(m) +
                   " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < m; ++j) {
      double v = 0.0;
      try {
        v = ParseDouble(fields[j]);
      } catch (const Error&) {
        ThrowInvalid(path + ": line " + std::to_string(line_no) + ", column '" + data.columns[j] +
                     "': not a number: '" + fields[j] + "'");
      }
      if (!std::isfinite(v)) {
        ThrowInvalid(path + ": line " + std::to_string(line_no) + ", column '" + data.columns[j] +
                     "': non-finite value");
      }
      cells.push_back(v);
    }
    ++rows;
  }
  data.values = Table(rows, static_cast<Eigen::Index>(m));
  std::copy(cells.begin(), cells.end(), data.values.data());
  return data;
}

void DropColumn(Dataset& data, const std::string& name) {
  const auto it = std::find(data.columns.begin(), data.columns.end(), name);
  if (it == data.columns.end()) ThrowInvalid("column '" + name + "' not found");
  std::vector<std::string> keep;
  for (const auto& c : data.columns) {
    if (c != name) keep.push_back(c);
  }
  SelectColumns(data, keep);
}

void SelectColumns(Dataset& data, const std::vector<std::string>& columns) {
  std::vector<Eigen::Index> idx;
  for (const auto& c : columns) {
    const auto it = std::find(data.columns.begin(), data.columns.end(), c);
    if (it == data.columns.end()) ThrowInvalid("column '" + c + "' is missing from the data");
    idx.push_back(it - data.columns.begin());
  }
  Table out(data.values.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(j) = data.values.col(idx[j]);
  data.values = std::move(out);
  data.columns = columns;
}

void WriteCsv(const std::string& path, const std::vector<std::string>& header, const Table& rows) {
  std::ofstream out(path);
  if (!out) ThrowInvalid(path + ": cannot open for writing");
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) out << (j ? "," : "") << FormatDouble(rows(i, j));
    out << '\n';
  }
  if (!out) ThrowInvalid(path + ": write failed");
}

}  // namespace vineshap::cli
