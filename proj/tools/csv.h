#ifndef VINESHAP_TOOLS_CSV_H_
#define VINESHAP_TOOLS_CSV_H_

#include <string>
#include <vector>

#include "vineshap/table.h"

namespace vineshap::cli {

struct Dataset {
  std::vector<std::string> columns;
  Table values;
};

// Comma-separated numeric table with a header row. Errors name the file,
// line and column of the offending cell.
Dataset ReadCsv(const std::string& path);

// Removes the named column; throws if it is absent.
void DropColumn(Dataset& data, const std::string& name);

// Reorders data columns to `columns`; missing names are reported.
void SelectColumns(Dataset& data, const std::vector<std::string>& columns);

void WriteCsv(const std::string& path, const std::vector<std::string>& header, const Table& rows);

}  // namespace vineshap::cli

#endif  // VINESHAP_TOOLS_CSV_H_
