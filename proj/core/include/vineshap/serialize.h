#ifndef VINESHAP_SERIALIZE_H_
#define VINESHAP_SERIALIZE_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "vineshap/bicop.h"
#include "vineshap/dvine.h"
#include "vineshap/structure.h"
#include "vineshap/table.h"

namespace vineshap {

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double v);
double ParseDouble(const std::string& text);

// Line-oriented reader for the text formats: whitespace-separated tokens,
// with errors that name the line.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}
  // Next non-empty line split into tokens; throws at end of input.
  std::vector<std::string> Line();
  // Next line, which must start with `keyword`; returns the remaining tokens.
  std::vector<std::string> Expect(const std::string& keyword, std::size_t count);
  [[noreturn]] void Fail(const std::string& what) const;
  int line_number() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 0;
};

int ParseInt(const std::string& text);

void WritePairCopula(std::ostream& out, const PairCopula& pc);
PairCopula ReadPairCopula(TokenReader& in);

// With include_marginals the sorted marginal samples are stored as well; if
// not, ReadDVine must be handed the marginals.
void WriteDVine(std::ostream& out, const DVine& vine, bool include_marginals = true);
DVine ReadDVine(TokenReader& in, SharedMarginals marginals = nullptr);

void WritePlan(std::ostream& out, const CoverPlan& plan);
CoverPlan ReadPlan(TokenReader& in);

void WriteTable(std::ostream& out, const Table& t);
Table ReadTable(TokenReader& in);

}  // namespace vineshap

#endif  // VINESHAP_SERIALIZE_H_
