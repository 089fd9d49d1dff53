#ifndef VINESHAP_ERROR_H_
#define VINESHAP_ERROR_H_

#include <stdexcept>
#include <string>

namespace vineshap {

// Broad failure classes. The command-line tool maps these onto exit codes.
enum class ErrorKind {
  kInvalidInput,         // malformed or out-of-domain data
  kUnsupportedCoalition, // coalition is not a prefix/suffix of the order
  kUnsupportedBlock,     // requested marginal is not a contiguous block
  kPlanCoverage,         // coalition missing from a cover plan
  kNumeric,              // numerical breakdown
  kUsage,                // bad configuration keys or flags
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void ThrowInvalid(const std::string& what) {
  throw Error(ErrorKind::kInvalidInput, what);
}

}  // namespace vineshap

#endif  // VINESHAP_ERROR_H_
