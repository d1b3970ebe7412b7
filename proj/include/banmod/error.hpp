#ifndef BANMOD_ERROR_HPP_
#define BANMOD_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace banmod {

enum class Errc {
  invalid_argument,
  space_mismatch,
  dimension_mismatch,
  module_mismatch,
  not_composable,
  rank_deficient,
  not_a_partition,
  solver_failure,
  enumeration_cap,
  invalid_diagram,
  inconsistent_system,
  parse_error,
};

const char* to_string(Errc code);

// All library failures are reported through this type; `code()` lets callers
// (the CLI in particular) map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::space_mismatch: return "space mismatch";
    case Errc::dimension_mismatch: return "dimension mismatch";
    case Errc::module_mismatch: return "module mismatch";
    case Errc::not_composable: return "not composable";
    case Errc::rank_deficient: return "rank deficient";
    case Errc::not_a_partition: return "not a partition";
    case Errc::solver_failure: return "solver failure";
    case Errc::enumeration_cap: return "enumeration cap exceeded";
    case Errc::invalid_diagram: return "invalid diagram";
    case Errc::inconsistent_system: return "inconsistent system";
    case Errc::parse_error: return "parse error";
  }
  return "unknown";
}

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace banmod

#endif  // BANMOD_ERROR_HPP_
