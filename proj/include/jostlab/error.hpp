#pragma once

#include <stdexcept>
#include <string>

namespace jostlab {

// Machine-readable failure classes. The CLI maps them onto exit codes.
enum class ErrorCode {
  contract_violation,
  config_invalid,
  hypothesis_range,
  hypothesis_violation,
  non_convergence,
  out_of_range,
  singular_kernel,
  regime,
  sizing,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::contract_violation: return "CONTRACT_VIOLATION";
    case ErrorCode::config_invalid: return "CONFIG_INVALID";
    case ErrorCode::hypothesis_range: return "HYPOTHESIS_RANGE";
    case ErrorCode::hypothesis_violation: return "HYPOTHESIS_VIOLATION";
    case ErrorCode::non_convergence: return "NON_CONVERGENCE";
    case ErrorCode::out_of_range: return "OUT_OF_RANGE";
    case ErrorCode::singular_kernel: return "SINGULAR_KERNEL";
    case ErrorCode::regime: return "REGIME";
    case ErrorCode::sizing: return "SIZING";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

}  // namespace jostlab
