#pragma once

#include <stdexcept>
#include <string>

namespace gibbs {

enum class ErrorCode {
  NotMixing,
  ZeroRowOrColumn,
  DepthTooLarge,
  InsufficientDepth,
  BackendMismatch,
  NonSummableVariation,
  NotStableRelated,
  NotUnimodular,
  NotHyperbolic,
  UnsupportedMatrix,
  MarkovPropertyViolation,
  InadmissibleWord,
  NotHolonomyRelated,
  PositivityFailure,
  OrderingFailure,
  BadInput,
  NoConvergence,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace gibbs
