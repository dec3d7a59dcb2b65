#pragma once

#include <stdexcept>
#include <string>

namespace loopcorr {

enum class ErrorCode {
  Ok = 0,
  ParseError,
  RealizationMismatch,
  SingularProduct,
  DivergentKernel,
  MissingMu,
  StructuralViolation,
  InvalidArgument,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg, long offset = -1)
      : std::runtime_error(msg), code_(code), offset_(offset) {}
  ErrorCode code() const { return code_; }
  // byte offset for parse errors, -1 otherwise
  long offset() const { return offset_; }

 private:
  ErrorCode code_;
  long offset_;
};

}  // namespace loopcorr
