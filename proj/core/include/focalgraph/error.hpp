#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace focalgraph {

enum class ErrorCode {
  MissingFile,
  ParseError,
  UnsupportedFormat,
  DimensionMismatch,
  NonMonotonicFocal,
  TooFewImages,
  InvalidArgument,
  OutOfBounds,
  DegenerateTriangle,
  IndexOutOfRange,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// All recoverable failures in the library are reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// An Error tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause) : Error(cause), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace focalgraph
