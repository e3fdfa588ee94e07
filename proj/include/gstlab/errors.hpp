#pragma once

#include <stdexcept>
#include <string>

namespace gstlab {

enum class ErrorCode {
  InvalidArgument,
  QuadratureFailure,
  NoBoundState,
  EigenNonConvergence,
  SignChange,
  Truncation,
  Normalization,
  OutsideWindow,
  WindowTooSmall,
  Precondition,
  DtTooLarge,
  Inconclusive,
  UncataloguedRegime,
  Config,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : Error(ErrorCode::QuadratureFailure, what), achieved_(achieved) {}
  // Estimated error of the best attempt.
  double achieved_tolerance() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& field_path, const std::string& what)
      : Error(ErrorCode::Config, field_path + ": " + what), field_(field_path) {}
  const std::string& field_path() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace gstlab
