#pragma once

#include <stdexcept>
#include <string>

namespace seedo {

/// Every failure the library reports carries one of these kinds so callers
/// (and the CLI's exit-code mapping) can branch without string matching.
enum class ErrorKind {
  MissingFile,
  SchemaError,
  OrderError,
  DuplicateTrackId,
  DegenerateContour,
  StepParseError,
  EmptyKeypoints,
  TooSparse,
  EmptyImage,
  MissingFrameImage,
  ParseError,
  CountMismatch,
  UnknownObject,
  UnknownRelation,
  SelfReference,
  EmptyPlan,
  Transport,
  FixtureMissing,
  EmptyGroundTruth,
  EmptyCategory,
  LengthMismatch,
  ConfigError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

/// Error with a 1-based line (or 0-based step) position attached.
class PositionedError : public Error {
 public:
  PositionedError(ErrorKind kind, std::size_t position, const std::string& message)
      : Error(kind, message), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace seedo
