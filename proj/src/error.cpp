#include "seedo/error.hpp"

namespace seedo {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::OrderError: return "OrderError";
    case ErrorKind::DuplicateTrackId: return "DuplicateTrackId";
    case ErrorKind::DegenerateContour: return "DegenerateContour";
    case ErrorKind::StepParseError: return "StepParseError";
    case ErrorKind::EmptyKeypoints: return "EmptyKeypoints";
    case ErrorKind::TooSparse: return "TooSparse";
    case ErrorKind::EmptyImage: return "EmptyImage";
    case ErrorKind::MissingFrameImage: return "MissingFrameImage";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::CountMismatch: return "CountMismatch";
    case ErrorKind::UnknownObject: return "UnknownObject";
    case ErrorKind::UnknownRelation: return "UnknownRelation";
    case ErrorKind::SelfReference: return "SelfReference";
    case ErrorKind::EmptyPlan: return "EmptyPlan";
    case ErrorKind::Transport: return "Transport";
    case ErrorKind::FixtureMissing: return "FixtureMissing";
    case ErrorKind::EmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorKind::EmptyCategory: return "EmptyCategory";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Error";
}

}  // namespace seedo
