#pragma once

#include <stdexcept>
#include <string>

namespace gzsl {

enum class ErrorCode {
  LabelOutOfRange,
  NonFiniteValue,
  EmptyDataset,
  ZeroPrototype,
  NotEnoughClasses,
  EmptyPool,
  SingularSystem,
  DivergedLoss,
  EmptyInput,
  EmptyClass,
  ShapeMismatch,
  NoSeenClass,
  NoUnseenClass,
  BadMagic,
  TruncatedPayload,
  NonNumericCell,
  MissingFile,
  IoError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::ZeroPrototype: return "ZeroPrototype";
    case ErrorCode::NotEnoughClasses: return "NotEnoughClasses";
    case ErrorCode::EmptyPool: return "EmptyPool";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::DivergedLoss: return "DivergedLoss";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NoSeenClass: return "NoSeenClass";
    case ErrorCode::NoUnseenClass: return "NoUnseenClass";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gzsl
