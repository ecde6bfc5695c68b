#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rootfinder {

enum class ErrorKind {
  CycleOrDisconnected,
  DuplicateEdge,
  SelfLoop,
  BadVertex,
  BadSize,
  BadArgument,
  BadT,
  UnsupportedModel,
  TooLarge,
  NonIntegerResult,
  Parse,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::CycleOrDisconnected: return "CycleOrDisconnected";
    case ErrorKind::DuplicateEdge: return "DuplicateEdge";
    case ErrorKind::SelfLoop: return "SelfLoop";
    case ErrorKind::BadVertex: return "BadVertex";
    case ErrorKind::BadSize: return "BadSize";
    case ErrorKind::BadArgument: return "BadArgument";
    case ErrorKind::BadT: return "BadT";
    case ErrorKind::UnsupportedModel: return "UnsupportedModel";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::NonIntegerResult: return "NonIntegerResult";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the ErrorKind tags.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rootfinder
