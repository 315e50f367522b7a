#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stratjoin {

enum class ErrorKind {
  kSchema,
  kEmptyRelation,
  kCapacity,
  kDegenerateWeight,
  kConstraint,
  kInvalidPlan,
  kSearchTooLarge,
  kInstanceTooLarge,
  kUnderpowered,
  kSpec,
  kShapeMismatch,
  kIo,
  kInvalidArgument,
};

std::string_view to_string(ErrorKind kind);

// All library failures surface as this exception; kind() is stable and is
// what the CLI prints in its machine-readable error document.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace stratjoin
