#include "stratjoin/error.h"

namespace stratjoin {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kEmptyRelation: return "empty_relation";
    case ErrorKind::kCapacity: return "capacity";
    case ErrorKind::kDegenerateWeight: return "degenerate_weight";
    case ErrorKind::kConstraint: return "constraint";
    case ErrorKind::kInvalidPlan: return "invalid_plan";
    case ErrorKind::kSearchTooLarge: return "search_too_large";
    case ErrorKind::kInstanceTooLarge: return "instance_too_large";
    case ErrorKind::kUnderpowered: return "underpowered";
    case ErrorKind::kSpec: return "spec";
    case ErrorKind::kShapeMismatch: return "shape_mismatch";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kInvalidArgument: return "invalid_argument";
  }
  return "unknown";
}

}  // namespace stratjoin
