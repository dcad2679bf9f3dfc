#include "opms/error.h"

namespace opms {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kInsufficientAttackRows: return "InsufficientAttackRows";
    case ErrorCode::kDegenerateClass: return "DegenerateClass";
    case ErrorCode::kHeaderMismatch: return "HeaderMismatch";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kSingleClassTraining: return "SingleClassTraining";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kNonBinaryLabel: return "NonBinaryLabel";
    case ErrorCode::kEmptyClass: return "EmptyClass";
    case ErrorCode::kTooManyFeatures: return "TooManyFeatures";
    case ErrorCode::kEmptyBackground: return "EmptyBackground";
    case ErrorCode::kWrongModelKind: return "WrongModelKind";
    case ErrorCode::kMisalignedInputs: return "MisalignedInputs";
    case ErrorCode::kEmptyRanking: return "EmptyRanking";
    case ErrorCode::kUnknownFeature: return "UnknownFeature";
    case ErrorCode::kUnknownGroup: return "UnknownGroup";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace opms
