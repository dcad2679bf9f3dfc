#ifndef OPMS_ERROR_H_
#define OPMS_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace opms {

// Domain error kinds. The CLI prints the kind name and exits with status 1.
enum class ErrorCode {
  kSchemaMismatch,
  kInsufficientAttackRows,
  kDegenerateClass,
  kHeaderMismatch,
  kNonFiniteValue,
  kMalformedRow,
  kSingleClassTraining,
  kNonFiniteInput,
  kLengthMismatch,
  kNonBinaryLabel,
  kEmptyClass,
  kTooManyFeatures,
  kEmptyBackground,
  kWrongModelKind,
  kMisalignedInputs,
  kEmptyRanking,
  kUnknownFeature,
  kUnknownGroup,
  kInvalidArgument,
  kFormatError,
  kIoError,
};

std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }
  std::string_view name() const { return error_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace opms

#endif  // OPMS_ERROR_H_
