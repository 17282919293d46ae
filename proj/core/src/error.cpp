#include "obsolens/error.hpp"

namespace obsolens {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedHeader: return "MalformedHeader";
    case ErrorCode::kBadTokenLine: return "BadTokenLine";
    case ErrorCode::kNonNumericYear: return "NonNumericYear";
    case ErrorCode::kYearOutOfRange: return "YearOutOfRange";
    case ErrorCode::kEmptyPattern: return "EmptyPattern";
    case ErrorCode::kAllWildcards: return "AllWildcards";
    case ErrorCode::kBareUnderscore: return "BareUnderscore";
    case ErrorCode::kEmptyDecade: return "EmptyDecade";
    case ErrorCode::kZeroDenominator: return "ZeroDenominator";
    case ErrorCode::kZeroShare: return "ZeroShare";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kNonConsecutiveDecades: return "NonConsecutiveDecades";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyMatchSet: return "EmptyMatchSet";
    case ErrorCode::kTooFewGenres: return "TooFewGenres";
    case ErrorCode::kRangeMismatch: return "RangeMismatch";
    case ErrorCode::kMissingFinding: return "MissingFinding";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kConflict: return "Conflict";
    case ErrorCode::kPortInUse: return "PortInUse";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kFormat: return "Format";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

ParseError::ParseError(ErrorCode code, std::size_t line, const std::string& message)
    : Error(code, "line " + std::to_string(line) + ": " + message), line_(line) {}

}  // namespace obsolens
