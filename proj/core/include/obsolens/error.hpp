#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace obsolens {

enum class ErrorCode {
  kMalformedHeader,
  kBadTokenLine,
  kNonNumericYear,
  kYearOutOfRange,
  kEmptyPattern,
  kAllWildcards,
  kBareUnderscore,
  kEmptyDecade,
  kZeroDenominator,
  kZeroShare,
  kTooFewPoints,
  kNonConsecutiveDecades,
  kInvalidArgument,
  kEmptyMatchSet,
  kTooFewGenres,
  kRangeMismatch,
  kMissingFinding,
  kNotFound,
  kConflict,
  kPortInUse,
  kIo,
  kFormat,
};

std::string_view to_string(ErrorCode code);

// Every failure the library reports is an Error carrying a code; callers that
// care about the category switch on code(), everyone else reads what().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace obsolens
