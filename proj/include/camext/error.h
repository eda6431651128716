#ifndef CAMEXT_ERROR_H_
#define CAMEXT_ERROR_H_

#include <stdexcept>
#include <string>

namespace camext {

enum class ErrorCode {
  kNonPositiveDepth,
  kBehindCamera,
  kOutOfRange,
  kNotARotation,
  kMalformedLine,
  kNonFiniteValue,
  kMissingKey,
  kDegenerateBox,
  kSingularHomography,
  kShapeMismatch,
  kChannelMismatch,
  kInvalidArgument,
  kIo,
};

const char* ErrorCodeName(ErrorCode code);

// Every failure surfaced by the library is an Error carrying a code, so
// callers (CLI, bindings, fuzzers) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Text-format failure tied to a 1-based line number of the input.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, int line, const std::string& message)
      : Error(code, "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace camext

#endif  // CAMEXT_ERROR_H_
