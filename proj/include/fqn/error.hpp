#pragma once

#include <stdexcept>
#include <string>

namespace fqn {

enum class ErrorCode {
  kInvalidParameter = 1,
  kRejectedSample = 2,
  kNotReady = 3,
  kInvalidRank = 4,
  kInternal = 5,
  kIo = 6,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the core carries one of the codes above so the C
// API can translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

}  // namespace fqn
