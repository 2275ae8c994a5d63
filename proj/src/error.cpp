#include "fqn/error.hpp"

namespace fqn {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidParameter: return "invalid parameter";
    case ErrorCode::kRejectedSample: return "rejected sample";
    case ErrorCode::kNotReady: return "not ready";
    case ErrorCode::kInvalidRank: return "invalid rank";
    case ErrorCode::kInternal: return "internal consistency error";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown error";
}

void raise(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace fqn
