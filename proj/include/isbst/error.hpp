#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace isbst {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidDiagram,
  kTypedInput,
  kInvalidMutation,
  kUnknownVersion,
  kUnknownSession,
  kUnknownCandidate,
  kUnknownObjective,
  kBusy,
  kStopped,
  kStaleSequence,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Every recoverable failure in the library surfaces as this exception; the
// code travels over the wire protocol unchanged.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace isbst
