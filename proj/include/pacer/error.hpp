#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pacer {

enum class ErrorCode {
  InvalidConfig,
  IllegalTransition,
  InvalidDuration,
  InvalidSpacing,
  DuplicateName,
  NotFound,
  StorageFailure,
  ParseError,
  UnsupportedVersion,
  ProtocolError,
  BindError,
  ConnectError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// the session service can forward it to clients unchanged.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace pacer
