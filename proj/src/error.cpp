#include "pacer/error.hpp"

namespace pacer {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::InvalidDuration: return "InvalidDuration";
    case ErrorCode::InvalidSpacing: return "InvalidSpacing";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::BindError: return "BindError";
    case ErrorCode::ConnectError: return "ConnectError";
  }
  return "Unknown";
}

}  // namespace pacer
