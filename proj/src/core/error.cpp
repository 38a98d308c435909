#include "puppetry/core/error.hpp"

namespace puppetry {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Encoding: return "EncodingError";
    case ErrorCode::Protocol: return "ProtocolError";
    case ErrorCode::Connectivity: return "ConnectivityError";
    case ErrorCode::EmptyClip: return "EmptyClip";
    case ErrorCode::ClipCorrupt: return "ClipCorrupt";
    case ErrorCode::FileExists: return "FileExists";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::DegenerateClip: return "DegenerateClip";
    case ErrorCode::UnknownClip: return "UnknownClip";
    case ErrorCode::NoData: return "NoData";
    case ErrorCode::DataError: return "DataError";
  }
  return "Unknown";
}

}  // namespace puppetry
