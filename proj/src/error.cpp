#include "ganav/error.hpp"

namespace ganav {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidDepth: return "InvalidDepth";
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::EmptyTarget: return "EmptyTarget";
    case Errc::PromptCountError: return "PromptCountError";
    case Errc::CountMismatch: return "CountMismatch";
    case Errc::EmptyResponse: return "EmptyResponse";
    case Errc::UnknownCategory: return "UnknownCategory";
    case Errc::RemoteUnavailable: return "RemoteUnavailable";
    case Errc::IndivisibleImage: return "IndivisibleImage";
    case Errc::ProviderFailure: return "ProviderFailure";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::SourceBlocked: return "SourceBlocked";
    case Errc::Unreachable: return "Unreachable";
    case Errc::EmptyPath: return "EmptyPath";
    case Errc::PoseInObstacle: return "PoseInObstacle";
    case Errc::GenerationFailed: return "GenerationFailed";
    case Errc::SceneLoadError: return "SceneLoadError";
    case Errc::EmptyResults: return "EmptyResults";
    case Errc::InvalidShortestPath: return "InvalidShortestPath";
    case Errc::NotAFailure: return "NotAFailure";
    case Errc::EmptySuite: return "EmptySuite";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

void fail(Errc code, const std::string& detail) { throw Error(code, detail); }

}  // namespace ganav
