#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ganav {

enum class Errc {
  InvalidArgument,
  InvalidDepth,
  OutOfBounds,
  EmptyTarget,
  PromptCountError,
  CountMismatch,
  EmptyResponse,
  UnknownCategory,
  RemoteUnavailable,
  IndivisibleImage,
  ProviderFailure,
  ZeroVector,
  DimensionMismatch,
  SourceBlocked,
  Unreachable,
  EmptyPath,
  PoseInObstacle,
  GenerationFailed,
  SceneLoadError,
  EmptyResults,
  InvalidShortestPath,
  NotAFailure,
  EmptySuite,
  ParseError,
  IoError,
};

std::string_view to_string(Errc code) noexcept;

// Every failure surfaced by the library carries one of the codes above so
// callers and tests can branch on the kind rather than the message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& detail);

}  // namespace ganav
