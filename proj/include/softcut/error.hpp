#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace softcut {

/// Error classes raised by the library. The CLI maps each class to an exit code.
enum class Errc {
  InvalidEncoding,
  EmptyInput,
  AllTokensDropped,
  UnknownType,
  ZeroCount,
  ZeroDegree,
  Disconnected,
  QTooLarge,
  ConvergenceFailure,
  ZeroMarginal,
  EmptyCluster,
  TooFewValues,
  InvalidArgument,
  Io,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace softcut
