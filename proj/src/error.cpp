#include "softcut/error.hpp"

namespace softcut {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidEncoding: return "InvalidEncoding";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::AllTokensDropped: return "AllTokensDropped";
    case Errc::UnknownType: return "UnknownType";
    case Errc::ZeroCount: return "ZeroCount";
    case Errc::ZeroDegree: return "ZeroDegree";
    case Errc::Disconnected: return "Disconnected";
    case Errc::QTooLarge: return "QTooLarge";
    case Errc::ConvergenceFailure: return "ConvergenceFailure";
    case Errc::ZeroMarginal: return "ZeroMarginal";
    case Errc::EmptyCluster: return "EmptyCluster";
    case Errc::TooFewValues: return "TooFewValues";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace softcut
