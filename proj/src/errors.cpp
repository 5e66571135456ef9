#include "cdpa/types.hpp"

namespace cdpa {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidInput: return "InvalidInput";
    case Errc::DegenerateThreshold: return "DegenerateThreshold";
    case Errc::RankTooLarge: return "RankTooLarge";
    case Errc::ZeroSignal: return "ZeroSignal";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::RankDeficiency: return "RankDeficiency";
    case Errc::ChannelRankDeficient: return "ChannelRankDeficient";
    case Errc::BadDimensions: return "BadDimensions";
    case Errc::TooLarge: return "TooLarge";
    case Errc::BadConfig: return "BadConfig";
    case Errc::Io: return "Io";
    case Errc::Parse: return "Parse";
  }
  return "Unknown";
}

bool is_input_error(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidInput:
    case Errc::RankTooLarge:
    case Errc::TooFewSamples:
    case Errc::BadDimensions:
    case Errc::TooLarge:
    case Errc::BadConfig:
    case Errc::Io:
    case Errc::Parse:
      return true;
    default:
      return false;
  }
}

}  // namespace cdpa
