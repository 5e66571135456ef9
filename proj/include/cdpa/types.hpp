#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace cdpa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class Errc {
  InvalidInput,
  DegenerateThreshold,
  RankTooLarge,
  ZeroSignal,
  TooFewSamples,
  RankDeficiency,
  ChannelRankDeficient,
  BadDimensions,
  TooLarge,
  BadConfig,
  Io,
  Parse,
};

const char* errc_name(Errc code) noexcept;

// True for errors caused by the caller's inputs rather than by the numerics.
bool is_input_error(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace cdpa
