#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cdpa/align.hpp"
#include "cdpa/dcca.hpp"
#include "cdpa/denoise.hpp"
#include "cdpa/pattern.hpp"
#include "cdpa/permutation.hpp"
#include "cdpa/subspace.hpp"

namespace cdpa {

enum class PermutationMode { Identity, Provided, Dspfp, Exhaustive };
enum class SignMode { Auto, Plus, Minus };

const char* permutation_mode_name(PermutationMode m) noexcept;
const char* sign_mode_name(SignMode m) noexcept;

struct CdpaConfig {
  std::optional<RankProfile> ranks;  // unset: ED + screen + MDL-IC
  double alpha = 0.05;               // family-wise level of the correlation screen
  bool center = false;
  PermutationMode permutation = PermutationMode::Identity;
  std::vector<Index> provided_permutation;  // used with PermutationMode::Provided
  DspfpConfig dspfp;
  SignMode sign = SignMode::Auto;
  DualWeightVariant variant = DualWeightVariant::Own;
};

struct CdpaResult {
  PatternDecomposition pattern;  // pairs indexed by the caller's dataset order
  RankProfile ranks;
  std::optional<RankSelection> selection;
  PermutationPlan permutation;
  SignChoice sign;
  bool r12_zero = false;  // trivial decomposition: no shared signal detected
  bool swapped = false;   // dataset 2 had more rows and is the row reference
  Index reference_rows = 0;
  Vector canonical_correlations;
  Vector principal_cosines;
  std::array<double, 2> traces{};
  Diagnostics diagnostics;
  std::vector<std::string> warnings;
};

/// Full sample-level decomposition.
CdpaResult estimate_cdpa(const ObservedMatrix& y1, const ObservedMatrix& y2, const CdpaConfig& config);

/// Decomposition with ranks, permutation and sign all fixed (no selection).
/// Used by the bootstrap and by the sign comparison. Throws when the ranks do
/// not admit a nontrivial decomposition.
CdpaResult estimate_fixed(const ObservedMatrix& y1, const ObservedMatrix& y2, const RankProfile& ranks,
                          const PermutationPlan& plan, int sign, DualWeightVariant variant);

}  // namespace cdpa
