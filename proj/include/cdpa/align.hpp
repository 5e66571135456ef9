#pragma once

#include <cstdint>

#include "cdpa/dcca.hpp"
#include "cdpa/pattern.hpp"
#include "cdpa/permutation.hpp"

namespace cdpa {

/// Appends zero rows so the channel has p1 rows.
MixingChannel zero_pad(const MixingChannel& b2, Index p1);
Matrix zero_pad_rows(const Matrix& m, Index p1);

/// Pads to p1 rows, then applies the row permutation (empty = identity).
Matrix pad_and_permute(const Matrix& m, Index p1, const std::vector<Index>& perm);

/// Row matching posed as graph matching between two projectors.
struct MatchProblem {
  Matrix q1;
  Matrix q2a;
  Matrix m1, m2;            // Q Q^T
  Matrix m1_plus, m2_plus;  // M - shift
  Matrix a1, a2;            // off-diagonal parts of M+
  Vector d1, d2;            // diagonals of M+
  double shift = 0.0;       // min entry over both projectors

  Index size() const { return m1.rows(); }
};

MatchProblem build_match_problem(const Matrix& q1, const Matrix& q2a);

// Objectives of one permutation. All four induce the same ordering over
// permutations; the first one equals the sum of squared principal cosines.
double cosine_objective(const Matrix& q1, const Matrix& q2a, const std::vector<Index>& perm);
double projector_trace_objective(const MatchProblem& mp, const std::vector<Index>& perm);
double projector_distance_objective(const MatchProblem& mp, const std::vector<Index>& perm);
double shifted_distance_objective(const MatchProblem& mp, const std::vector<Index>& perm);
double split_objective(const MatchProblem& mp, const std::vector<Index>& perm);

/// Linear assignment maximizing sum_i w(i, perm[i]).
std::vector<Index> max_weight_assignment(const Matrix& w);

struct DspfpConfig {
  double step = 0.5;          // alpha in X <- (1 - alpha) X + alpha Y
  int max_iterations = 1000;
  double tolerance = 1e-6;
  int projection_sweeps = 30;
  double sharpness = 4.0;     // Y is rescaled to max |Y| = sharpness before projection
  // Extra runs from random doubly stochastic starts after the flat start.
  // The best discretized result over all runs is kept.
  int restarts = 20;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

struct DspfpTrace {
  int iterations = 0;  // summed over all starts
  int starts = 0;
  int converged = 0;   // starts that met the tolerance
  int best_start = 0;  // 0 is the flat start
  double relaxed_objective = 0.0;  // tr(M1 X M2 X^T) at the best start's final iterate
};

/// Fixed-point iteration Y = M1 X M2 on the unshifted projectors, projected
/// onto doubly stochastic matrices and discretized by linear assignment.
PermutationPlan dspfp_match(const MatchProblem& mp, const DspfpConfig& cfg = {}, DspfpTrace* trace = nullptr);

inline constexpr Index kExhaustiveLimit = 9;
PermutationPlan exhaustive_match(const Matrix& q1, const Matrix& q2a);

struct SignChoice {
  int sign = 1;
  double trace_plus = 0.0;
  double trace_minus = 0.0;
};

SignChoice choose_sign(const PatternDecomposition& run_plus, const PatternDecomposition& run_minus);
SignChoice choose_sign(double trace_plus, double trace_minus);

}  // namespace cdpa
