#include "cdpa/pipeline.hpp"

#include <algorithm>
#include <utility>

namespace cdpa {

const char* permutation_mode_name(PermutationMode m) noexcept {
  switch (m) {
    case PermutationMode::Identity: return "identity";
    case PermutationMode::Provided: return "provided";
    case PermutationMode::Dspfp: return "dspfp";
    case PermutationMode::Exhaustive: return "exhaustive";
  }
  return "unknown";
}

const char* sign_mode_name(SignMode m) noexcept {
  switch (m) {
    case SignMode::Auto: return "auto";
    case SignMode::Plus: return "plus";
    case SignMode::Minus: return "minus";
  }
  return "unknown";
}

namespace {

std::size_t u(int k) { return static_cast<std::size_t>(k); }

// Everything up to the D-CCA split, in the internal frame where slot 0 is the
// row reference (the dataset with more variables).
struct Stage {
  std::array<SignalEstimate, 2> x;
  std::array<SignalCovariance, 2> cov;
  CanonicalSystem system;
  CommonFactorSet c0;
  std::array<SourceDecomposition, 2> src;
  std::array<MixingChannel, 2> channel;
  std::array<double, 2> noise{};
  int r12 = 0;
};

Stage dcca_stage(const ObservedMatrix& ya, const ObservedMatrix& yb, int ra, int rb, int r12,
                 std::vector<std::string>* warnings) {
  Stage st;
  st.x[0] = soft_threshold_denoise(ya, ra);
  st.x[1] = soft_threshold_denoise(yb, rb);
  st.noise = {noise_trace(ya, st.x[0]), noise_trace(yb, st.x[1])};
  st.cov[0] = signal_covariance(st.x[0]);
  st.cov[1] = signal_covariance(st.x[1]);
  const auto effective = static_cast<int>(std::min(st.cov[0].eigvalues.size(), st.cov[1].eigvalues.size()));
  if (r12 > effective) {
    if (warnings) warnings->push_back("r12 reduced to the number of nonzero denoised singular values");
    r12 = effective;
  }
  st.r12 = r12;
  st.system = canonical_system(st.cov[0], st.cov[1], st.x[0], st.x[1], r12);
  st.c0 = common_factor_scores(st.system, common_factor_coefficients(st.system.correlations));
  for (int k = 0; k < 2; ++k) {
    auto [src, ch] = source_decomposition(st.x[u(k)], st.system, st.c0, k + 1);
    st.src[u(k)] = std::move(src);
    st.channel[u(k)] = std::move(ch);
  }
  return st;
}

struct Bases {
  Matrix q1, q2a;
};

Bases channel_bases(const Stage& st) {
  const Index p = st.x[0].variables();
  return {orthonormal_basis(st.channel[0]), orthonormal_basis(zero_pad(st.channel[1], p))};
}

PatternDecomposition pattern_stage(const Stage& st, const Bases& q, const PermutationPlan& plan,
                                   DualWeightVariant variant, ChannelSubspacePair* pair_out) {
  const Index p = st.x[0].variables();
  const auto pair = principal_angles(q.q1, q.q2a, plan);
  const auto basis = channel_common_basis(pair);
  const MixingChannel b2 = {pad_and_permute(st.channel[1].b, p, plan.perm), 2};
  const auto weights = dual_weights(pair, st.channel[0], b2, {st.cov[0].trace, st.cov[1].trace}, variant);
  const Matrix c = common_pattern(basis, weights, st.c0);
  std::array<Matrix, 2> aligned_x{st.x[0].xhat, pad_and_permute(st.x[1].xhat, p, plan.perm)};
  std::array<SourceDecomposition, 2> aligned_src{
      st.src[0], SourceDecomposition{pad_and_permute(st.src[1].c, p, plan.perm),
                                     pad_and_permute(st.src[1].d, p, plan.perm)}};
  if (pair_out) *pair_out = pair;
  return pattern_decomposition(aligned_x, aligned_src, c, {st.cov[0].trace, st.cov[1].trace});
}

template <class T>
void swap_pair(std::array<T, 2>& a) {
  std::swap(a[0], a[1]);
}

void relabel(PatternDecomposition& pd) {
  swap_pair(pd.c_scaled);
  swap_pair(pd.h);
  swap_pair(pd.delta);
  swap_pair(pd.aligned_x);
  swap_pair(pd.aligned_common);
  swap_pair(pd.aligned_distinct);
}

ObservedMatrix negated(const ObservedMatrix& y) { return ObservedMatrix{-y.values, y.row_centered}; }

void check_pair(const ObservedMatrix& y1, const ObservedMatrix& y2) {
  if (y1.samples() != y2.samples()) throw Error(Errc::BadDimensions, "datasets have different sample counts");
}

void check_ranks(const RankProfile& r, const ObservedMatrix& y1, const ObservedMatrix& y2) {
  const Index n = y1.samples();
  if (r.r1 < 0 || r.r2 < 0 || r.r12 < 0 || r.r12 > std::min(r.r1, r.r2))
    throw Error(Errc::InvalidInput, "ranks must satisfy 0 <= r12 <= min(r1, r2)");
  if (r.r1 > std::min(n, y1.variables()) || r.r2 > std::min(n, y2.variables()))
    throw Error(Errc::RankTooLarge, "rank exceeds min(n, p)");
}

// Identity and provided plans; the objective is filled in by estimate_fixed.
PermutationPlan resolve_plan(Index p, const CdpaConfig& cfg) {
  PermutationPlan plan;
  switch (cfg.permutation) {
    case PermutationMode::Identity:
      plan.perm = identity_permutation(p);
      plan.method = PermutationMethod::Identity;
      break;
    case PermutationMode::Provided:
      if (static_cast<Index>(cfg.provided_permutation.size()) != p || !is_bijection(cfg.provided_permutation))
        throw Error(Errc::InvalidInput, "provided permutation must be a bijection on the reference rows");
      plan.perm = cfg.provided_permutation;
      plan.method = PermutationMethod::Provided;
      break;
    case PermutationMode::Dspfp:
    case PermutationMode::Exhaustive:
      throw Error(Errc::BadConfig, "matching modes need channel bases");
  }
  return plan;
}

PermutationPlan resolve_plan(const Bases& q, const CdpaConfig& cfg) {
  if (cfg.permutation == PermutationMode::Dspfp) return dspfp_match(build_match_problem(q.q1, q.q2a), cfg.dspfp);
  if (cfg.permutation == PermutationMode::Exhaustive) return exhaustive_match(q.q1, q.q2a);
  return resolve_plan(q.q1.rows(), cfg);
}

SignalEstimate zero_or_denoised(const ObservedMatrix& y, int r) {
  if (r >= 1) return soft_threshold_denoise(y, r);
  SignalEstimate est;
  est.xhat = Matrix::Zero(y.variables(), y.samples());
  est.raw_singular_values = Vector::Zero(0);
  est.soft_singular_values = Vector::Zero(0);
  est.left_vectors = Matrix::Zero(y.variables(), 0);
  est.right_vectors = Matrix::Zero(y.samples(), 0);
  return est;
}

// No shared signal: C = 0, every signal is distinctive.
CdpaResult trivial_result(const ObservedMatrix& y1, const ObservedMatrix& y2, const RankProfile& ranks,
                          bool swapped) {
  CdpaResult out;
  out.r12_zero = true;
  out.swapped = swapped;
  out.ranks = ranks;
  const Index p = std::max(y1.variables(), y2.variables());
  out.reference_rows = p;
  const Index n = y1.samples();
  std::array<SignalEstimate, 2> x{zero_or_denoised(y1, ranks.r1), zero_or_denoised(y2, ranks.r2)};
  const std::array<const ObservedMatrix*, 2> ys{&y1, &y2};
  auto& pd = out.pattern;
  pd.c = Matrix::Zero(p, n);
  for (int k = 0; k < 2; ++k) {
    const Matrix xa = zero_pad_rows(x[u(k)].xhat, p);
    pd.c_scaled[u(k)] = Matrix::Zero(p, n);
    pd.h[u(k)] = Matrix::Zero(p, n);
    pd.delta[u(k)] = xa;
    pd.aligned_x[u(k)] = xa;
    pd.aligned_common[u(k)] = Matrix::Zero(p, n);
    pd.aligned_distinct[u(k)] = xa;
    out.traces[u(k)] = x[u(k)].xhat.squaredNorm() / static_cast<double>(n);
  }
  pd.explained = 0.0;
  out.permutation.perm = identity_permutation(p);
  out.permutation.method = PermutationMethod::Identity;
  out.sign = choose_sign(0.0, 0.0);
  out.diagnostics = compute_diagnostics(x[0], x[1], {noise_trace(*ys[0], x[0]), noise_trace(*ys[1], x[1])}, ranks);
  out.warnings.push_back("no shared signal detected (r12 = 0); common pattern set to zero");
  return out;
}

}  // namespace

CdpaResult estimate_fixed(const ObservedMatrix& y1, const ObservedMatrix& y2, const RankProfile& ranks,
                          const PermutationPlan& plan_in, int sign, DualWeightVariant variant) {
  check_pair(y1, y2);
  check_ranks(ranks, y1, y2);
  if (ranks.r12 == 0) throw Error(Errc::InvalidInput, "fixed-rank decomposition needs r12 >= 1");
  const bool swapped = y1.variables() < y2.variables();
  PermutationPlan plan = plan_in;
  if (plan.perm.empty()) plan.perm = identity_permutation(std::max(y1.variables(), y2.variables()));
  const ObservedMatrix y2s = sign < 0 ? negated(y2) : y2;
  const ObservedMatrix& ya = swapped ? y2s : y1;
  const ObservedMatrix& yb = swapped ? y1 : y2s;
  CdpaResult out;
  const Stage st = dcca_stage(ya, yb, swapped ? ranks.r2 : ranks.r1, swapped ? ranks.r1 : ranks.r2, ranks.r12,
                              &out.warnings);
  const Bases q = channel_bases(st);
  ChannelSubspacePair pair;
  out.pattern = pattern_stage(st, q, plan, variant, &pair);
  out.permutation = plan;
  out.permutation.objective = cosine_objective(q.q1, q.q2a, plan.perm);
  out.ranks = ranks;
  out.ranks.r12 = st.r12;
  out.swapped = swapped;
  out.reference_rows = ya.variables();
  out.canonical_correlations = st.system.correlations;
  out.principal_cosines = pair.cosines;
  out.traces = {st.cov[0].trace, st.cov[1].trace};
  out.sign.sign = sign < 0 ? -1 : 1;
  std::array<double, 2> noise = st.noise;
  if (swapped) {
    relabel(out.pattern);
    std::swap(out.traces[0], out.traces[1]);
    std::swap(noise[0], noise[1]);
  }
  const SignalEstimate& x1 = swapped ? st.x[1] : st.x[0];
  const SignalEstimate& x2 = swapped ? st.x[0] : st.x[1];
  out.diagnostics = compute_diagnostics(x1, x2, noise, out.ranks);
  return out;
}

CdpaResult estimate_cdpa(const ObservedMatrix& y1_in, const ObservedMatrix& y2_in, const CdpaConfig& config) {
  check_pair(y1_in, y2_in);
  const ObservedMatrix y1 = config.center && !y1_in.row_centered ? center_rows(y1_in) : y1_in;
  const ObservedMatrix y2 = config.center && !y2_in.row_centered ? center_rows(y2_in) : y2_in;
  const bool swapped = y1.variables() < y2.variables();

  RankProfile ranks;
  std::optional<RankSelection> selection;
  if (config.ranks) {
    ranks = *config.ranks;
  } else {
    selection = select_ranks(y1, y2, config.alpha);
    ranks = selection->ranks;
  }
  check_ranks(ranks, y1, y2);
  if (ranks.r12 == 0) {
    CdpaResult out = trivial_result(y1, y2, ranks, swapped);
    out.selection = selection;
    return out;
  }

  // Alignment is chosen once; it does not depend on the sign of dataset 2.
  std::vector<std::string> warnings;
  PermutationPlan plan;
  if (config.permutation == PermutationMode::Dspfp || config.permutation == PermutationMode::Exhaustive) {
    const ObservedMatrix& ya = swapped ? y2 : y1;
    const ObservedMatrix& yb = swapped ? y1 : y2;
    const Stage st = dcca_stage(ya, yb, swapped ? ranks.r2 : ranks.r1, swapped ? ranks.r1 : ranks.r2,
                                ranks.r12, &warnings);
    plan = resolve_plan(channel_bases(st), config);
  } else {
    plan = resolve_plan(std::max(y1.variables(), y2.variables()), config);
  }

  SignChoice choice;
  switch (config.sign) {
    case SignMode::Plus: choice.sign = 1; break;
    case SignMode::Minus: choice.sign = -1; break;
    case SignMode::Auto: {
      const auto plus = estimate_fixed(y1, y2, ranks, plan, 1, config.variant);
      const auto minus = estimate_fixed(y1, y2, ranks, plan, -1, config.variant);
      choice = choose_sign(plus.pattern, minus.pattern);
      CdpaResult out = choice.sign > 0 ? plus : minus;
      out.sign = choice;
      out.selection = selection;
      out.warnings.insert(out.warnings.begin(), warnings.begin(), warnings.end());
      return out;
    }
  }
  CdpaResult out = estimate_fixed(y1, y2, ranks, plan, choice.sign, config.variant);
  (choice.sign > 0 ? choice.trace_plus : choice.trace_minus) = out.pattern.explained;
  out.sign = choice;
  out.selection = selection;
  return out;
}

}  // namespace cdpa
