#include "cdpa/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "cdpa/parallel.hpp"

namespace cdpa {

double sorted_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw Error(Errc::InvalidInput, "quantile of an empty sample");
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<Index> resample_columns(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::vector<Index> cols(static_cast<std::size_t>(n));
  for (auto& c : cols) c = pick(rng);
  return cols;
}

namespace {

ObservedMatrix take_columns(const ObservedMatrix& y, const std::vector<Index>& cols) {
  Matrix m(y.variables(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) m.col(static_cast<Index>(j)) = y.values.col(cols[j]);
  return ObservedMatrix{std::move(m), y.row_centered};
}

}  // namespace

BootstrapInterval bootstrap_ci(const ObservedMatrix& y1, const ObservedMatrix& y2, const RankProfile& ranks,
                               const PermutationPlan& plan, const BootstrapConfig& cfg) {
  if (cfg.replicates < 100) throw Error(Errc::InvalidInput, "bootstrap needs at least 100 replicates");
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw Error(Errc::InvalidInput, "confidence level must be in (0, 1)");
  if (y1.samples() != y2.samples()) throw Error(Errc::BadDimensions, "datasets have different sample counts");

  BootstrapInterval out;
  out.level = cfg.level;
  out.replicates = cfg.replicates;
  out.point = estimate_fixed(y1, y2, ranks, plan, cfg.sign, cfg.variant).pattern.explained;

  const Index n = y1.samples();
  std::vector<std::optional<double>> stats(static_cast<std::size_t>(cfg.replicates));
  parallel_for(stats.size(), resolve_threads(cfg.threads), [&](std::size_t i) {
    const auto cols = resample_columns(n, cfg.seed ^ static_cast<std::uint64_t>(i));
    try {
      stats[i] = estimate_fixed(take_columns(y1, cols), take_columns(y2, cols), ranks, plan, cfg.sign, cfg.variant)
                     .pattern.explained;
    } catch (const Error& e) {
      if (is_input_error(e.code())) throw;
    }
  });
  for (const auto& s : stats) {
    if (s) out.values.push_back(*s);
    else ++out.failed;
  }
  if (out.values.size() * 2 < stats.size())
    throw Error(Errc::ZeroSignal, "more than half of the bootstrap resamples failed");
  std::vector<double> sorted = out.values;
  std::sort(sorted.begin(), sorted.end());
  out.lower = sorted_quantile(sorted, 0.5 * (1.0 - cfg.level));
  out.upper = sorted_quantile(sorted, 0.5 * (1.0 + cfg.level));
  return out;
}

}  // namespace cdpa
