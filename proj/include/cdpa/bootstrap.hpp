#pragma once

#include <cstdint>
#include <vector>

#include "cdpa/pipeline.hpp"

namespace cdpa {

struct BootstrapConfig {
  int replicates = 1000;
  double level = 0.95;
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
  int sign = 1;
  DualWeightVariant variant = DualWeightVariant::Own;
};

/// Percentile interval of ||C*||_F^2 / n over column resamples.
struct BootstrapInterval {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  int replicates = 0;
  int failed = 0;  // resamples whose decomposition hit a numerical error
  std::vector<double> values;  // successful replicate statistics, by replicate index
};

/// Linear-interpolation quantile of sorted data, q in [0, 1].
double sorted_quantile(const std::vector<double>& sorted, double q);

/// Columns drawn with replacement; seed for replicate i is master ^ i.
std::vector<Index> resample_columns(Index n, std::uint64_t seed);

BootstrapInterval bootstrap_ci(const ObservedMatrix& y1, const ObservedMatrix& y2, const RankProfile& ranks,
                               const PermutationPlan& plan, const BootstrapConfig& cfg);

}  // namespace cdpa
