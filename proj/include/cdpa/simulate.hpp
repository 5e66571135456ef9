#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cdpa/pipeline.hpp"

namespace cdpa {

struct SimulationConfig {
  int setup = 1;
  double theta_deg = 15.0;
  Index p1 = 300;
  Index p2 = 300;  // forced to p1 (setup 1) or 900 (setup 2)
  Index n = 300;
  double noise_var = 1.0;
  std::uint64_t seed = 1;             // noise and scores; replication i uses seed ^ i
  std::uint64_t structure_seed = 7;   // loadings V_k, fixed across replications
  int replications = 1;
  unsigned threads = 1;
  bool select_ranks = true;  // false: use the planted ranks (5, 5, r12)
};

/// Applies the setup rules to p2 and validates; throws BadConfig.
SimulationConfig normalize(SimulationConfig cfg);

inline constexpr int kSetupRank = 5;
Vector setup_eigenvalues();                  // 500, 400, 300, 200, 100
Vector planted_correlations(double theta_deg);  // diagonal of cov(z1, z2)
int planted_r12(double theta_deg);

/// Loadings and population quantities for one (setup, theta, p1, p2) cell.
struct SetupStructure {
  Matrix v1, v2;
  Vector eigvalues;
  Vector correlations;  // length 5
  int r12 = 0;
  PopulationCdpa population;
};

SetupStructure make_structure(const SimulationConfig& cfg);

/// Population-level truth for one replication.
struct GroundTruth {
  Matrix z1, z2;  // 5 x n latent scores
  std::array<Matrix, 2> x;          // X_k, p_k x n
  Matrix c;                         // reference geometry
  std::array<Matrix, 2> c_scaled;   // C^(k)
  std::array<Matrix, 2> common;     // C_k, padded
  std::array<Matrix, 2> h;
  std::array<Matrix, 2> delta;
  double trace_cov_c = 0.0;
  std::array<double, 2> traces{1500.0, 1500.0};
  Vector cosines;  // population principal cosines
  int r12 = 0;
};

struct SimulatedPair {
  ObservedMatrix y1, y2;
  GroundTruth truth;
};

SimulatedPair generate_setup(const SetupStructure& structure, const SimulationConfig& cfg, std::uint64_t seed);
SimulatedPair generate_setup(const SimulationConfig& cfg);

/// Per-component sum lambda (1 - tan(t/2))^4 (1 + rho)^2 / (4 tr), cos t = rho.
double closed_form_explained_variance(double theta_deg);

struct OracleValue {
  double theta_deg = 0.0;
  double matrix_level = 0.0;
  double closed_form = 0.0;
  Vector contributions;
};

/// Both routes; the matrix-level route builds loadings on `p` rows.
OracleValue oracle_explained_variance(double theta_deg, Index p = 40, std::uint64_t structure_seed = 7,
                                      DualWeightVariant variant = DualWeightVariant::Own);

struct NormPair {
  double frobenius = 0.0;
  double spectral = 0.0;
};

struct ErrorReport {
  NormPair scaled_sq_error_c;
  std::array<NormPair, 2> scaled_sq_error_ck;
  double trace_abs_error = 0.0;
  double trace_rel_error = 0.0;
  double matching_objective_error = 0.0;  // |sum cos^2 estimated - sum cos^2 population|
  double cos_theta_b1 = 0.0;
  double theta_b1_deg = 90.0;
};

ErrorReport error_metrics(const CdpaResult& estimate, const GroundTruth& truth);

struct ReplicationRow {
  int index = 0;
  std::uint64_t seed = 0;
  RankProfile ranks;
  bool r12_zero = false;
  double explained = 0.0;
  ErrorReport errors;
};

struct MetricSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;  // zero with a single replication
};

struct ReplicationStudy {
  SimulationConfig config;
  double population_trace = 0.0;
  std::vector<ReplicationRow> rows;
  std::vector<MetricSummary> summary;

  const MetricSummary& metric(const std::string& name) const;
};

ReplicationStudy run_replications(const SimulationConfig& cfg);

std::string replication_csv_header();
std::string replication_csv_rows(const ReplicationStudy& study);

}  // namespace cdpa
