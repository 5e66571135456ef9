#include "cdpa/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "cdpa/align.hpp"
#include "cdpa/linalg.hpp"
#include "cdpa/parallel.hpp"

namespace cdpa {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr Index kSetup2Rows = 900;

// cos of an angle in degrees, exactly zero from 90 degrees on.
double cos_deg(double deg) { return deg >= 90.0 ? 0.0 : std::cos(deg * kDeg); }

Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = nd(rng);
  return m;
}

Matrix orthonormal_columns(const Matrix& g) {
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
}

// Fills columns [fixed, k) of v with random directions orthogonal to the
// first `fixed` columns.
void complete_randomly(Matrix& v, Index fixed, std::mt19937_64& rng) {
  const Index extra = v.cols() - fixed;
  if (extra <= 0) return;
  Matrix g = gaussian(v.rows(), extra, rng);
  const Matrix head = v.leftCols(fixed);
  for (int pass = 0; pass < 2; ++pass) g -= head * (head.transpose() * g);
  v.rightCols(extra) = orthonormal_columns(g);
}

}  // namespace

SimulationConfig normalize(SimulationConfig cfg) {
  if (cfg.setup != 1 && cfg.setup != 2) throw Error(Errc::BadConfig, "setup must be 1 or 2");
  cfg.p2 = cfg.setup == 1 ? cfg.p1 : kSetup2Rows;
  if (!(cfg.theta_deg >= 0.0) || cfg.theta_deg > 90.0) throw Error(Errc::BadConfig, "theta must lie in [0, 90] degrees");
  if (!(cfg.noise_var >= 0.0) || !std::isfinite(cfg.noise_var)) throw Error(Errc::BadConfig, "noise variance must be >= 0");
  if (cfg.n < 20) throw Error(Errc::BadConfig, "n must be at least 20");
  if (std::min(cfg.p1, cfg.p2) < 2 * kSetupRank) throw Error(Errc::BadConfig, "p1 and p2 must be at least 10");
  if (cfg.replications < 1) throw Error(Errc::BadConfig, "replications must be >= 1");
  return cfg;
}

Vector setup_eigenvalues() {
  Vector l(kSetupRank);
  for (int i = 0; i < kSetupRank; ++i) l(i) = 500.0 - 100.0 * i;
  return l;
}

Vector planted_correlations(double theta) {
  Vector rho(kSetupRank);
  rho << cos_deg(std::min(theta, 30.0)), cos_deg(std::min(theta, 60.0)), cos_deg(theta), cos_deg(theta + 15.0),
      cos_deg(std::min(theta + 30.0, 90.0));
  return rho;
}

int planted_r12(double theta) {
  const Vector rho = planted_correlations(theta);
  return static_cast<int>((rho.array() > 0.0).count());
}

SetupStructure make_structure(const SimulationConfig& raw) {
  const SimulationConfig cfg = normalize(raw);
  SetupStructure s;
  s.eigvalues = setup_eigenvalues();
  s.correlations = planted_correlations(cfg.theta_deg);
  s.r12 = planted_r12(cfg.theta_deg);
  std::mt19937_64 rng(cfg.structure_seed);

  // The planted block lives in the top q rows shared by both datasets.
  const Index q = std::min(cfg.p1, cfg.p2);
  const int r = s.r12;
  s.v1 = Matrix::Zero(cfg.p1, kSetupRank);
  s.v2 = Matrix::Zero(cfg.p2, kSetupRank);
  if (r > 0) {
    const Matrix basis = orthonormal_columns(gaussian(q, 2 * r, rng));
    const Matrix q1 = basis.leftCols(r);
    const Matrix perp = basis.rightCols(r);
    const Vector c = s.correlations.head(r);
    const Vector sn = (1.0 - c.array().square()).max(0.0).sqrt().matrix();
    s.v1.block(0, 0, q, r) = q1;
    s.v2.block(0, 0, q, r) = q1 * c.asDiagonal() + perp * sn.asDiagonal();
  }
  complete_randomly(s.v1, r, rng);
  complete_randomly(s.v2, r, rng);

  PopulationModel model;
  model.v1 = s.v1;
  model.v2 = s.v2;
  model.lambda1 = s.eigvalues;
  model.lambda2 = s.eigvalues;
  model.cross_cov = s.correlations.asDiagonal();
  s.population = population_cdpa(model);
  return s;
}

SimulatedPair generate_setup(const SetupStructure& s, const SimulationConfig& raw, std::uint64_t seed) {
  const SimulationConfig cfg = normalize(raw);
  std::mt19937_64 rng(seed);
  const Index n = cfg.n;
  SimulatedPair out;
  GroundTruth& t = out.truth;
  t.z1 = gaussian(kSetupRank, n, rng);
  const Matrix w = gaussian(kSetupRank, n, rng);
  const Vector rho = s.correlations;
  const Vector comp = (1.0 - rho.array().square()).max(0.0).sqrt().matrix();
  t.z2 = rho.asDiagonal() * t.z1 + comp.asDiagonal() * w;

  const Vector root = s.eigvalues.cwiseSqrt();
  t.x[0] = s.v1 * root.asDiagonal() * t.z1;
  t.x[1] = s.v2 * root.asDiagonal() * t.z2;
  const double sd = std::sqrt(cfg.noise_var);
  Matrix y1 = t.x[0] + sd * gaussian(cfg.p1, n, rng);
  Matrix y2 = t.x[1] + sd * gaussian(cfg.p2, n, rng);
  out.y1 = make_observed(std::move(y1));
  out.y2 = make_observed(std::move(y2));

  const auto& pop = s.population;
  const Index p = std::max(cfg.p1, cfg.p2);
  const double tr = s.eigvalues.sum();
  t.traces = {tr, tr};
  t.r12 = pop.r12;
  t.trace_cov_c = pop.trace_cov_c;
  t.cosines = pop.pair.cosines;
  t.c = pop.map1 * t.z1 + pop.map2 * t.z2;
  for (std::size_t k = 0; k < 2; ++k) {
    t.c_scaled[k] = std::sqrt(tr) * t.c;
    t.common[k] = pop.source_map1[k] * t.z1 + pop.source_map2[k] * t.z2;
    t.h[k] = t.common[k] - t.c_scaled[k];
    t.delta[k] = zero_pad_rows(t.x[k], p) - t.c_scaled[k];
  }
  return out;
}

SimulatedPair generate_setup(const SimulationConfig& cfg) {
  return generate_setup(make_structure(cfg), cfg, cfg.seed);
}

double closed_form_explained_variance(double theta) {
  const Vector lambda = setup_eigenvalues();
  const Vector rho = planted_correlations(theta);
  const double tr = lambda.sum();
  double total = 0.0;
  for (int l = 0; l < kSetupRank; ++l) {
    if (rho(l) <= 0.0) continue;
    const double t = std::sqrt((1.0 - rho(l)) / (1.0 + rho(l)));  // tan of half the angle
    total += lambda(l) * std::pow(1.0 - t, 4) * std::pow(1.0 + rho(l), 2) / (4.0 * tr);
  }
  return total;
}

OracleValue oracle_explained_variance(double theta, Index p, std::uint64_t structure_seed, DualWeightVariant variant) {
  SimulationConfig cfg;
  cfg.theta_deg = theta;
  cfg.p1 = p;
  cfg.structure_seed = structure_seed;
  SetupStructure s = make_structure(cfg);
  OracleValue v;
  v.theta_deg = theta;
  v.closed_form = closed_form_explained_variance(theta);
  if (variant == DualWeightVariant::Own) {
    v.matrix_level = s.population.trace_cov_c;
    v.contributions = s.population.contributions;
  } else {
    PopulationModel model{s.v1, s.v2, s.eigvalues, s.eigvalues, Matrix(s.correlations.asDiagonal()), variant};
    const auto pop = population_cdpa(model);
    v.matrix_level = pop.trace_cov_c;
    v.contributions = pop.contributions;
  }
  return v;
}

namespace {

NormPair scaled(const Matrix& err, double fro_den, double spec_den) {
  NormPair out;
  out.frobenius = fro_den > 0.0 ? linalg::frobenius_sq(err) / fro_den : 0.0;
  if (spec_den > 0.0) {
    const double s = linalg::spectral_norm(err);
    out.spectral = s * s / spec_den;
  }
  return out;
}

double sq(double v) { return v * v; }

}  // namespace

ErrorReport error_metrics(const CdpaResult& est, const GroundTruth& truth) {
  const auto& pd = est.pattern;
  if (pd.c.rows() != truth.c.rows() || pd.c.cols() != truth.c.cols())
    throw Error(Errc::BadDimensions, "estimate and truth live in different geometries");
  ErrorReport r;
  std::array<Matrix, 2> xs{truth.x[0] / std::sqrt(truth.traces[0]), truth.x[1] / std::sqrt(truth.traces[1])};
  const double fro_den = 0.5 * (linalg::frobenius_sq(xs[0]) + linalg::frobenius_sq(xs[1]));
  const double spec_den = 0.5 * (sq(linalg::spectral_norm(xs[0])) + sq(linalg::spectral_norm(xs[1])));
  r.scaled_sq_error_c = scaled(pd.c - truth.c, fro_den, spec_den);
  for (std::size_t k = 0; k < 2; ++k) {
    r.scaled_sq_error_ck[k] = scaled(pd.c_scaled[k] - truth.c_scaled[k], linalg::frobenius_sq(truth.x[k]),
                                     sq(linalg::spectral_norm(truth.x[k])));
  }
  r.trace_abs_error = std::abs(pd.explained - truth.trace_cov_c);
  r.trace_rel_error = truth.trace_cov_c > 0.0 ? r.trace_abs_error / truth.trace_cov_c : 0.0;
  const double est_obj = est.principal_cosines.squaredNorm();
  r.matching_objective_error = std::abs(est_obj - truth.cosines.squaredNorm());
  if (est.principal_cosines.size() > 0) {
    r.cos_theta_b1 = std::clamp(est.principal_cosines(0), 0.0, 1.0);
    r.theta_b1_deg = std::acos(r.cos_theta_b1) / kDeg;
  }
  return r;
}

const MetricSummary& ReplicationStudy::metric(const std::string& name) const {
  for (const auto& m : summary)
    if (m.name == name) return m;
  throw Error(Errc::InvalidInput, "unknown metric " + name);
}

namespace {

struct Column {
  const char* name;
  double (*get)(const ReplicationRow&);
};

const std::vector<Column>& columns() {
  static const std::vector<Column> cols = {
      {"r1", [](const ReplicationRow& r) { return double(r.ranks.r1); }},
      {"r2", [](const ReplicationRow& r) { return double(r.ranks.r2); }},
      {"r12", [](const ReplicationRow& r) { return double(r.ranks.r12); }},
      {"r12_zero", [](const ReplicationRow& r) { return r.r12_zero ? 1.0 : 0.0; }},
      {"explained", [](const ReplicationRow& r) { return r.explained; }},
      {"scaled_sq_error_c_fro", [](const ReplicationRow& r) { return r.errors.scaled_sq_error_c.frobenius; }},
      {"scaled_sq_error_c_spec", [](const ReplicationRow& r) { return r.errors.scaled_sq_error_c.spectral; }},
      {"scaled_sq_error_c1_fro", [](const ReplicationRow& r) { return r.errors.scaled_sq_error_ck[0].frobenius; }},
      {"scaled_sq_error_c1_spec", [](const ReplicationRow& r) { return r.errors.scaled_sq_error_ck[0].spectral; }},
      {"scaled_sq_error_c2_fro", [](const ReplicationRow& r) { return r.errors.scaled_sq_error_ck[1].frobenius; }},
      {"scaled_sq_error_c2_spec", [](const ReplicationRow& r) { return r.errors.scaled_sq_error_ck[1].spectral; }},
      {"trace_abs_error", [](const ReplicationRow& r) { return r.errors.trace_abs_error; }},
      {"trace_rel_error", [](const ReplicationRow& r) { return r.errors.trace_rel_error; }},
      {"matching_objective_error", [](const ReplicationRow& r) { return r.errors.matching_objective_error; }},
      {"cos_theta_b1", [](const ReplicationRow& r) { return r.errors.cos_theta_b1; }},
      {"theta_b1_deg", [](const ReplicationRow& r) { return r.errors.theta_b1_deg; }},
  };
  return cols;
}

}  // namespace

ReplicationStudy run_replications(const SimulationConfig& raw) {
  ReplicationStudy study;
  study.config = normalize(raw);
  const SimulationConfig& cfg = study.config;
  const SetupStructure structure = make_structure(cfg);
  study.population_trace = structure.population.trace_cov_c;
  study.rows.resize(static_cast<std::size_t>(cfg.replications));

  CdpaConfig pipe;
  pipe.sign = SignMode::Plus;
  pipe.permutation = PermutationMode::Identity;
  if (!cfg.select_ranks) pipe.ranks = RankProfile{kSetupRank, kSetupRank, structure.r12};

  parallel_for(study.rows.size(), resolve_threads(cfg.threads), [&](std::size_t i) {
    ReplicationRow& row = study.rows[i];
    row.index = static_cast<int>(i);
    row.seed = cfg.seed ^ static_cast<std::uint64_t>(i);
    const SimulatedPair data = generate_setup(structure, cfg, row.seed);
    const CdpaResult est = estimate_cdpa(data.y1, data.y2, pipe);
    row.ranks = est.ranks;
    row.r12_zero = est.r12_zero;
    row.explained = est.pattern.explained;
    row.errors = error_metrics(est, data.truth);
  });

  const auto count = static_cast<double>(study.rows.size());
  for (const auto& col : columns()) {
    MetricSummary m;
    m.name = col.name;
    for (const auto& row : study.rows) m.mean += col.get(row);
    m.mean /= count;
    if (study.rows.size() > 1) {
      double ss = 0.0;
      for (const auto& row : study.rows) ss += sq(col.get(row) - m.mean);
      m.sd = std::sqrt(ss / (count - 1.0));
    }
    study.summary.push_back(m);
  }
  return study;
}

std::string replication_csv_header() {
  std::string h = "setup,theta_deg,p1,p2,n,noise_var,replication,seed";
  for (const auto& col : columns()) h += std::string(",") + col.name;
  return h;
}

std::string replication_csv_rows(const ReplicationStudy& study) {
  std::ostringstream os;
  os << std::setprecision(17);
  const auto& c = study.config;
  for (const auto& row : study.rows) {
    os << c.setup << ',' << c.theta_deg << ',' << c.p1 << ',' << c.p2 << ',' << c.n << ',' << c.noise_var << ','
       << row.index << ',' << row.seed;
    for (const auto& col : columns()) os << ',' << col.get(row);
    os << '\n';
  }
  return os.str();
}

}  // namespace cdpa
