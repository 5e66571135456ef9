#include "cdpa/align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cdpa/kernels.hpp"

namespace cdpa {

Matrix zero_pad_rows(const Matrix& m, Index p1) {
  if (p1 < m.rows()) throw Error(Errc::BadDimensions, "cannot pad to fewer rows than the channel has");
  Matrix out = Matrix::Zero(p1, m.cols());
  out.topRows(m.rows()) = m;
  return out;
}

MixingChannel zero_pad(const MixingChannel& b2, Index p1) {
  return MixingChannel{zero_pad_rows(b2.b, p1), b2.dataset_index};
}

Matrix pad_and_permute(const Matrix& m, Index p1, const std::vector<Index>& perm) {
  Matrix padded = m.rows() == p1 ? m : zero_pad_rows(m, p1);
  if (perm.empty()) return padded;
  return permute_rows(padded, perm);
}

MatchProblem build_match_problem(const Matrix& q1, const Matrix& q2a) {
  if (q1.rows() != q2a.rows() || q1.cols() != q2a.cols())
    throw Error(Errc::BadDimensions, "match problem needs two p1 x r12 bases");
  MatchProblem mp;
  mp.q1 = q1;
  mp.q2a = q2a;
  mp.m1 = q1 * q1.transpose();
  mp.m2 = q2a * q2a.transpose();
  mp.shift = std::min(mp.m1.minCoeff(), mp.m2.minCoeff());
  mp.m1_plus = mp.m1.array() - mp.shift;
  mp.m2_plus = mp.m2.array() - mp.shift;
  mp.d1 = mp.m1_plus.diagonal();
  mp.d2 = mp.m2_plus.diagonal();
  mp.a1 = mp.m1_plus;
  mp.a1.diagonal().setZero();
  mp.a2 = mp.m2_plus;
  mp.a2.diagonal().setZero();
  return mp;
}

namespace {

std::size_t at(Index i) { return static_cast<std::size_t>(i); }

// sum_ij a(i, j) b(perm i, perm j), i.e. tr(A P B P^T).
double permuted_inner(const Matrix& a, const Matrix& b, const std::vector<Index>& perm) {
  double total = 0.0;
  const Index p = a.rows();
  for (Index j = 0; j < p; ++j) {
    const Index pj = perm[at(j)];
    for (Index i = 0; i < p; ++i) total += a(i, j) * b(perm[at(i)], pj);
  }
  return total;
}

void check_perm(const MatchProblem& mp, const std::vector<Index>& perm) {
  if (static_cast<Index>(perm.size()) != mp.size()) throw Error(Errc::BadDimensions, "permutation length != p1");
}

}  // namespace

double cosine_objective(const Matrix& q1, const Matrix& q2a, const std::vector<Index>& perm) {
  const Matrix t = q1.transpose() * permute_rows(q2a, perm);
  return t.squaredNorm();
}

double projector_trace_objective(const MatchProblem& mp, const std::vector<Index>& perm) {
  check_perm(mp, perm);
  return permuted_inner(mp.m1, mp.m2, perm);
}

double projector_distance_objective(const MatchProblem& mp, const std::vector<Index>& perm) {
  check_perm(mp, perm);
  const Matrix pm2 = permute_rows(permute_rows(mp.m2, perm).transpose(), perm);
  return -(mp.m1 - pm2).squaredNorm();
}

double shifted_distance_objective(const MatchProblem& mp, const std::vector<Index>& perm) {
  check_perm(mp, perm);
  const Matrix pm2 = permute_rows(permute_rows(mp.m2_plus, perm).transpose(), perm);
  return -(mp.m1_plus - pm2).squaredNorm();
}

double split_objective(const MatchProblem& mp, const std::vector<Index>& perm) {
  check_perm(mp, perm);
  double linear = 0.0;
  for (Index i = 0; i < mp.size(); ++i) linear += mp.d1(i) * mp.d2(perm[at(i)]);
  return permuted_inner(mp.a1, mp.a2, perm) + linear;
}

// Shortest augmenting path Hungarian method on cost = max(w) - w.
std::vector<Index> max_weight_assignment(const Matrix& w) {
  const Index n = w.rows();
  if (w.cols() != n) throw Error(Errc::BadDimensions, "assignment needs a square weight matrix");
  if (n == 0) return {};
  const double top = w.maxCoeff();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(at(n + 1), 0.0), v(at(n + 1), 0.0);
  std::vector<Index> match(at(n + 1), 0), way(at(n + 1), 0);
  for (Index i = 1; i <= n; ++i) {
    match[0] = i;
    Index j0 = 0;
    std::vector<double> minv(at(n + 1), inf);
    std::vector<char> used(at(n + 1), 0);
    do {
      used[at(j0)] = 1;
      const Index i0 = match[at(j0)];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[at(j)]) continue;
        const double cur = (top - w(i0 - 1, j - 1)) - u[at(i0)] - v[at(j)];
        if (cur < minv[at(j)]) {
          minv[at(j)] = cur;
          way[at(j)] = j0;
        }
        if (minv[at(j)] < delta) {
          delta = minv[at(j)];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[at(j)]) {
          u[at(match[at(j)])] += delta;
          v[at(j)] -= delta;
        } else {
          minv[at(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[at(j0)] != 0);
    do {
      const Index j1 = way[at(j0)];
      match[at(j0)] = match[at(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Index> perm(at(n));
  for (Index j = 1; j <= n; ++j) perm[at(match[at(j)] - 1)] = j - 1;
  return perm;
}

namespace {

// Alternating projection onto {X 1 = 1, X^T 1 = 1} and X >= 0.
void project_doubly_stochastic(Matrix& y, int sweeps) {
  const Index n = y.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto& kt = kernels::active();
  for (int s = 0; s < sweeps; ++s) {
    const Vector row_sum = y.rowwise().sum();
    const Eigen::RowVectorXd col_sum = y.colwise().sum();
    const double total = row_sum.sum();
    const double shift = inv_n + total * inv_n * inv_n;
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) y(i, j) += shift - (row_sum(i) + col_sum(j)) * inv_n;
    }
    kt.clamp_nonnegative(y.data(), static_cast<std::size_t>(y.size()));
    const double row_err = (y.rowwise().sum().array() - 1.0).abs().maxCoeff();
    const double col_err = (y.colwise().sum().array() - 1.0).abs().maxCoeff();
    if (std::max(row_err, col_err) < 1e-12) break;
  }
}

PermutationPlan plan_for(const MatchProblem& mp, std::vector<Index> perm, PermutationMethod method) {
  PermutationPlan plan;
  plan.objective = cosine_objective(mp.q1, mp.q2a, perm);
  plan.perm = std::move(perm);
  plan.method = method;
  return plan;
}

}  // namespace

namespace {

// Sinkhorn-balanced matrix of Exp(1) draws.
Matrix random_doubly_stochastic(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> ex(1.0);
  Matrix x(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) x(i, j) = ex(rng);
  for (int s = 0; s < 500; ++s) {
    x.array().colwise() /= x.rowwise().sum().array();
    x.array().rowwise() /= x.colwise().sum().array();
    if ((x.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12) break;
  }
  return x;
}

struct Run {
  Matrix x;
  int iterations = 0;
  bool converged = false;
};

Run fixed_point(const MatchProblem& mp, const DspfpConfig& cfg, Matrix x) {
  const auto& kt = kernels::active();
  Run run;
  Matrix y(x.rows(), x.cols());
  for (int it = 0; it < cfg.max_iterations; ++it) {
    y.noalias() = mp.m1 * x * mp.m2;
    const double top = kt.max_abs(y.data(), static_cast<std::size_t>(y.size()));
    if (top > 0.0) y *= cfg.sharpness / top;
    project_doubly_stochastic(y, cfg.projection_sweeps);
    const Matrix next = (1.0 - cfg.step) * x + cfg.step * y;
    const double change = kt.max_abs_diff(next.data(), x.data(), static_cast<std::size_t>(x.size()));
    x = next;
    run.iterations = it + 1;
    if (change < cfg.tolerance) {
      run.converged = true;
      break;
    }
  }
  run.x = std::move(x);
  return run;
}

}  // namespace

PermutationPlan dspfp_match(const MatchProblem& mp, const DspfpConfig& cfg, DspfpTrace* trace) {
  const Index n = mp.size();
  if (n == 0) throw Error(Errc::BadDimensions, "empty match problem");
  if (!(cfg.step > 0.0 && cfg.step <= 1.0) || cfg.max_iterations < 1 || cfg.projection_sweeps < 1 || cfg.restarts < 0 ||
      !(cfg.sharpness > 0.0))
    throw Error(Errc::BadConfig, "invalid DSPFP configuration");
  DspfpTrace local;
  PermutationPlan best = plan_for(mp, identity_permutation(n), PermutationMethod::Identity);
  double best_found = -std::numeric_limits<double>::infinity();
  for (int start = 0; start <= cfg.restarts; ++start) {
    Matrix x0 = start == 0 ? Matrix::Constant(n, n, 1.0 / static_cast<double>(n))
                           : random_doubly_stochastic(n, cfg.seed ^ static_cast<std::uint64_t>(start));
    Run run = fixed_point(mp, cfg, std::move(x0));
    local.iterations += run.iterations;
    local.converged += run.converged ? 1 : 0;
    ++local.starts;
    PermutationPlan found = plan_for(mp, max_weight_assignment(run.x), PermutationMethod::Dspfp);
    if (found.objective > best_found) {
      best_found = found.objective;
      local.best_start = start;
      local.relaxed_objective = (mp.m1 * run.x * mp.m2 * run.x.transpose()).trace();
      if (found.objective > best.objective) best = std::move(found);
    }
  }
  if (trace) *trace = local;
  return best;
}

PermutationPlan exhaustive_match(const Matrix& q1, const Matrix& q2a) {
  const Index n = q1.rows();
  if (n > kExhaustiveLimit) throw Error(Errc::TooLarge, "exhaustive matching is limited to 9 rows");
  const MatchProblem mp = build_match_problem(q1, q2a);
  std::vector<Index> perm = identity_permutation(n);
  std::vector<Index> best = perm;
  double best_value = -std::numeric_limits<double>::infinity();
  do {
    const double value = permuted_inner(mp.m1, mp.m2, perm);
    if (value > best_value) {
      best_value = value;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return plan_for(mp, std::move(best), PermutationMethod::Exhaustive);
}

SignChoice choose_sign(double trace_plus, double trace_minus) {
  SignChoice s;
  s.trace_plus = trace_plus;
  s.trace_minus = trace_minus;
  s.sign = trace_minus > trace_plus ? -1 : 1;
  return s;
}

SignChoice choose_sign(const PatternDecomposition& run_plus, const PatternDecomposition& run_minus) {
  return choose_sign(run_plus.explained, run_minus.explained);
}

}  // namespace cdpa
