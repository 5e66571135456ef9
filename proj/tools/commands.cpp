#include "commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cdpa/align.hpp"
#include "cdpa/bootstrap.hpp"
#include "cdpa/matrix_io.hpp"
#include "cdpa/report.hpp"
#include "cdpa/simulate.hpp"

namespace fs = std::filesystem;

namespace cdpa::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

ObservedMatrix load(const std::string& path, bool center) {
  ObservedMatrix y = make_observed(io::read_matrix(path));
  return center ? center_rows(y) : y;
}

RankProfile parse_ranks(const std::string& text) {
  RankProfile r;
  char c1 = 0, c2 = 0;
  std::istringstream is(text);
  if (!(is >> r.r1 >> c1 >> r.r2 >> c2 >> r.r12) || c1 != ',' || c2 != ',' || !(is >> std::ws).eof())
    throw Error(Errc::InvalidInput, "ranks must look like r1,r2,r12 (got '" + text + "')");
  return r;
}

SignMode parse_sign(const std::string& s) {
  if (s == "auto") return SignMode::Auto;
  if (s == "plus" || s == "+1" || s == "1") return SignMode::Plus;
  if (s == "minus" || s == "-1") return SignMode::Minus;
  throw Error(Errc::InvalidInput, "sign must be auto, plus or minus");
}

DualWeightVariant parse_variant(const std::string& s) {
  if (s == "own") return DualWeightVariant::Own;
  if (s == "first") return DualWeightVariant::First;
  throw Error(Errc::InvalidInput, "variant must be own or first");
}

void apply_perm_option(const std::string& perm, int restarts, CdpaConfig& cfg) {
  cfg.dspfp.restarts = restarts;
  if (perm == "identity") cfg.permutation = PermutationMode::Identity;
  else if (perm == "dspfp") cfg.permutation = PermutationMode::Dspfp;
  else if (perm == "exhaustive") cfg.permutation = PermutationMode::Exhaustive;
  else {
    cfg.permutation = PermutationMode::Provided;
    cfg.provided_permutation = read_permutation_file(perm);
  }
}

Json input_echo(const CommonInputs& in) {
  return Json{{"y1", in.y1}, {"y2", in.y2}, {"center", in.center}, {"alpha", in.alpha}};
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(Errc::Io, "write failed for " + path.string());
}

}  // namespace

void run_ranks(const RanksOptions& o, std::ostream& out) {
  const auto y1 = load(o.in.y1, o.in.center);
  const auto y2 = load(o.in.y2, o.in.center);
  if (y1.samples() != y2.samples()) throw Error(Errc::BadDimensions, "inputs have different sample counts");
  const auto sel = select_ranks(y1, y2, o.in.alpha);
  Json j = to_json(sel.ranks);
  j["screen"] = sel.screen;
  j["screen_detail"] = to_json(sel.screen_detail);
  j["inputs"] = input_echo(o.in);
  out << j.dump(2) << '\n';
}

void run_decompose(const DecomposeOptions& o, std::ostream& out) {
  const auto t0 = Clock::now();
  if (o.out.empty()) throw Error(Errc::InvalidInput, "--out DIR is required");
  if (o.format != "bin" && o.format != "csv") throw Error(Errc::InvalidInput, "--format must be bin or csv");
  const auto y1 = load(o.in.y1, o.in.center);
  const auto y2 = load(o.in.y2, o.in.center);

  CdpaConfig cfg;
  cfg.alpha = o.in.alpha;
  if (!o.ranks.empty()) cfg.ranks = parse_ranks(o.ranks);
  apply_perm_option(o.perm, o.dspfp_restarts, cfg);
  cfg.sign = parse_sign(o.sign);
  cfg.variant = parse_variant(o.variant);

  const auto t_dec = Clock::now();
  const CdpaResult res = estimate_cdpa(y1, y2, cfg);
  const double dec_time = seconds_since(t_dec);

  RunManifest m;
  m.command = "decompose";
  m.inputs = {o.in.y1, o.in.y2};
  m.config = input_echo(o.in);
  m.config["ranks"] = o.ranks.empty() ? Json("auto") : Json(o.ranks);
  m.config["perm"] = o.perm;
  m.config["dspfp_restarts"] = o.dspfp_restarts;
  m.config["sign"] = o.sign;
  m.config["variant"] = o.variant;
  m.config["bootstrap"] = o.bootstrap;
  m.config["level"] = o.level;
  m.config["format"] = o.format;
  m.ranks = res.ranks;
  m.permutation_method = method_name(res.permutation.method);
  m.permutation_objective = res.permutation.objective;
  m.sign = res.sign.sign;
  m.trace_plus = res.sign.trace_plus;
  m.trace_minus = res.sign.trace_minus;
  m.explained = res.pattern.explained;
  m.delta_theta = res.diagnostics.delta_theta;
  m.snr = res.diagnostics.snr;
  m.r12_zero = res.r12_zero;
  m.swapped = res.swapped;
  m.warnings = res.warnings;
  m.seeds["bootstrap"] = o.seed;
  m.timings["decompose"] = dec_time;

  if (o.bootstrap > 0) {
    if (res.r12_zero) {
      m.warnings.push_back("bootstrap skipped: no shared signal");
    } else {
      const auto tb = Clock::now();
      BootstrapConfig bc;
      bc.replicates = o.bootstrap;
      bc.level = o.level;
      bc.seed = o.seed;
      bc.threads = o.threads;
      bc.sign = res.sign.sign;
      bc.variant = cfg.variant;
      m.interval = bootstrap_ci(y1, y2, res.ranks, res.permutation, bc);
      m.timings["bootstrap"] = seconds_since(tb);
    }
  }

  const fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::Io, "cannot create " + dir.string() + ": " + ec.message());
  const std::string ext = o.format == "bin" ? ".cdpm" : ".csv";
  const auto& pd = res.pattern;
  const std::vector<std::pair<std::string, const Matrix*>> outputs = {
      {"C", &pd.c},
      {"C1_scaled", &pd.c_scaled[0]},
      {"C2_scaled", &pd.c_scaled[1]},
      {"H1", &pd.h[0]},
      {"H2", &pd.h[1]},
      {"Delta1", &pd.delta[0]},
      {"Delta2", &pd.delta[1]},
      {"C1_common", &pd.aligned_common[0]},
      {"C2_common", &pd.aligned_common[1]},
      {"D1", &pd.aligned_distinct[0]},
      {"D2", &pd.aligned_distinct[1]},
  };
  for (const auto& [name, mat] : outputs) {
    io::write_matrix(dir / (name + ext), *mat);
    m.artifacts.push_back(name + ext);
  }
  write_text_file(dir / "permutation.json", permutation_to_json(res.permutation.perm) + "\n");
  m.artifacts.push_back("permutation.json");
  m.timings["total"] = seconds_since(t0);
  const std::string text = to_json(m).dump(2) + "\n";
  write_text_file(dir / "manifest.json", text);
  out << text;
}

void run_simulate(const SimulateOptions& o, std::ostream& out) {
  if (o.reps < 1) throw Error(Errc::BadConfig, "--reps must be >= 1");
  std::ostringstream csv;
  csv << replication_csv_header() << '\n';
  Json cells = Json::array();
  for (double theta : o.theta) {
    for (long p1 : o.p1) {
      for (double noise : o.noise) {
        SimulationConfig cfg;
        cfg.setup = o.setup;
        cfg.theta_deg = theta;
        cfg.p1 = p1;
        cfg.n = o.n;
        cfg.noise_var = noise;
        cfg.replications = o.reps;
        cfg.seed = o.seed;
        cfg.structure_seed = o.structure_seed;
        cfg.select_ranks = !o.true_ranks;
        cfg.threads = o.threads;
        std::cerr << "simulate: setup " << o.setup << " theta " << theta << " p1 " << p1 << " noise " << noise
                  << " (" << o.reps << " replications)\n";
        const auto study = run_replications(cfg);
        csv << replication_csv_rows(study);
        Json cell = to_json(study);
        cell["oracle_trace_cov_c"] = closed_form_explained_variance(theta);
        cells.push_back(cell);
      }
    }
  }
  Json j{{"command", "simulate"}, {"cells", cells}};
  if (!o.out.empty()) {
    const fs::path dir(o.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::Io, "cannot create " + dir.string());
    write_text_file(dir / "replications.csv", csv.str());
    write_text_file(dir / "summary.json", j.dump(2) + "\n");
    j["artifacts"] = {"replications.csv", "summary.json"};
  }
  out << j.dump(2) << '\n';
}

void run_oracle(const OracleOptions& o, std::ostream& out) {
  Json arr = Json::array();
  for (double theta : o.theta) {
    if (!(theta >= 0.0 && theta <= 90.0)) throw Error(Errc::BadConfig, "theta must lie in [0, 90] degrees");
    if (theta > 75.0) std::cerr << "warning: theta " << theta << " lies outside the studied 0-75 degree sweep\n";
    const auto v = oracle_explained_variance(theta, 40, 7,
                                             o.variant_first ? DualWeightVariant::First : DualWeightVariant::Own);
    arr.push_back(to_json(v));
  }
  out << Json{{"command", "oracle"}, {"values", arr}}.dump(2) << '\n';
}

void run_match(const MatchOptions& o, std::ostream& out) {
  const Matrix b1 = io::read_matrix(o.b1);
  const Matrix b2 = io::read_matrix(o.b2);
  if (b1.cols() != b2.cols()) throw Error(Errc::BadDimensions, "channels must have the same number of columns");
  const Matrix q1 = orthonormal_basis(MixingChannel{b1, 1});
  const Matrix q2a = zero_pad_rows(orthonormal_basis(MixingChannel{b2, 2}), b1.rows());
  PermutationPlan plan;
  Json extra = Json::object();
  if (o.method == "dspfp") {
    DspfpTrace trace;
    DspfpConfig dc;
    dc.restarts = o.dspfp_restarts;
    plan = dspfp_match(build_match_problem(q1, q2a), dc, &trace);
    extra = Json{{"iterations", trace.iterations}, {"starts", trace.starts}, {"converged_starts", trace.converged},
                 {"best_start", trace.best_start}};
  } else if (o.method == "exhaustive") {
    plan = exhaustive_match(q1, q2a);
  } else if (o.method == "identity") {
    plan.perm = identity_permutation(q1.rows());
    plan.objective = cosine_objective(q1, q2a, plan.perm);
  } else {
    throw Error(Errc::InvalidInput, "--method must be dspfp, exhaustive or identity");
  }
  const double identity_objective = cosine_objective(q1, q2a, identity_permutation(q1.rows()));
  if (!o.out.empty()) write_text_file(o.out, permutation_to_json(plan.perm) + "\n");
  Json j{{"command", "match"},
         {"method", method_name(plan.method)},
         {"objective", plan.objective},
         {"identity_objective", identity_objective},
         {"r12", q1.cols()},
         {"permutation", plan.perm},
         {"solver", extra}};
  out << j.dump(2) << '\n';
}

void run_bootstrap(const BootstrapOptions& o, std::ostream& out) {
  if (o.ranks.empty()) throw Error(Errc::InvalidInput, "--ranks r1,r2,r12 is required for the bootstrap");
  const auto y1 = load(o.in.y1, o.in.center);
  const auto y2 = load(o.in.y2, o.in.center);
  CdpaConfig cfg;
  cfg.alpha = o.in.alpha;
  cfg.ranks = parse_ranks(o.ranks);
  apply_perm_option(o.perm, o.dspfp_restarts, cfg);
  cfg.sign = parse_sign(o.sign);
  const CdpaResult res = estimate_cdpa(y1, y2, cfg);
  if (res.r12_zero) throw Error(Errc::InvalidInput, "bootstrap needs r12 >= 1");
  BootstrapConfig bc;
  bc.replicates = o.replicates;
  bc.level = o.level;
  bc.seed = o.seed;
  bc.threads = o.threads;
  bc.sign = res.sign.sign;
  const auto ci = bootstrap_ci(y1, y2, res.ranks, res.permutation, bc);
  Json j{{"command", "bootstrap"},
         {"inputs", input_echo(o.in)},
         {"ranks", to_json(res.ranks)},
         {"permutation", method_name(res.permutation.method)},
         {"sign", res.sign.sign},
         {"seed", o.seed},
         {"interval", to_json(ci)}};
  out << j.dump(2) << '\n';
}

}  // namespace cdpa::cli
