#include "cdpa/report.hpp"

namespace cdpa {

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json to_json(const RankProfile& r) { return Json{{"r1", r.r1}, {"r2", r.r2}, {"r12", r.r12}}; }

RankProfile rank_profile_from_json(const Json& j) {
  return RankProfile{j.at("r1").get<int>(), j.at("r2").get<int>(), j.at("r12").get<int>()};
}

Json to_json(const Diagnostics& d) {
  return Json{{"snr", {d.snr[0], d.snr[1]}},
              {"noise_trace", {d.noise_trace[0], d.noise_trace[1]}},
              {"delta_theta", d.delta_theta},
              {"selected_ranks", to_json(d.selected_ranks)}};
}

Json to_json(const ScreenResult& s) {
  return Json{{"significant", s.significant},
              {"max_abs_correlation", s.max_abs_correlation},
              {"min_p_value", s.min_p_value},
              {"threshold", s.threshold}};
}

Json to_json(const BootstrapInterval& b, bool with_values) {
  Json j{{"point", b.point}, {"lower", b.lower},           {"upper", b.upper},
         {"level", b.level}, {"replicates", b.replicates}, {"failed", b.failed}};
  if (with_values) j["values"] = b.values;
  return j;
}

Json to_json(const OracleValue& o) {
  return Json{{"theta_deg", o.theta_deg},
              {"trace_cov_c", o.matrix_level},
              {"closed_form", o.closed_form},
              {"contributions", to_json(o.contributions)}};
}

Json to_json(const ReplicationStudy& s) {
  const auto& c = s.config;
  Json metrics = Json::object();
  for (const auto& m : s.summary) metrics[m.name] = Json{{"mean", m.mean}, {"sd", m.sd}};
  return Json{{"setup", c.setup},
              {"theta_deg", c.theta_deg},
              {"p1", c.p1},
              {"p2", c.p2},
              {"n", c.n},
              {"noise_var", c.noise_var},
              {"replications", c.replications},
              {"seed", c.seed},
              {"structure_seed", c.structure_seed},
              {"select_ranks", c.select_ranks},
              {"population_trace_cov_c", s.population_trace},
              {"metrics", metrics}};
}

Json to_json(const RunManifest& m) {
  Json j{{"command", m.command},
         {"inputs", m.inputs},
         {"config", m.config},
         {"ranks", to_json(m.ranks)},
         {"permutation", {{"method", m.permutation_method}, {"objective", m.permutation_objective}}},
         {"sign", {{"sign", m.sign}, {"trace_plus", m.trace_plus}, {"trace_minus", m.trace_minus}}},
         {"explained", m.explained},
         {"interval", m.interval ? to_json(*m.interval) : Json(nullptr)},
         {"delta_theta", m.delta_theta},
         {"snr", {m.snr[0], m.snr[1]}},
         {"r12_zero", m.r12_zero},
         {"swapped", m.swapped},
         {"seeds", m.seeds},
         {"timings", m.timings},
         {"artifacts", m.artifacts},
         {"warnings", m.warnings}};
  return j;
}

RunManifest manifest_from_json(const Json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.inputs = j.at("inputs").get<std::vector<std::string>>();
  m.config = j.at("config");
  m.ranks = rank_profile_from_json(j.at("ranks"));
  m.permutation_method = j.at("permutation").at("method").get<std::string>();
  m.permutation_objective = j.at("permutation").at("objective").get<double>();
  m.sign = j.at("sign").at("sign").get<int>();
  m.trace_plus = j.at("sign").at("trace_plus").get<double>();
  m.trace_minus = j.at("sign").at("trace_minus").get<double>();
  m.explained = j.at("explained").get<double>();
  if (!j.at("interval").is_null()) {
    const auto& b = j.at("interval");
    BootstrapInterval ci;
    ci.point = b.at("point").get<double>();
    ci.lower = b.at("lower").get<double>();
    ci.upper = b.at("upper").get<double>();
    ci.level = b.at("level").get<double>();
    ci.replicates = b.at("replicates").get<int>();
    ci.failed = b.at("failed").get<int>();
    m.interval = ci;
  }
  m.delta_theta = j.at("delta_theta").get<double>();
  m.snr = {j.at("snr").at(0).get<double>(), j.at("snr").at(1).get<double>()};
  m.r12_zero = j.at("r12_zero").get<bool>();
  m.swapped = j.at("swapped").get<bool>();
  m.seeds = j.at("seeds").get<std::map<std::string, std::uint64_t>>();
  m.timings = j.at("timings").get<std::map<std::string, double>>();
  m.artifacts = j.at("artifacts").get<std::vector<std::string>>();
  m.warnings = j.at("warnings").get<std::vector<std::string>>();
  return m;
}

}  // namespace cdpa
