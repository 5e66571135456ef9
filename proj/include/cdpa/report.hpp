#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdpa/bootstrap.hpp"
#include "cdpa/pipeline.hpp"
#include "cdpa/simulate.hpp"
#include "json.hpp"

namespace cdpa {

using Json = nlohmann::ordered_json;

Json to_json(const RankProfile& r);
Json to_json(const Diagnostics& d);
Json to_json(const ScreenResult& s);
Json to_json(const BootstrapInterval& b, bool with_values = false);
Json to_json(const OracleValue& o);
Json to_json(const ReplicationStudy& s);
Json to_json(const Vector& v);

RankProfile rank_profile_from_json(const Json& j);

struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  Json config = Json::object();
  RankProfile ranks;
  std::string permutation_method = "identity";
  double permutation_objective = 0.0;
  int sign = 1;
  double trace_plus = 0.0;
  double trace_minus = 0.0;
  double explained = 0.0;
  std::optional<BootstrapInterval> interval;
  double delta_theta = 0.0;
  std::array<double, 2> snr{};
  bool r12_zero = false;
  bool swapped = false;
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, double> timings;  // seconds
  std::vector<std::string> artifacts;      // relative to the manifest directory
  std::vector<std::string> warnings;
};

Json to_json(const RunManifest& m);
RunManifest manifest_from_json(const Json& j);

}  // namespace cdpa
