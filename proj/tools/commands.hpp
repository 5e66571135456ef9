#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cdpa::cli {

struct CommonInputs {
  std::string y1;
  std::string y2;
  bool center = false;
  double alpha = 0.05;
};

struct RanksOptions {
  CommonInputs in;
};

struct DecomposeOptions {
  CommonInputs in;
  std::string ranks;  // "r1,r2,r12"; empty selects automatically
  std::string perm = "identity";  // identity | dspfp | exhaustive | FILE
  int dspfp_restarts = 20;
  std::string sign = "auto";
  std::string variant = "own";
  int bootstrap = 0;
  double level = 0.95;
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
  std::string out;
  std::string format = "bin";
};

struct SimulateOptions {
  int setup = 1;
  std::vector<double> theta{15.0};
  std::vector<long> p1{300};
  std::vector<double> noise{1.0};
  long n = 300;
  int reps = 10;
  std::uint64_t seed = 1;
  std::uint64_t structure_seed = 7;
  bool true_ranks = false;
  unsigned threads = 1;
  std::string out;
};

struct OracleOptions {
  std::vector<double> theta{0, 15, 30, 45, 60, 75};
  bool variant_first = false;
};

struct MatchOptions {
  std::string b1;
  std::string b2;
  std::string method = "dspfp";
  int dspfp_restarts = 20;
  std::string out;
};

struct BootstrapOptions {
  CommonInputs in;
  std::string ranks;
  std::string perm = "identity";
  int dspfp_restarts = 20;
  std::string sign = "plus";
  int replicates = 1000;
  double level = 0.95;
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
};

// Each command writes machine-readable JSON to `out` and throws cdpa::Error
// on failure; the caller maps errors to exit codes.
void run_ranks(const RanksOptions& o, std::ostream& out);
void run_decompose(const DecomposeOptions& o, std::ostream& out);
void run_simulate(const SimulateOptions& o, std::ostream& out);
void run_oracle(const OracleOptions& o, std::ostream& out);
void run_match(const MatchOptions& o, std::ostream& out);
void run_bootstrap(const BootstrapOptions& o, std::ostream& out);

}  // namespace cdpa::cli
