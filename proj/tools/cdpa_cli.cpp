#include <exception>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "cdpa/types.hpp"
#include "commands.hpp"
#include "json.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

void add_inputs(CLI::App* cmd, cdpa::cli::CommonInputs& in) {
  cmd->add_option("y1", in.y1, "First data matrix (variables x samples; CSV, TSV or CDPM)")->required();
  cmd->add_option("y2", in.y2, "Second data matrix")->required();
  cmd->add_flag("--center", in.center, "Subtract row means before the analysis");
  cmd->add_option("--alpha", in.alpha, "Family-wise level of the cross-correlation screen")
      ->check(CLI::Range(0.0, 1.0));
}

}  // namespace

int main(int argc, char** argv) {
  namespace cc = cdpa::cli;
  CLI::App app{"Common and distinctive pattern analysis of paired data matrices"};
  app.require_subcommand(1);

  cc::RanksOptions ranks;
  auto* c_ranks = app.add_subcommand("ranks", "Select r1, r2 (ED) and r12 (screen + MDL-IC)");
  add_inputs(c_ranks, ranks.in);

  cc::DecomposeOptions dec;
  auto* c_dec = app.add_subcommand("decompose", "Estimate the common/distinctive pattern decomposition");
  add_inputs(c_dec, dec.in);
  auto* o_ranks = c_dec->add_option("--ranks", dec.ranks, "Fixed ranks r1,r2,r12");
  c_dec->add_flag("--auto-ranks", "Select ranks from the data (default)")->excludes(o_ranks);
  c_dec->add_option("--perm", dec.perm, "identity | dspfp | exhaustive | permutation JSON file");
  c_dec->add_option("--dspfp-restarts", dec.dspfp_restarts, "Random restarts after the flat DSPFP start")
      ->check(CLI::NonNegativeNumber);
  c_dec->add_option("--sign", dec.sign, "auto | plus | minus");
  c_dec->add_option("--variant", dec.variant, "Dual-weight projection: own | first");
  c_dec->add_option("--bootstrap", dec.bootstrap, "Bootstrap replicates for the explained variance (0 = off)");
  c_dec->add_option("--level", dec.level, "Confidence level")->check(CLI::Range(0.0, 1.0));
  c_dec->add_option("--seed", dec.seed, "Master seed for resampling");
  c_dec->add_option("--threads", dec.threads, "Worker threads (0 = all cores)")->envname("CDPA_THREADS");
  c_dec->add_option("--out", dec.out, "Output directory")->required();
  c_dec->add_option("--format", dec.format, "Matrix output format: bin | csv");

  cc::SimulateOptions sim;
  auto* c_sim = app.add_subcommand("simulate", "Run simulation replications over a parameter grid");
  c_sim->add_option("--setup", sim.setup, "1 (p2 = p1) or 2 (p2 = 900)");
  c_sim->add_option("--theta", sim.theta, "Angle list in degrees")->delimiter(',');
  c_sim->add_option("--p1", sim.p1, "p1 list")->delimiter(',');
  c_sim->add_option("--noise", sim.noise, "Noise variance list")->delimiter(',');
  c_sim->add_option("--n", sim.n, "Sample size");
  c_sim->add_option("--reps", sim.reps, "Replications per cell");
  c_sim->add_option("--seed", sim.seed, "Master seed; replication i uses seed ^ i");
  c_sim->add_option("--structure-seed", sim.structure_seed, "Seed of the fixed loadings");
  c_sim->add_flag("--true-ranks", sim.true_ranks, "Use the planted ranks instead of selecting them");
  c_sim->add_option("--threads", sim.threads, "Worker threads (0 = all cores)")->envname("CDPA_THREADS");
  c_sim->add_option("--out", sim.out, "Directory for replications.csv and summary.json");

  cc::OracleOptions orc;
  auto* c_orc = app.add_subcommand("oracle", "Population explained variance for the simulation design");
  c_orc->add_option("--theta", orc.theta, "Angle list in degrees")->delimiter(',');
  c_orc->add_flag("--variant-first", orc.variant_first, "Project both channels on the first principal vectors");

  cc::MatchOptions mat;
  auto* c_mat = app.add_subcommand("match", "Row alignment of two mixing channels");
  c_mat->add_option("b1", mat.b1, "Reference channel (p1 x r12)")->required();
  c_mat->add_option("b2", mat.b2, "Second channel (p2 x r12, p2 <= p1)")->required();
  c_mat->add_option("--method", mat.method, "dspfp | exhaustive | identity");
  c_mat->add_option("--dspfp-restarts", mat.dspfp_restarts, "Random restarts after the flat DSPFP start")
      ->check(CLI::NonNegativeNumber);
  c_mat->add_option("--out", mat.out, "Write the permutation as a JSON array");

  cc::BootstrapOptions boot;
  auto* c_boot = app.add_subcommand("bootstrap", "Percentile interval of the explained variance");
  add_inputs(c_boot, boot.in);
  c_boot->add_option("--ranks", boot.ranks, "Fixed ranks r1,r2,r12")->required();
  c_boot->add_option("--perm", boot.perm, "identity | dspfp | exhaustive | permutation JSON file");
  c_boot->add_option("--dspfp-restarts", boot.dspfp_restarts, "Random restarts after the flat DSPFP start")
      ->check(CLI::NonNegativeNumber);
  c_boot->add_option("--sign", boot.sign, "auto | plus | minus");
  c_boot->add_option("--replicates", boot.replicates, "Number of resamples (>= 100)");
  c_boot->add_option("--level", boot.level, "Confidence level")->check(CLI::Range(0.0, 1.0));
  c_boot->add_option("--seed", boot.seed, "Master seed; replicate i uses seed ^ i");
  c_boot->add_option("--threads", boot.threads, "Worker threads (0 = all cores)")->envname("CDPA_THREADS");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*c_ranks) cc::run_ranks(ranks, std::cout);
    else if (*c_dec) cc::run_decompose(dec, std::cout);
    else if (*c_sim) cc::run_simulate(sim, std::cout);
    else if (*c_orc) cc::run_oracle(orc, std::cout);
    else if (*c_mat) cc::run_match(mat, std::cout);
    else if (*c_boot) cc::run_bootstrap(boot, std::cout);
  } catch (const cdpa::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cdpa::is_input_error(e.code()) ? kExitInput : kExitNumerical;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error [Parse]: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error [Io]: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
