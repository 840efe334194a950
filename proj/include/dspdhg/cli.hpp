#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dspdhg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitBudget = 3;

// Where the problem comes from: a serialized problem file, a LIBSVM dataset
// plus the margin weight, or the synthetic control generator.
struct ProblemSource {
  std::string problem_path;
  std::string libsvm_path;
  double svm_c = 1.0;
  bool mpc = false;
  int mpc_nx = 20;
  int mpc_nu = 20;
  int mpc_horizon = 20;
  std::uint64_t mpc_seed = 1;
};

struct RunConfig {
  ProblemSource source;
  std::string method = "dspdhg";  // pdhg | spdhg | dspdhg
  double p = 1.0;
  double q = 1.0;
  std::string step_mode = "practical";  // practical | certified
  std::string restart = "none";         // none | fixed:<K> | adaptive[:<factor>]
  std::uint64_t seed = 1;
  double budget = 100.0;
  double target = 0.0;   // relkkt early-stop; 0 disables
  double cadence = 1.0;  // cost units between log rows
  int refresh_interval = 1000;
  std::int64_t enum_budget = 10000;
  std::string init_path;       // reference-point file used as the start
  std::string reference_path;  // reference point: rel_error + smoothed-gap center
  std::optional<double> ref_objective;
  std::optional<double> smoothed_gap_mu;
  std::string out_csv;  // empty = stdout
};

int solve_command(const RunConfig& cfg, std::ostream& report);

struct CompareConfig {
  RunConfig base;
  std::vector<std::string> methods{"pdhg", "spdhg", "dspdhg"};
  std::vector<std::string> restarts{"none", "adaptive"};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  double rel_error_target = 0.0;  // 0 disables the rel_error column of the table
  std::string out_dir = ".";
};

int compare_command(const CompareConfig& cfg, std::ostream& report);

struct ReferenceConfig {
  ProblemSource source;
  double tol = 1e-12;
  double budget = 200000.0;
  std::int64_t enum_budget = 10000;
  std::string out_path;
};

int reference_command(const ReferenceConfig& cfg, std::ostream& report);

struct GenMpcConfig {
  int nx = 20;
  int nu = 20;
  int horizon = 20;
  std::uint64_t seed = 1;
  std::string out_path;
};

int gen_mpc_command(const GenMpcConfig& cfg, std::ostream& report);

struct NormsConfig {
  ProblemSource source;
  double p = 1.0;
  double q = 1.0;
  std::int64_t enum_budget = 10000;
};

int norms_command(const NormsConfig& cfg, std::ostream& report);

}  // namespace dspdhg::cli
