#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace bellbound::cli {

enum ExitCode : int {
  kSuccess = 0,
  kClaimsFailed = 1,
  kInfeasible = 2,
  kUsageError = 3,
};

/// Everything a run depends on. Angles are kept as the text the user gave
/// (e.g. "pi/12") so an embedded config replays exactly.
struct RunConfig {
  std::string command;
  std::string which = "main";  // reproduce
  std::optional<std::string> alpha, beta, gamma, omega, theta1, theta2;
  std::optional<int> branch;
  std::uint64_t seed = 1;
  int starts = 100;
  int max_iterations = 500;
  double tolerance = 1e-9;
  int threads = 1;
  std::optional<std::string> center;  // "a,b,c,t1,t2"
  double radius = 0.0;
  std::string grid;
  int theta_steps = 0;
  std::string expression = "sliwa5";
  std::optional<std::string> expression_file;
  bool negate = false;
  std::optional<std::string> out;
  std::optional<std::string> history;
  std::string format = "json";
  double tol_psd = -1e-10;
  double tol_herm = 1e-10;
  double perturb_alpha = 0.0;  // fault injection for reproduce
};

nlohmann::json to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

/// 12 significant digits, ties to even.
std::string format_number(double x);
/// x rounded through format_number, for JSON output.
double round_number(double x);

int cmd_reproduce(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_certify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_optimize(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_scan(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_local_bound(const RunConfig& config, std::ostream& out, std::ostream& err);

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command line entry point (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string version_string();

}  // namespace bellbound::cli
