#pragma once

// Multi-start Nelder-Mead maximization of the Bell value over the family and
// the measurement angles, and grid scans of the (alpha, beta, gamma) box.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellbound/bell.hpp"
#include "bellbound/state_family.hpp"

namespace bellbound {

/// (alpha, beta, gamma, theta1, theta2)
using SearchParameters = std::array<double, 5>;

inline FamilyAngles family_angles(const SearchParameters& x) { return {x[0], x[1], x[2]}; }
inline MeasurementAngles measurement_angles(const SearchParameters& x) { return {x[3], x[4]}; }

struct SearchPoint {
  SearchParameters parameters{};
  bool feasible = false;
  double s_value = 0.0;  // -inf when infeasible
  int branch = -1;       // index into OmegaSolutions::branches
  double omega = 0.0;
  Weights weights;
};

/// Best Bell value over all omega branches with nonnegative weights.
/// Never throws for construction failures; those come back as infeasible.
SearchPoint objective(const SearchParameters& x, const BellExpression& expr = BellExpression::sliwa5());

/// SplitMix64 stream; uniform doubles use the top 53 bits.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

struct MaximizeConfig {
  int starts = 100;
  int max_iterations = 500;
  double tolerance = 1e-9;       // simplex diameter
  double initial_step = 0.25;    // simplex edge length in radians
  /// When set, starts are drawn uniformly from center +- radius (per
  /// coordinate) and the initial simplex edge is min(initial_step, radius).
  std::optional<SearchParameters> center;
  double radius = 0.0;
  /// Extra draws per start when the first sample is infeasible.
  int start_attempts = 64;
  int threads = 1;
};

struct TraceEntry {
  int iteration = 0;
  double best_s = 0.0;
  double diameter = 0.0;
  SearchParameters best{};
};

struct StartHistory {
  int start_index = 0;
  SearchParameters start{};
  bool start_feasible = false;
  SearchPoint result;
  int iterations = 0;
  bool converged = false;
  std::vector<TraceEntry> trace;
};

struct MaximizeResult {
  SearchPoint best;
  int best_start = -1;
  std::vector<StartHistory> history;  // in start-index order
};

class NoFeasiblePoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic for a given (config, seed); throws NoFeasiblePoint if every
/// start ends infeasible.
MaximizeResult maximize(const MaximizeConfig& config, std::uint64_t seed,
                        const BellExpression& expr = BellExpression::sliwa5());

struct AxisRange {
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;  // inclusive linspace; count 1 yields lo
  double at(int i) const { return count == 1 ? lo : lo + (hi - lo) * i / (count - 1); }
};

struct ScanGrid {
  AxisRange alpha, beta, gamma;
  /// When > 0, each feasible cell also records the best S over a
  /// theta_steps x theta_steps grid of (theta1, theta2) in [-pi, pi).
  int theta_steps = 0;
};

/// "a0:a1:n,b0:b1:n,c0:c1:n"; bounds go through parse_angle_expression.
ScanGrid parse_grid(const std::string& spec);

struct BranchRecord {
  double omega = 0.0;
  bool nonsingular = false;
  Weights weights;
  bool nonnegative = false;
};

struct ScanRow {
  FamilyAngles angles;
  AbcCoefficients abc;
  double discriminant = 0.0;
  std::vector<BranchRecord> branches;
  bool feasible = false;
  int valid_branches = 0;
  bool certified = false;  // first valid branch passes certify()
  std::optional<double> best_s;
  std::optional<MeasurementAngles> best_theta;
};

std::vector<ScanRow> scan(const ScanGrid& grid, const BellExpression& expr = BellExpression::sliwa5());

}  // namespace bellbound
