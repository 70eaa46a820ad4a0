#include "bellbound/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "bellbound/angle_expression.hpp"

namespace bellbound {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kDim = 5;
constexpr double kBranchTieTolerance = 1e-12;

using Vertex = SearchParameters;

double wrap(double x, double lo) {
  // Into [lo, lo + 2 pi).
  double r = std::fmod(x - lo, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  return lo + r;
}

SearchParameters canonical(const SearchParameters& x) {
  return {wrap(x[0], 0.0), wrap(x[1], 0.0), wrap(x[2], 0.0), wrap(x[3], -kPi), wrap(x[4], -kPi)};
}

double distance(const Vertex& a, const Vertex& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < kDim; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Higher S first; ties broken lexicographically on the parameters.
bool better(const SearchPoint& a, const SearchPoint& b) {
  if (a.s_value != b.s_value) return a.s_value > b.s_value;
  return a.parameters < b.parameters;
}

SearchParameters sample_start(SplitMix64& rng, const MaximizeConfig& config) {
  SearchParameters x{};
  if (config.center) {
    for (std::size_t i = 0; i < kDim; ++i)
      x[i] = config.radius > 0.0 ? rng.uniform((*config.center)[i] - config.radius, (*config.center)[i] + config.radius)
                                 : (*config.center)[i];
    return x;
  }
  for (std::size_t i = 0; i < 3; ++i) x[i] = rng.uniform(0.0, 2.0 * kPi);
  for (std::size_t i = 3; i < kDim; ++i) x[i] = rng.uniform(-kPi, kPi);
  return x;
}

struct NelderMead {
  const BellExpression& expr;
  const MaximizeConfig& config;

  StartHistory run(int index, std::uint64_t start_seed) const {
    StartHistory h;
    h.start_index = index;
    SplitMix64 rng(start_seed);

    SearchPoint start;
    const int attempts = std::max(1, config.start_attempts);
    for (int a = 0; a < attempts; ++a) {
      h.start = sample_start(rng, config);
      start = objective(h.start, expr);
      if (start.feasible) break;
    }
    h.start_feasible = start.feasible;

    const double step = config.center ? std::min(config.initial_step, config.radius) : config.initial_step;
    std::array<SearchPoint, kDim + 1> simplex;
    simplex[0] = start;
    for (std::size_t i = 0; i < kDim; ++i) {
      Vertex v = h.start;
      v[i] += step;
      simplex[i + 1] = objective(v, expr);
    }

    auto order = [&] { std::stable_sort(simplex.begin(), simplex.end(), better); };
    auto diameter = [&] {
      double d = 0.0;
      for (std::size_t i = 1; i <= kDim; ++i) d = std::max(d, distance(simplex[0].parameters, simplex[i].parameters));
      return d;
    };
    auto along = [&](const Vertex& centroid, const Vertex& worst, double t) {
      Vertex v{};
      for (std::size_t i = 0; i < kDim; ++i) v[i] = centroid[i] + t * (worst[i] - centroid[i]);
      return objective(v, expr);
    };

    order();
    int it = 0;
    for (; it < config.max_iterations; ++it) {
      const double diam = diameter();
      h.trace.push_back({it, simplex[0].s_value, diam, simplex[0].parameters});
      if (diam < config.tolerance) {
        h.converged = true;
        break;
      }

      Vertex centroid{};
      for (std::size_t k = 0; k < kDim; ++k)
        for (std::size_t i = 0; i < kDim; ++i) centroid[i] += simplex[k].parameters[i] / kDim;
      const SearchPoint& worst = simplex[kDim];
      const SearchPoint& second_worst = simplex[kDim - 1];

      const SearchPoint reflected = along(centroid, worst.parameters, -1.0);
      if (better(reflected, simplex[0])) {
        const SearchPoint expanded = along(centroid, worst.parameters, -2.0);
        simplex[kDim] = better(expanded, reflected) ? expanded : reflected;
      } else if (better(reflected, second_worst)) {
        simplex[kDim] = reflected;
      } else {
        const bool outside = better(reflected, worst);
        const SearchPoint contracted = along(centroid, worst.parameters, outside ? -0.5 : 0.5);
        if (better(contracted, outside ? reflected : worst)) {
          simplex[kDim] = contracted;
        } else {
          for (std::size_t k = 1; k <= kDim; ++k) {
            Vertex v{};
            for (std::size_t i = 0; i < kDim; ++i)
              v[i] = simplex[0].parameters[i] + 0.5 * (simplex[k].parameters[i] - simplex[0].parameters[i]);
            simplex[k] = objective(v, expr);
          }
        }
      }
      order();
    }
    h.iterations = it;

    h.result = simplex[0];
    if (h.result.feasible) h.result = objective(canonical(h.result.parameters), expr);
    return h;
  }
};

}  // namespace

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

SearchPoint objective(const SearchParameters& x, const BellExpression& expr) {
  SearchPoint best;
  best.parameters = x;
  best.s_value = kNegInf;
  for (double v : x)
    if (!std::isfinite(v)) return best;

  const FamilyAngles angles = family_angles(x);
  OmegaSolutions solutions;
  try {
    solutions = solve_omega(angles);
  } catch (const FamilyError&) {
    return best;
  }
  for (std::size_t b = 0; b < solutions.branches.size(); ++b) {
    try {
      const FamilyState state = assemble_state(angles, solutions.branches[b]);
      const double s = evaluate(expr, correlation_tensor(state.rho, measurement_angles(x)));
      // omega and omega + pi give the same state; keep the lower index on ties.
      if (!best.feasible || s > best.s_value + kBranchTieTolerance) {
        best.feasible = true;
        best.s_value = s;
        best.branch = static_cast<int>(b);
        best.omega = state.omega;
        best.weights = state.weights;
      }
    } catch (const FamilyError&) {
    } catch (const ContractViolation&) {
    }
  }
  return best;
}

MaximizeResult maximize(const MaximizeConfig& config, std::uint64_t seed, const BellExpression& expr) {
  if (config.starts < 1) throw std::invalid_argument("maximize: starts must be >= 1");
  if (config.max_iterations < 0) throw std::invalid_argument("maximize: max_iterations must be >= 0");
  if (!(config.tolerance >= 0.0)) throw std::invalid_argument("maximize: tolerance must be >= 0");
  if (config.center && !(config.radius >= 0.0)) throw std::invalid_argument("maximize: radius must be >= 0");

  SplitMix64 master(seed);
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(config.starts));
  for (auto& s : seeds) s = master.next();

  MaximizeResult result;
  result.history.resize(seeds.size());
  const NelderMead nm{expr, config};

  const int threads = std::clamp(config.threads, 1, config.starts);
  if (threads == 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i) result.history[i] = nm.run(static_cast<int>(i), seeds[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < seeds.size();)
          result.history[i] = nm.run(static_cast<int>(i), seeds[i]);
      });
    for (auto& th : pool) th.join();
  }

  for (const auto& h : result.history) {
    if (!h.result.feasible) continue;
    if (result.best_start < 0 || better(h.result, result.best)) {
      result.best = h.result;
      result.best_start = h.start_index;
    }
  }
  if (result.best_start < 0) {
    throw NoFeasiblePoint("no start reached a parameter point with a valid state (" + std::to_string(config.starts) +
                          " starts)");
  }
  return result;
}

ScanGrid parse_grid(const std::string& spec) {
  ScanGrid grid;
  std::array<AxisRange*, 3> axes{&grid.alpha, &grid.beta, &grid.gamma};
  std::stringstream ss(spec);
  std::string part;
  std::size_t axis = 0;
  while (std::getline(ss, part, ',')) {
    if (axis >= axes.size()) throw std::invalid_argument("grid: expected exactly three axes");
    const auto c1 = part.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : part.find(':', c1 + 1);
    if (c2 == std::string::npos) throw std::invalid_argument("grid axis '" + part + "' is not lo:hi:n");
    AxisRange& r = *axes[axis++];
    r.lo = parse_angle_expression(part.substr(0, c1));
    r.hi = parse_angle_expression(part.substr(c1 + 1, c2 - c1 - 1));
    const std::string count = part.substr(c2 + 1);
    std::size_t used = 0;
    try {
      r.count = std::stoi(count, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != count.size() || r.count < 1) {
      throw std::invalid_argument("grid axis count '" + count + "' must be a positive integer");
    }
  }
  if (axis != axes.size()) throw std::invalid_argument("grid: expected exactly three axes");
  return grid;
}

std::vector<ScanRow> scan(const ScanGrid& grid, const BellExpression& expr) {
  for (const AxisRange* r : {&grid.alpha, &grid.beta, &grid.gamma})
    if (r->count < 1) throw std::invalid_argument("scan: step counts must be positive");

  std::vector<ScanRow> rows;
  rows.reserve(static_cast<std::size_t>(grid.alpha.count) * grid.beta.count * grid.gamma.count);
  for (int i = 0; i < grid.alpha.count; ++i)
    for (int j = 0; j < grid.beta.count; ++j)
      for (int k = 0; k < grid.gamma.count; ++k) {
        ScanRow row;
        row.angles = {grid.alpha.at(i), grid.beta.at(j), grid.gamma.at(k)};
        row.abc = abc_coefficients(row.angles);
        row.discriminant = row.abc.discriminant();

        std::vector<FamilyState> states;
        if (row.discriminant > 0.0) {
          const OmegaSolutions sol = solve_omega(row.angles);
          for (double omega : sol.branches) {
            BranchRecord br;
            br.omega = omega;
            try {
              br.weights = closed_form_weights(coefficients_from_angles(row.angles, omega));
              br.nonsingular = true;
              br.nonnegative = br.weights.nonnegative(kNegativeWeightTolerance);
            } catch (const FamilyError&) {
            }
            if (br.nonnegative) states.push_back(assemble_state(row.angles, omega));
            row.branches.push_back(br);
          }
        }
        row.valid_branches = static_cast<int>(states.size());
        row.feasible = !states.empty();
        if (row.feasible) row.certified = certify(states.front()).passed();

        if (row.feasible && grid.theta_steps > 0) {
          double best = kNegInf;
          MeasurementAngles best_theta;
          for (const auto& state : states)
            for (int a = 0; a < grid.theta_steps; ++a)
              for (int b = 0; b < grid.theta_steps; ++b) {
                const MeasurementAngles m{-kPi + 2.0 * kPi * a / grid.theta_steps,
                                          -kPi + 2.0 * kPi * b / grid.theta_steps};
                const double s = evaluate(expr, correlation_tensor(state.rho, m));
                if (s > best) {
                  best = s;
                  best_theta = m;
                }
              }
          row.best_s = best;
          row.best_theta = best_theta;
        }
        rows.push_back(std::move(row));
      }
  return rows;
}

}  // namespace bellbound
