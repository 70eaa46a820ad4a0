#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "bellbound/angle_expression.hpp"
#include "bellbound/bell.hpp"
#include "bellbound/optimizer.hpp"
#include "bellbound/state_family.hpp"

#ifndef BELLBOUND_VERSION
#define BELLBOUND_VERSION "0.0.0"
#endif

namespace bellbound::cli {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kClaimTolerance = 1e-3;
constexpr double kViolationMargin = 1e-9;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ReferencePoint {
  const char* name;
  const char* alpha;
  const char* beta;
  const char* gamma;
  const char* theta1;
  const char* theta2;
  double omega;
  double p1, p2, p4;
  double s_value;
};

// Published parameter sets and the values reported for them.
constexpr ReferencePoint kMainPoint{"main", "pi/12", "pi/4", "5*pi/12", "2*pi/9", "-4*pi/9",
                                0.5682, 0.0636, 0.2737, 0.3890, 3.0069};
constexpr ReferencePoint kAppendixPoint{"appendix", "0.1545", "0.8460", "4.4903", "0.6897", "-1.2956",
                                    0.4808, 0.0338, 0.2433, 0.4796, 3.0187};

double angle(const std::optional<std::string>& text, const char* name) {
  if (!text) throw UsageError(std::string("missing required --") + name);
  try {
    return parse_angle_expression(*text);
  } catch (const AngleParseError& e) {
    throw UsageError(std::string("--") + name + ": " + e.what());
  }
}

Tolerances tolerances(const RunConfig& c) {
  Tolerances tol;
  tol.psd = c.tol_psd;
  tol.hermiticity = c.tol_herm;
  return tol;
}

json num(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return round_number(x);
}

json num_array(const auto& values) {
  json arr = json::array();
  for (double v : values) arr.push_back(num(v));
  return arr;
}

json weights_json(const Weights& w) {
  return {{"p1", num(w.p1)}, {"p2", num(w.p2)}, {"p3", num(w.p2)}, {"p4", num(w.p4)},
          {"q", num(w.q)},   {"normalization", num(w.normalization())}};
}

json certification_json(const CertificationRecord& rec) {
  json j;
  j["hermiticity_residual"] = num(rec.hermiticity_residual);
  j["trace_residual"] = num(rec.trace_residual);
  j["spectrum"] = num_array(rec.spectrum);
  j["min_eigenvalue"] = num(rec.min_eigenvalue);
  j["pt_spectra"] = {{"A", num_array(rec.pt_spectra[0])},
                     {"B", num_array(rec.pt_spectra[1])},
                     {"C", num_array(rec.pt_spectra[2])}};
  j["pt_min_eigenvalues"] = num_array(rec.pt_min_eigenvalues);
  j["pt_residuals"] = num_array(rec.pt_residuals);
  j["symmetry_residual"] = num(rec.symmetry_residual);
  j["relation_residuals"] = num_array(rec.relation_residuals);
  j["orthonormality_residual"] = rec.orthonormality_residual ? num(*rec.orthonormality_residual) : json(nullptr);
  const auto& c = rec.checks;
  j["checks"] = {{"hermitian", c.hermitian},       {"unit_trace", c.unit_trace}, {"positive", c.positive},
                 {"ppt", c.ppt},                   {"pt_invariant", c.pt_invariant},
                 {"symmetric", c.symmetric},       {"relations", c.relations},
                 {"orthonormal", c.orthonormal},   {"passed", rec.passed()}};
  return j;
}

json correlators_json(const CorrelationTensor& t) {
  json j = json::object();
  for (std::size_t i = 1; i < kMonomialCount; ++i) {
    const Monomial m = monomial_at(i);
    j[monomial_name(m)] = num(t[m]);
  }
  return j;
}

json report_header(const RunConfig& config) {
  return {{"tool", "bellbound"}, {"version", version_string()}, {"config", to_json(config)}};
}

struct Evaluated {
  json report;
  bool premise_passed = false;
  bool violated = false;
  double s_value = 0.0;
  double omega = 0.0;
  Weights weights;
};

// Full report for a family point. `forced_omega` / `forced_branch` pick the
// state; otherwise the branch with the largest S is detailed.
Evaluated evaluate_point(const RunConfig& config, const FamilyAngles& angles, const MeasurementAngles& theta,
                         std::optional<double> forced_omega, std::optional<int> forced_branch) {
  const Tolerances tol = tolerances(config);
  const BellExpression expr = BellExpression::sliwa5();
  const double bound = local_bound(expr).bound;

  Evaluated ev;
  json& r = ev.report;
  r = report_header(config);
  r["parameters"] = {{"alpha", num(angles.alpha)},   {"beta", num(angles.beta)},
                     {"gamma", num(angles.gamma)},   {"theta1", num(theta.theta1)},
                     {"theta2", num(theta.theta2)}};

  const AbcCoefficients abc = abc_coefficients(angles);
  json omega_json = {{"A", num(abc.a)}, {"B", num(abc.b)}, {"C", num(abc.c)}, {"discriminant", num(abc.discriminant())}};

  std::vector<double> branches;
  try {
    branches = solve_omega(angles).branches;
  } catch (const FamilyError&) {
    if (!forced_omega) throw;
  }
  omega_json["branches"] = num_array(branches);

  // Candidate states.
  json branch_list = json::array();
  std::optional<FamilyState> chosen;
  std::optional<int> chosen_index;
  double chosen_s = -std::numeric_limits<double>::infinity();
  std::string failure = "no omega branch with nonnegative weights";

  auto consider = [&](double omega, std::optional<int> index) {
    json b = {{"omega", num(omega)}};
    if (index) b["index"] = *index;
    try {
      FamilyState state = assemble_state(angles, omega);
      const double s = evaluate(expr, correlation_tensor(state.rho, theta));
      b["valid"] = true;
      b["weights"] = weights_json(state.weights);
      b["s_value"] = num(s);
      if (!chosen || s > chosen_s + 1e-12) {
        chosen_s = s;
        chosen_index = index;
        chosen.emplace(std::move(state));
      }
    } catch (const FamilyError& e) {
      b["valid"] = false;
      b["reason"] = e.what();
      if (e.weights()) b["weights"] = weights_json(*e.weights());
      failure = e.what();
    }
    branch_list.push_back(std::move(b));
  };

  if (forced_omega) {
    consider(*forced_omega, std::nullopt);
  } else if (forced_branch) {
    if (*forced_branch < 0 || *forced_branch >= static_cast<int>(branches.size())) {
      throw UsageError("--branch must be in [0, " + std::to_string(branches.size()) + ")");
    }
    consider(branches[static_cast<std::size_t>(*forced_branch)], *forced_branch);
  } else {
    for (std::size_t i = 0; i < branches.size(); ++i) consider(branches[i], static_cast<int>(i));
  }
  omega_json["candidates"] = branch_list;
  r["omega"] = omega_json;

  if (!chosen) throw FamilyError(FamilyErrorKind::Infeasible, failure);

  const FamilyState& state = *chosen;
  const CertificationRecord rec = certify(state, tol);
  const CorrelationTensor tensor = correlation_tensor(state.rho, theta);

  r["omega"]["selected"] = num(state.omega);
  r["omega"]["selected_branch"] = chosen_index ? json(*chosen_index) : json(nullptr);
  r["omega"]["residual"] = num(omega_residual(abc, state.omega));
  r["weights"] = weights_json(state.weights);
  r["equation_residuals"] = num_array(invariance_equation_residuals(state.coefficients, state.weights));
  r["certification"] = certification_json(rec);
  r["correlators"] = correlators_json(tensor);
  r["s_value"] = num(chosen_s);
  r["local_bound"] = num(bound);
  ev.premise_passed = rec.passed();
  ev.violated = chosen_s > bound + kViolationMargin;
  r["verdict"] = {{"biseparable_premise_passed", ev.premise_passed}, {"bell_violated", ev.violated}};
  r["status"] = "ok";

  ev.s_value = chosen_s;
  ev.omega = state.omega;
  ev.weights = state.weights;
  return ev;
}

json infeasible_report(const RunConfig& config, const std::string& reason) {
  json r = report_header(config);
  r["status"] = "infeasible";
  r["reason"] = reason;
  return r;
}

void write_output(const RunConfig& config, const std::string& text, std::ostream& out) {
  if (config.out) {
    std::ofstream f(*config.out);
    if (!f) throw UsageError("cannot open --out file " + *config.out);
    f << text;
  } else {
    out << text;
  }
}

void emit_json(const RunConfig& config, const json& j, std::ostream& out) { write_output(config, j.dump(2) + "\n", out); }

std::string csv_number(double x) {
  if (std::isnan(x)) return "";
  return format_number(x);
}

SearchParameters parse_center(const std::string& text) {
  SearchParameters x{};
  std::stringstream ss(text);
  std::string part;
  std::size_t i = 0;
  while (std::getline(ss, part, ',')) {
    if (i >= x.size()) throw UsageError("--center expects five comma-separated angles");
    try {
      x[i++] = parse_angle_expression(part);
    } catch (const AngleParseError& e) {
      throw UsageError(std::string("--center: ") + e.what());
    }
  }
  if (i != x.size()) throw UsageError("--center expects five comma-separated angles");
  return x;
}

}  // namespace

std::string version_string() { return std::string("bellbound ") + BELLBOUND_VERSION; }

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;  // drop the sign of negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double round_number(double x) {
  if (!std::isfinite(x)) return x;
  const double r = std::strtod(format_number(x).c_str(), nullptr);
  return r == 0.0 ? 0.0 : r;  // no negative zero in reports
}

json to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  auto opt = [&](const char* key, const auto& v) {
    if (v) j[key] = *v;
  };
  if (c.command == "reproduce") {
    j["which"] = c.which;
    if (c.perturb_alpha != 0.0) j["perturb_alpha"] = c.perturb_alpha;
  }
  if (c.command == "certify") {
    opt("alpha", c.alpha);
    opt("beta", c.beta);
    opt("gamma", c.gamma);
    opt("omega", c.omega);
    opt("branch", c.branch);
    opt("theta1", c.theta1);
    opt("theta2", c.theta2);
  }
  if (c.command == "optimize") {
    j["seed"] = c.seed;
    j["starts"] = c.starts;
    j["max_iterations"] = c.max_iterations;
    j["tolerance"] = c.tolerance;
    j["threads"] = c.threads;
    opt("center", c.center);
    j["radius"] = c.radius;
    opt("history", c.history);
  }
  if (c.command == "scan") {
    j["grid"] = c.grid;
    j["theta_steps"] = c.theta_steps;
  }
  if (c.command == "local-bound") {
    j["expression"] = c.expression;
    opt("expression_file", c.expression_file);
    j["negate"] = c.negate;
  }
  j["format"] = c.format;
  j["tol_psd"] = c.tol_psd;
  j["tol_herm"] = c.tol_herm;
  return j;
}

RunConfig config_from_json(const json& source) {
  const json& j = source.contains("config") && source["config"].is_object() ? source["config"] : source;
  RunConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  auto get_opt = [&](const char* key, auto& field) {
    if (j.contains(key) && !j.at(key).is_null()) field = j.at(key).get<typename std::decay_t<decltype(field)>::value_type>();
  };
  get("command", c.command);
  get("which", c.which);
  get_opt("alpha", c.alpha);
  get_opt("beta", c.beta);
  get_opt("gamma", c.gamma);
  get_opt("omega", c.omega);
  get_opt("branch", c.branch);
  get_opt("theta1", c.theta1);
  get_opt("theta2", c.theta2);
  get("seed", c.seed);
  get("starts", c.starts);
  get("max_iterations", c.max_iterations);
  get("tolerance", c.tolerance);
  get("threads", c.threads);
  get_opt("center", c.center);
  get("radius", c.radius);
  get_opt("history", c.history);
  get("grid", c.grid);
  get("theta_steps", c.theta_steps);
  get("expression", c.expression);
  get_opt("expression_file", c.expression_file);
  get("negate", c.negate);
  get("format", c.format);
  get("tol_psd", c.tol_psd);
  get("tol_herm", c.tol_herm);
  get("perturb_alpha", c.perturb_alpha);
  return c;
}

int cmd_reproduce(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const ReferencePoint* point = nullptr;
  if (config.which == "main") point = &kMainPoint;
  else if (config.which == "appendix") point = &kAppendixPoint;
  else throw UsageError("reproduce expects 'main' or 'appendix', got '" + config.which + "'");

  const FamilyAngles angles{parse_angle_expression(point->alpha) + config.perturb_alpha,
                            parse_angle_expression(point->beta), parse_angle_expression(point->gamma)};
  const MeasurementAngles theta{parse_angle_expression(point->theta1), parse_angle_expression(point->theta2)};

  Evaluated ev;
  try {
    ev = evaluate_point(config, angles, theta, std::nullopt, std::nullopt);
  } catch (const FamilyError& e) {
    emit_json(config, infeasible_report(config, e.what()), out);
    err << "reproduce " << point->name << ": point is infeasible: " << e.what() << "\n";
    return kClaimsFailed;
  }

  // omega and omega + pi describe the same state; compare modulo pi.
  const double omega_mod_pi = ev.omega - kPi * std::round((ev.omega - point->omega) / kPi);
  struct Claim {
    const char* name;
    double expected;
    double computed;
  };
  const Claim claims[] = {
      {"S", point->s_value, ev.s_value},       {"omega", point->omega, omega_mod_pi},
      {"p1", point->p1, ev.weights.p1},        {"p2", point->p2, ev.weights.p2},
      {"p4", point->p4, ev.weights.p4},
  };

  bool ok = ev.premise_passed;
  json claim_list = json::array();
  for (const auto& c : claims) {
    const bool pass = std::abs(c.computed - c.expected) <= kClaimTolerance;
    ok = ok && pass;
    claim_list.push_back({{"name", c.name}, {"expected", c.expected}, {"computed", num(c.computed)},
                          {"tolerance", kClaimTolerance}, {"pass", pass}});
    if (!pass) {
      err << "mismatch " << c.name << ": expected " << format_number(c.expected) << " computed "
          << format_number(c.computed) << " (diff " << format_number(c.computed - c.expected) << ")\n";
    }
  }
  if (!ev.premise_passed) err << "certification failed for the " << point->name << " point\n";
  ev.report["claims"] = claim_list;
  ev.report["claims_verified"] = ok;
  emit_json(config, ev.report, out);
  return ok ? kSuccess : kClaimsFailed;
}

int cmd_certify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const FamilyAngles angles{angle(config.alpha, "alpha"), angle(config.beta, "beta"), angle(config.gamma, "gamma")};
  const MeasurementAngles theta{angle(config.theta1, "theta1"), angle(config.theta2, "theta2")};
  if (config.omega && config.branch) throw UsageError("--omega and --branch are mutually exclusive");
  std::optional<double> omega;
  if (config.omega) omega = angle(config.omega, "omega");

  try {
    const Evaluated ev = evaluate_point(config, angles, theta, omega, config.branch);
    emit_json(config, ev.report, out);
    return kSuccess;
  } catch (const FamilyError& e) {
    emit_json(config, infeasible_report(config, e.what()), out);
    err << "infeasible point: " << e.what() << "\n";
    return kInfeasible;
  }
}

int cmd_optimize(const RunConfig& config, std::ostream& out, std::ostream& err) {
  MaximizeConfig mc;
  mc.starts = config.starts;
  mc.max_iterations = config.max_iterations;
  mc.tolerance = config.tolerance;
  mc.threads = config.threads;
  if (config.center) mc.center = parse_center(*config.center);
  mc.radius = config.radius;

  MaximizeResult result;
  try {
    result = maximize(mc, config.seed);
  } catch (const NoFeasiblePoint& e) {
    emit_json(config, infeasible_report(config, e.what()), out);
    err << e.what() << "\n";
    return kInfeasible;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const std::string history_path =
      config.history ? *config.history : (config.out ? *config.out + ".history.csv" : "optimize-history.csv");
  {
    std::ofstream h(history_path);
    if (!h) throw UsageError("cannot open history file " + history_path);
    h << "start,iteration,best_s,diameter,alpha,beta,gamma,theta1,theta2\n";
    for (const auto& start : result.history)
      for (const auto& t : start.trace) {
        h << start.start_index << ',' << t.iteration << ',' << csv_number(t.best_s) << ',' << csv_number(t.diameter);
        for (double v : t.best) h << ',' << csv_number(v);
        h << '\n';
      }
  }

  const SearchPoint& best = result.best;
  const Evaluated ev = evaluate_point(config, family_angles(best.parameters), measurement_angles(best.parameters),
                                      std::nullopt, best.branch);
  json report = ev.report;
  json starts = json::array();
  for (const auto& s : result.history) {
    starts.push_back({{"start", s.start_index},
                      {"initial", num_array(s.start)},
                      {"feasible", s.result.feasible},
                      {"s_value", num(s.result.s_value)},
                      {"iterations", s.iterations},
                      {"converged", s.converged}});
  }
  report["optimizer"] = {{"best_start", result.best_start},
                         {"best_parameters", num_array(best.parameters)},
                         {"history_file", history_path},
                         {"starts", starts}};
  emit_json(config, report, out);
  if (!ev.premise_passed) {
    err << "best point failed certification\n";
    return kClaimsFailed;
  }
  return kSuccess;
}

int cmd_scan(const RunConfig& config, std::ostream& out, std::ostream& /*err*/) {
  ScanGrid grid;
  try {
    grid = parse_grid(config.grid);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--grid: ") + e.what());
  }
  if (config.theta_steps < 0) throw UsageError("--theta-steps must be >= 0");
  grid.theta_steps = config.theta_steps;
  const std::vector<ScanRow> rows = scan(grid);

  if (config.format == "json") {
    json j = report_header(config);
    json list = json::array();
    for (const auto& row : rows) {
      json branches = json::array();
      for (const auto& b : row.branches)
        branches.push_back({{"omega", num(b.omega)},
                            {"nonsingular", b.nonsingular},
                            {"nonnegative", b.nonnegative},
                            {"weights", b.nonsingular ? weights_json(b.weights) : json(nullptr)}});
      list.push_back({{"alpha", num(row.angles.alpha)},
                      {"beta", num(row.angles.beta)},
                      {"gamma", num(row.angles.gamma)},
                      {"A", num(row.abc.a)},
                      {"B", num(row.abc.b)},
                      {"C", num(row.abc.c)},
                      {"discriminant", num(row.discriminant)},
                      {"branches", branches},
                      {"valid_branches", row.valid_branches},
                      {"feasible", row.feasible},
                      {"certified", row.certified},
                      {"best_s", row.best_s ? num(*row.best_s) : json(nullptr)}});
    }
    j["rows"] = list;
    emit_json(config, j, out);
    return kSuccess;
  }
  if (config.format != "csv") throw UsageError("--format must be json or csv");

  std::ostringstream csv;
  csv << "alpha,beta,gamma,coef_a,coef_b,coef_c,discriminant,branch_count,branch_mask,valid_branches,feasible,"
         "certified,omega,p1,p2,p4,best_s,best_theta1,best_theta2\n";
  for (const auto& row : rows) {
    std::string mask;
    const BranchRecord* first_valid = nullptr;
    for (const auto& b : row.branches) {
      mask += b.nonnegative ? '1' : '0';
      if (b.nonnegative && !first_valid) first_valid = &b;
    }
    csv << csv_number(row.angles.alpha) << ',' << csv_number(row.angles.beta) << ',' << csv_number(row.angles.gamma)
        << ',' << csv_number(row.abc.a) << ',' << csv_number(row.abc.b) << ',' << csv_number(row.abc.c) << ','
        << csv_number(row.discriminant) << ',' << row.branches.size() << ',' << mask << ',' << row.valid_branches
        << ',' << (row.feasible ? 1 : 0) << ',' << (row.certified ? 1 : 0) << ',';
    if (first_valid) {
      csv << csv_number(first_valid->omega) << ',' << csv_number(first_valid->weights.p1) << ','
          << csv_number(first_valid->weights.p2) << ',' << csv_number(first_valid->weights.p4) << ',';
    } else {
      csv << ",,,,";
    }
    if (row.best_s) {
      csv << csv_number(*row.best_s) << ',' << csv_number(row.best_theta->theta1) << ','
          << csv_number(row.best_theta->theta2);
    } else {
      csv << ",,";
    }
    csv << '\n';
  }
  write_output(config, csv.str(), out);
  return kSuccess;
}

int cmd_local_bound(const RunConfig& config, std::ostream& out, std::ostream& /*err*/) {
  BellExpression expr;
  if (config.expression_file) {
    std::ifstream f(*config.expression_file);
    if (!f) throw UsageError("cannot read expression file " + *config.expression_file);
    std::stringstream buf;
    buf << f.rdbuf();
    expr = parse_expression(buf.str());
  } else if (config.expression == "sliwa5") {
    expr = BellExpression::sliwa5();
  } else {
    throw UsageError("unknown built-in expression '" + config.expression + "' (known: sliwa5)");
  }
  if (config.negate) expr = expr.negated();

  const LocalBound lb = local_bound(expr);
  json j = report_header(config);
  json terms = json::array();
  for (const auto& [m, coef] : expr.terms()) terms.push_back({{"monomial", monomial_name(m)}, {"coefficient", coef}});
  j["terms"] = terms;
  j["local_bound"] = num(lb.bound);
  j["algebraic_maximum"] = expr.algebraic_maximum();
  json strategies = json::array();
  for (const auto& s : lb.maximizers)
    strategies.push_back({{"A", {s[0][0], s[0][1]}}, {"B", {s[1][0], s[1][1]}}, {"C", {s[2][0], s[2][1]}}});
  j["strategies"] = strategies;
  emit_json(config, j, out);
  return kSuccess;
}

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.command == "reproduce") return cmd_reproduce(config, out, err);
    if (config.command == "certify") return cmd_certify(config, out, err);
    if (config.command == "optimize") return cmd_optimize(config, out, err);
    if (config.command == "scan") return cmd_scan(config, out, err);
    if (config.command == "local-bound") return cmd_local_bound(config, out, err);
    throw UsageError("unknown command '" + config.command + "'");
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ExpressionParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kUsageError;
  } catch (const AngleParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  // A --config file supplies defaults; explicit flags override it.
  RunConfig config;
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      std::ifstream f(args[i + 1]);
      if (!f) {
        err << "error: cannot read config file " << args[i + 1] << "\n";
        return kUsageError;
      }
      try {
        config = config_from_json(json::parse(f));
      } catch (const json::exception& e) {
        err << "error: bad config file: " << e.what() << "\n";
        return kUsageError;
      }
    }
  }

  CLI::App app{"Biseparable 3-qubit states and their Bell violation", "bellbound"};
  app.set_version_flag("--version", version_string());
  std::string config_path;
  app.add_option("--config", config_path, "JSON run config (or a report embedding one)");
  app.add_option("--format", config.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", config.out, "write the report here instead of stdout");
  app.add_option("--tol-psd", config.tol_psd, "smallest eigenvalue accepted as nonnegative");
  app.add_option("--tol-herm", config.tol_herm, "Hermiticity tolerance");

  auto* reproduce = app.add_subcommand("reproduce", "re-derive a published parameter point and check its numbers");
  reproduce->add_option("which", config.which, "main | appendix")->check(CLI::IsMember({"main", "appendix"}));
  reproduce->add_option("--perturb-alpha", config.perturb_alpha)->group("");  // fault injection

  auto* certify_cmd = app.add_subcommand("certify", "full report for an arbitrary parameter point");
  using AngleFlag = std::pair<const char*, std::optional<std::string>*>;
  for (const AngleFlag& flag : std::initializer_list<AngleFlag>{{"--alpha", &config.alpha},
                                                                {"--beta", &config.beta},
                                                                {"--gamma", &config.gamma},
                                                                {"--theta1", &config.theta1},
                                                                {"--theta2", &config.theta2},
                                                                {"--omega", &config.omega}})
    certify_cmd->add_option(flag.first, *flag.second, "angle in radians; accepts expressions like 5*pi/12");
  certify_cmd->add_option("--branch", config.branch, "omega branch index 0-3");

  auto* optimize = app.add_subcommand("optimize", "multi-start search for the largest violation");
  optimize->add_option("--seed", config.seed);
  optimize->add_option("--starts", config.starts)->check(CLI::PositiveNumber);
  optimize->add_option("--max-iterations", config.max_iterations)->check(CLI::NonNegativeNumber);
  optimize->add_option("--tolerance", config.tolerance)->check(CLI::NonNegativeNumber);
  optimize->add_option("--threads", config.threads)->check(CLI::PositiveNumber);
  optimize->add_option("--center", config.center, "alpha,beta,gamma,theta1,theta2 to sample starts around");
  optimize->add_option("--radius", config.radius)->check(CLI::NonNegativeNumber);
  optimize->add_option("--history", config.history, "CSV path for the per-start convergence trace");

  auto* scan_cmd = app.add_subcommand("scan", "feasibility map over an (alpha, beta, gamma) grid");
  scan_cmd->add_option("--grid", config.grid, "a0:a1:n,b0:b1:n,c0:c1:n");
  scan_cmd->add_option("--theta-steps", config.theta_steps, "also record best S over this many theta steps per axis");

  auto* lb = app.add_subcommand("local-bound", "enumerate deterministic strategies");
  lb->add_option("expression", config.expression, "built-in name (sliwa5)");
  lb->add_option("--file", config.expression_file, "expression file, one term per line");
  lb->add_flag("--negate", config.negate, "flip every coefficient");

  for (auto* sub : {reproduce, certify_cmd, optimize, scan_cmd, lb}) {
    sub->add_option("--format", config.format)->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", config.out);
    sub->add_option("--tol-psd", config.tol_psd);
    sub->add_option("--tol-herm", config.tol_herm);
    sub->add_option("--config", config_path);
  }
  app.require_subcommand(0, 1);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    out << version_string() << "\n";
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  if (const auto subs = app.get_subcommands(); !subs.empty()) {
    config.command = subs.front()->get_name();
  } else if (config.command.empty()) {
    out << app.help();
    return kUsageError;
  }
  if (config.command == "scan" && config.grid.empty()) {
    err << "error: scan requires --grid\n";
    return kUsageError;
  }
  return dispatch(config, out, err);
}

}  // namespace bellbound::cli
