#include "moprox/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "moprox/criticality.hpp"
#include "moprox/driver.hpp"
#include "moprox/errors.hpp"
#include "moprox/numfmt.hpp"
#include "moprox/scan.hpp"
#include "moprox/trace_io.hpp"
#include "moprox/verify.hpp"

namespace moprox {

namespace {

using ordered_json = nlohmann::ordered_json;

Vec parse_vector(const std::string& text, int nvars, const std::string& flag) {
  Vec out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ValidationError(flag + ": empty entry");
    bool ok = false;
    double v = parse_double(item.substr(b, e - b + 1), &ok);
    if (!ok) throw ValidationError(flag + ": could not parse '" + item + "' as a number");
    out.push_back(v);
  }
  if (static_cast<int>(out.size()) != nvars)
    throw ValidationError(flag + ": expected " + std::to_string(nvars) + " comma-separated values");
  return out;
}

ordered_json json_vec(const Vec& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(x);
  return a;
}

struct SolveArgs {
  std::string problem;
  std::string x0_text;
  int max_iter = 1000;
  double tol = 1e-8;
  double lambda = 0.0;
  double mu_bar = 0.0;
  std::string trace_path;
  bool has_x0 = false, has_lambda = false, has_mu = false;
  bool override_lambda_check = false;
};

int run_solve(const SolveArgs& a, std::ostream& out) {
  Problem p = Problem::load(a.problem);
  SolverConfig cfg = default_config(p);
  if (a.has_mu) {
    cfg.mu_bar = a.mu_bar;
    double max_l = 0.0;
    for (int j = 0; j < p.num_components(); ++j) max_l = std::max(max_l, p.max_lipschitz(j));
    cfg.lambda_constant = 1.01 * max_l / cfg.mu_bar;
    cfg.lambda_bar = 10.0 * cfg.lambda_constant;
  }
  if (a.has_lambda) {
    cfg.lambda_constant = a.lambda;
    cfg.lambda_bar = std::max(cfg.lambda_bar, a.lambda);
  }
  cfg.tol_outer = a.tol;
  cfg.tol_inner = std::min(1e-8, a.tol / 10.0);
  cfg.max_outer = a.max_iter;
  cfg.override_lambda_check = a.override_lambda_check;

  Vec x0 = a.has_x0 ? parse_vector(a.x0_text, p.nvars(), "--x0") : p.reference_point();
  Trace tr = solve(p, x0, cfg);
  if (!a.trace_path.empty()) write_trace_csv_file(a.trace_path, tr);

  const IterateRecord& last = tr.records.back();
  ordered_json j;
  j["status"] = to_string(tr.status);
  j["iterations"] = static_cast<int>(tr.records.size()) - 1;
  j["final_x"] = json_vec(tr.final_point);
  j["final_F"] = json_vec(last.F_of_x);
  j["step_norm"] = last.step_norm;
  j["criticality_residual"] = last.criticality_residual;
  out << j.dump(2) << "\n";
  return tr.status == SolveStatus::converged ? 0 : 2;
}

struct CriticalArgs {
  std::string problem;
  std::string x_text;
  double eps_active = 0.0;
  double tol = 1e-8;
  bool has_eps = false;
};

int run_critical(const CriticalArgs& a, std::ostream& out) {
  Problem p = Problem::load(a.problem);
  Vec x = parse_vector(a.x_text, p.nvars(), "--x");
  std::optional<double> eps;
  if (a.has_eps) eps = a.eps_active;
  CriticalityCertificate cert = criticality_residual(p, x, eps);

  ordered_json j;
  j["residual"] = cert.residual;
  j["critical"] = cert.residual <= a.tol;
  j["direction"] = cert.descent_direction ? json_vec(*cert.descent_direction)
                                          : ordered_json(nullptr);
  j["directional_upper_bounds"] = cert.descent_direction
                                      ? json_vec(cert.directional_upper_bounds)
                                      : ordered_json(nullptr);
  j["weights"] = json_vec(Vec(cert.weights.begin(), cert.weights.end()));
  ordered_json tags = ordered_json::array();
  for (const PieceRef& t : cert.generator_tags) {
    ordered_json g;
    g["component"] = p.component(t.component).name;
    g["piece"] = p.component(t.component).pieces[t.piece].label;
    tags.push_back(g);
  }
  j["generators"] = tags;
  out << j.dump(2) << "\n";
  return 0;
}

struct ScanArgs {
  std::string problem;
  std::string lo_text, hi_text;
  double step = 0.0;
};

int run_scan(const ScanArgs& a, std::ostream& out) {
  Problem p = Problem::load(a.problem);
  Vec lo = parse_vector(a.lo_text, p.nvars(), "--lo");
  Vec hi = parse_vector(a.hi_text, p.nvars(), "--hi");
  std::vector<Vec> pts = pareto_scan_grid(p, lo, hi, a.step);

  ordered_json j;
  j["count"] = static_cast<int>(pts.size());
  ordered_json arr = ordered_json::array();
  for (const Vec& x : pts) arr.push_back(json_vec(x));
  j["points"] = arr;
  out << j.dump(2) << "\n";
  return 0;
}

struct VerifyArgs {
  std::string problem;
  int samples = 1000;
  std::uint64_t seed = 42;
};

int run_verify(const VerifyArgs& a, std::ostream& out) {
  Problem p = Problem::load(a.problem);
  VerifyReport rep = run_verification(p, a.samples, a.seed);

  ordered_json j;
  j["all_passed"] = rep.all_passed();
  ordered_json suites = ordered_json::array();
  for (const SuiteResult& s : rep.suites) {
    ordered_json e;
    e["name"] = s.name;
    e["checks"] = s.checks;
    e["failures"] = s.failures;
    e["passed"] = s.passed();
    e["detail"] = s.detail;
    suites.push_back(e);
  }
  j["suites"] = suites;
  out << j.dump(2) << "\n";
  return rep.all_passed() ? 0 : 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Proximal point solver for max-structured multiobjective problems"};
  app.require_subcommand(1);

  SolveArgs sa;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Run the proximal point iteration");
  solve_cmd->add_option("--problem", sa.problem, "Problem JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  CLI::Option* x0_opt = solve_cmd->add_option("--x0", sa.x0_text,
                                              "Start point v1,v2,... (default: reference point)");
  solve_cmd->add_option("--max-iter", sa.max_iter, "Outer iteration cap")->capture_default_str();
  solve_cmd->add_option("--tol", sa.tol, "Outer step tolerance")->capture_default_str();
  CLI::Option* lam_opt = solve_cmd->add_option("--lambda", sa.lambda, "Regularization weight");
  CLI::Option* mu_opt = solve_cmd->add_option("--mu-bar", sa.mu_bar, "Weight floor in (0,1)");
  solve_cmd->add_option("--trace", sa.trace_path, "Write the iterate trace CSV here");
  solve_cmd->add_flag("--override-lambda-check", sa.override_lambda_check,
                      "Skip the lambda threshold validation");

  CriticalArgs ca;
  CLI::App* crit_cmd = app.add_subcommand("critical", "Pareto-Clarke criticality test at a point");
  crit_cmd->add_option("--problem", ca.problem, "Problem JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  crit_cmd->add_option("--x", ca.x_text, "Point v1,v2,...")->required();
  CLI::Option* eps_opt = crit_cmd->add_option("--eps-active", ca.eps_active,
                                              "Activity band (default: relative band)");
  crit_cmd->add_option("--tol", ca.tol, "Residual threshold")->capture_default_str();

  ScanArgs ga;
  CLI::App* scan_cmd = app.add_subcommand("scan", "Weak-Pareto filter over a grid");
  scan_cmd->add_option("--problem", ga.problem, "Problem JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  scan_cmd->add_option("--lo", ga.lo_text, "Grid lower corner v1,v2,...")->required();
  scan_cmd->add_option("--hi", ga.hi_text, "Grid upper corner v1,v2,...")->required();
  scan_cmd->add_option("--step", ga.step, "Grid spacing")->required();

  VerifyArgs va;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Run the hypothesis-checking suites");
  verify_cmd->add_option("--problem", va.problem, "Problem JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  verify_cmd->add_option("--samples", va.samples, "Samples per suite")->capture_default_str();
  verify_cmd->add_option("--seed", va.seed, "RNG seed")->capture_default_str();

  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("moprox");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const std::string& s : full) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  sa.has_x0 = x0_opt->count() > 0;
  sa.has_lambda = lam_opt->count() > 0;
  sa.has_mu = mu_opt->count() > 0;
  ca.has_eps = eps_opt->count() > 0;

  try {
    if (app.got_subcommand(solve_cmd)) return run_solve(sa, out);
    if (app.got_subcommand(crit_cmd)) return run_critical(ca, out);
    if (app.got_subcommand(scan_cmd)) return run_scan(ga, out);
    return run_verify(va, out);
  } catch (const SolveError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args) {
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace moprox
