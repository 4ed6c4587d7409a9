#include "fouk/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fouk/errors.hpp"
#include "fouk/grid.hpp"
#include "fouk/report_io.hpp"
#include "fouk/semigroup.hpp"

namespace fouk {

namespace {

namespace fs = std::filesystem;

std::vector<Eigen::VectorXd> parse_directions(
    const std::vector<std::vector<double>>& raw) {
  std::vector<Eigen::VectorXd> dirs;
  for (const auto& values : raw) {
    Eigen::VectorXd v(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) v(i) = values[i];
    dirs.push_back(v);
  }
  return dirs;
}

std::map<std::string, double> parse_preset_params(const std::string& text) {
  std::map<std::string, double> params;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) {
      throw InvalidInputError("preset parameter '" + item + "' is not key=value");
    }
    try {
      params[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (...) {
      throw InvalidInputError("preset parameter '" + item + "' has a bad value");
    }
  }
  return params;
}

std::string format_csv_value(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.12g", v);
  return buffer;
}

void emit(const RunConfig& cfg, const std::string& filename,
          const std::string& contents) {
  if (cfg.out_dir.empty()) {
    std::cout << contents;
    if (!contents.empty() && contents.back() != '\n') std::cout << '\n';
  } else {
    atomic_write((fs::path(cfg.out_dir) / filename).string(), contents);
  }
}

void check_paths(const RunConfig& cfg) {
  if (!cfg.op_path.empty() && !fs::exists(cfg.op_path)) {
    throw InvalidInputError("operator file not found: " + cfg.op_path);
  }
  if (!cfg.state_path.empty() && !fs::exists(cfg.state_path)) {
    throw InvalidInputError("state file not found: " + cfg.state_path);
  }
  if (!cfg.out_dir.empty()) fs::create_directories(cfg.out_dir);
}

SymbolContext context_for(const RunConfig& cfg) {
  SymbolContext ctx = make_context(resolve_operator(cfg), cfg.quad_order,
                                   cfg.opt_samples, cfg.rank_tol);
  ctx.seed = cfg.seed;
  return ctx;
}

int run_analyze(const RunConfig& cfg) {
  const OUOperator op = resolve_operator(cfg);
  const StructureReport report = compute_structure(op, cfg.rank_tol);
  emit(cfg, "structure.json", structure_report_to_json(report));
  return 0;
}

int run_symbol(const RunConfig& cfg) {
  SymbolContext ctx = context_for(cfg);
  if (cfg.directions.empty()) {
    throw InvalidInputError("symbol requires --xi v1,v2,…");
  }
  const Eigen::VectorXd xi = parse_directions(cfg.directions).front();
  if (xi.size() != ctx.op.n) {
    throw InvalidInputError("--xi length must match the operator dimension");
  }
  const bool have_sperp = ctx.report.dim_S() < ctx.op.n;
  std::ostringstream out;
  out << "t,xi,a_t,A,Gamma,M_t\n";
  std::string xi_text;
  for (int i = 0; i < xi.size(); ++i) {
    xi_text += (i ? ";" : "") + format_csv_value(xi(i));
  }
  for (double t : log_spaced(cfg.t_min, cfg.t_max, cfg.t_points)) {
    const double a = a_t(ctx, t, xi);
    const double A = cumulative_exponent(ctx, t, xi);
    const double gamma = gamma_symbol(ctx, cfg.q, t, cfg.tau, xi);
    out << format_csv_value(t) << ',' << xi_text << ',' << format_csv_value(a)
        << ',' << format_csv_value(A) << ',' << format_csv_value(gamma) << ',';
    out << (have_sperp ? format_csv_value(m_t(ctx, t)) : "nan") << '\n';
  }
  emit(cfg, "symbol.csv", out.str());
  return 0;
}

int run_evolve(const RunConfig& cfg) {
  SymbolContext ctx = context_for(cfg);
  if (cfg.state_path.empty()) throw InvalidInputError("evolve requires --state");

  std::ifstream in(cfg.state_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json parsed = nlohmann::json::parse(buffer.str(), nullptr, false);
  if (parsed.is_discarded() || !parsed.contains("type")) {
    throw InvalidInputError("state JSON needs a \"type\" field (gaussian|grid)");
  }

  GridState grid;
  if (parsed["type"] == "gaussian") {
    const GaussianState u = gaussian_from_json(buffer.str());
    if (u.n() != ctx.op.n) {
      throw InvalidInputError("state dimension does not match the operator");
    }
    grid = sample_on_grid(u, cfg.grid_N, cfg.grid_L);
  } else if (parsed["type"] == "grid") {
    grid = read_grid(cfg.state_path);
  } else {
    throw InvalidInputError("state type must be gaussian or grid");
  }

  GridEvolveReport report;
  const GridState evolved = grid_evolve(ctx, grid, cfg.t, &report);

  if (cfg.out_dir.empty()) throw InvalidInputError("evolve requires --out <dir>");
  const fs::path dir(cfg.out_dir);
  write_grid(evolved, (dir / "evolved.c64").string(),
             (dir / "evolved.json").string());

  nlohmann::json j;
  j["t"] = report.t;
  j["norm_in"] = report.norm_in;
  j["norm_out"] = report.norm_out;
  j["similitude_bound"] = report.similitude_bound;
  j["tail_fraction"] = report.tail_fraction;
  j["box_escape"] = report.box_escape;
  j["alias_warning"] = report.alias_warning;
  atomic_write((dir / "norms.json").string(), j.dump(2) + "\n");

  std::cout << "evolved t=" << report.t << " norm " << report.norm_in << " -> "
            << report.norm_out << " (bound " << report.similitude_bound << ")"
            << (report.box_escape ? " [box escape]" : "")
            << (report.alias_warning ? " [alias warning]" : "") << "\n";
  return 0;
}

int write_verification(const RunConfig& cfg, const VerificationReport& report) {
  const std::string stem = report.experiment;
  if (cfg.format == "csv") {
    emit(cfg, stem + ".csv", report_to_csv(report));
  } else {
    emit(cfg, stem + ".json", report_to_json(report, !cfg.no_timestamp));
  }
  std::cout << report.experiment << ": " << (report.pass ? "PASS" : "FAIL");
  for (const auto& [key, value] : report.fitted) {
    std::cout << " " << key << "=" << format_csv_value(value);
  }
  std::cout << "\n";
  return report.pass ? 0 : 2;
}

std::vector<Eigen::VectorXd> default_directions(const SymbolContext& ctx) {
  const Eigen::MatrixXd basis = ctx.report.s_perp_basis();
  if (basis.cols() == 0) {
    throw DegenerateOperatorError("operator has no smoothing directions");
  }
  return {basis.col(0)};
}

int run_verify(const RunConfig& cfg) {
  VerifierConfig vcfg = cfg.verifier;
  vcfg.seed = cfg.seed;
  vcfg.t_min = cfg.t_min;
  vcfg.t_points = cfg.t_points;

  if (cfg.experiment == "kolmogorov") {
    const double t_hi = cfg.t_max > 1.0 ? cfg.t_max : 10.0;
    const int points = std::max(cfg.t_points, 30);
    const VerificationReport report = kolmogorov_suite(
        cfg.s, log_spaced(cfg.t_min, t_hi, points), vcfg);
    return write_verification(cfg, report);
  }

  SymbolContext ctx = context_for(cfg);
  std::vector<Eigen::VectorXd> dirs = parse_directions(cfg.directions);

  if (cfg.experiment == "smoothing") {
    if (dirs.empty()) dirs = default_directions(ctx);
    const double hi = std::min(cfg.t_max, vcfg.t_fit_max);
    const ExponentFit fit =
        fit_blowup_exponent(ctx, dirs, log_spaced(cfg.t_min, hi, cfg.t_points), vcfg);
    return write_verification(cfg, fit_as_report("smoothing", fit));
  }
  if (cfg.experiment == "gevrey") {
    if (dirs.empty()) dirs = default_directions(ctx);
    const double t = cfg.t > 0.0 ? cfg.t : vcfg.gevrey_t;
    return write_verification(
        cfg, gevrey_growth(ctx, dirs, vcfg.m_max, t, vcfg));
  }
  if (cfg.experiment == "witness") {
    if (dirs.empty()) throw InvalidInputError("witness requires --xi");
    const double t = cfg.t > 0.0 ? cfg.t : 1.0;
    std::vector<double> lambdas;
    for (int i = 1; i <= cfg.lambda_points; ++i) {
      lambdas.push_back(cfg.lambda_max * i / cfg.lambda_points);
    }
    return write_verification(
        cfg, non_smoothing_witness(ctx, dirs.front(), t, lambdas, vcfg));
  }
  if (cfg.experiment == "subelliptic") {
    return write_verification(cfg,
                              subelliptic_check(ctx, vcfg.sample_count, vcfg));
  }
  if (cfg.experiment == "appendix") {
    const double hi = cfg.t_max > 0.0 ? cfg.t_max : 0.5;
    return write_verification(
        cfg, appendix_suite(ctx, log_spaced(cfg.t_min, hi, cfg.t_points), vcfg));
  }
  throw InvalidInputError("unknown experiment: " + cfg.experiment);
}

}  // namespace

OUOperator resolve_operator(const RunConfig& cfg) {
  if (!cfg.op_path.empty() && !cfg.preset.empty()) {
    throw InvalidInputError("give either --op or --preset, not both");
  }
  if (!cfg.op_path.empty()) return load_operator(cfg.op_path);
  if (cfg.preset.empty()) {
    throw InvalidInputError("an operator is required: --op <file> or --preset <name>");
  }
  const std::size_t colon = cfg.preset.find(':');
  const std::string name = cfg.preset.substr(0, colon);
  std::map<std::string, double> params;
  if (colon != std::string::npos) {
    params = parse_preset_params(cfg.preset.substr(colon + 1));
  }
  if (name == "kolmogorov") {
    const double s = params.count("s") ? params["s"] : 1.0;
    const int d = params.count("d") ? static_cast<int>(params["d"]) : 1;
    return kolmogorov_operator(s, d);
  }
  if (name == "fractional-heat") {
    const double s = params.count("s") ? params["s"] : 1.0;
    const int n = params.count("n") ? static_cast<int>(params["n"]) : 1;
    return fractional_heat_operator(n, s);
  }
  throw InvalidInputError("unknown preset: " + name +
                          " (expected kolmogorov or fractional-heat)");
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("fouk");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
  CLI::App app{
      "Fourier-side evaluation and verification toolkit for fractional "
      "Ornstein-Uhlenbeck semigroups"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::vector<std::string> dir_strings;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--op", cfg.op_path, "operator JSON file");
    sub->add_option("--preset", cfg.preset,
                    "kolmogorov[:s=…,d=…] or fractional-heat[:n=…,s=…]");
    sub->add_option("--seed", cfg.seed, "RNG seed for seeded scans");
    sub->add_option("--quad-order", cfg.quad_order, "Gauss-Legendre order")
        ->check(CLI::Range(16, 100000));
    sub->add_option("--opt-samples", cfg.opt_samples, "sphere multistart count")
        ->check(CLI::PositiveNumber);
    sub->add_option("--rank-tol", cfg.rank_tol, "rank/kernel tolerance");
    sub->add_option("--out", cfg.out_dir, "output directory (default: stdout)");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "structure report for (B, Q)");
  add_common(analyze);

  CLI::App* symbol = app.add_subcommand("symbol", "tabulate a_t, A, Gamma, M_t");
  add_common(symbol);
  symbol->add_option("--xi", dir_strings, "frequency vector v1,v2,…");
  symbol->add_option("--t-min", cfg.t_min, "grid start");
  symbol->add_option("--t-max", cfg.t_max, "grid end");
  symbol->add_option("--t-points", cfg.t_points, "grid size");
  symbol->add_option("--q", cfg.q, "Gamma exponent q");
  symbol->add_option("--tau", cfg.tau, "Gamma time tau");

  CLI::App* evolve = app.add_subcommand("evolve", "apply e^{-tP} to a state");
  add_common(evolve);
  evolve->add_option("--state", cfg.state_path, "state JSON (gaussian or grid)")
      ->required();
  evolve->add_option("--t", cfg.t, "evolution time")->required();
  evolve->add_option("--N", cfg.grid_N, "grid points per axis (gaussian input)");
  evolve->add_option("--L", cfg.grid_L, "half box length (gaussian input)");

  CLI::App* verify = app.add_subcommand("verify", "run a verification experiment");
  add_common(verify);
  verify
      ->add_option("experiment", cfg.experiment,
                   "smoothing|gevrey|witness|subelliptic|kolmogorov|appendix")
      ->required();
  verify->add_option("--s", cfg.s, "fractional order for the kolmogorov preset");
  verify->add_option("--t-min", cfg.t_min, "t grid start");
  verify->add_option("--t-max", cfg.t_max, "t grid end");
  verify->add_option("--t-points", cfg.t_points, "t grid size");
  verify->add_option("--t", cfg.t, "fixed t (gevrey, witness)");
  verify->add_option("--dir,--xi", dir_strings,
                     "direction v1,v2,… (repeatable)");
  verify->add_option("--m-max", cfg.verifier.m_max, "max derivative order");
  verify->add_option("--samples", cfg.verifier.sample_count,
                     "subelliptic sample count");
  verify->add_option("--lambda-max", cfg.lambda_max, "witness lambda range");
  verify->add_option("--lambda-points", cfg.lambda_points, "witness grid size");
  verify->add_option("--t-fit", cfg.verifier.t_fit_max, "fit window cap T_fit");
  verify->add_option("--slope-tol", cfg.verifier.slope_tol, "slope tolerance");
  verify->add_option("--r2-min", cfg.verifier.r2_min, "fit r^2 threshold");
  verify->add_option("--trend-tol", cfg.verifier.trend_ratio_max,
                     "gevrey trend ratio threshold");
  verify->add_option("--witness-r2", cfg.verifier.witness_r2_min,
                     "witness r^2 threshold");
  verify->add_option("--plateau-tol", cfg.verifier.plateau_slope_tol,
                     "appendix small-t slope tolerance");
  verify->add_option("--format", cfg.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  verify->add_flag("--no-timestamp", cfg.no_timestamp,
                   "omit the timestamp field (comparison mode)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    for (const std::string& text : dir_strings) {
      std::vector<double> dir;
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) dir.push_back(std::stod(item));
      if (dir.empty()) throw InvalidInputError("empty direction");
      cfg.directions.push_back(dir);
    }

    check_paths(cfg);
    if (analyze->parsed()) {
      cfg.command = "analyze";
      return run_analyze(cfg);
    }
    if (symbol->parsed()) {
      cfg.command = "symbol";
      return run_symbol(cfg);
    }
    if (evolve->parsed()) {
      cfg.command = "evolve";
      return run_evolve(cfg);
    }
    cfg.command = "verify";
    if (cfg.experiment == "kolmogorov" && cfg.preset.empty() &&
        cfg.op_path.empty()) {
      cfg.preset = "kolmogorov";  // the suite builds its own fixture from --s
    }
    if (cfg.experiment == "appendix" && cfg.t_max == 0.1) cfg.t_max = 0.5;
    return run_verify(cfg);
  } catch (const std::invalid_argument&) {
    std::cerr << "error: malformed numeric value in arguments\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fouk
