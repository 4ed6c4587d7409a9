#include "fouk/verifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "fouk/errors.hpp"
#include "fouk/parallel.hpp"

namespace fouk {

namespace {

std::string echo_inputs(const SymbolContext& ctx, const VerifierConfig& cfg) {
  std::ostringstream out;
  out << "{\"operator\":" << operator_to_json(ctx.op) << ",\"seed\":" << cfg.seed
      << ",\"quad_order\":" << ctx.quad_order << "}";
  return out.str();
}

double mean(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  double acc = 0.0;
  for (std::size_t i = begin; i < end; ++i) acc += v[i];
  return acc / static_cast<double>(end - begin);
}

}  // namespace

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidInputError("linear_fit needs at least two points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw InvalidInputError("linear_fit: degenerate abscissae");
  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = fit.intercept + fit.slope * x[i];
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r_squared = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot)
                               : (ss_res == 0.0 ? 1.0 : 0.0);
  return fit;
}

ExponentFit fit_blowup_exponent(const SymbolContext& ctx,
                                const std::vector<Eigen::VectorXd>& directions,
                                const std::vector<double>& t_grid,
                                const VerifierConfig& cfg) {
  if (directions.empty()) throw InvalidInputError("fit needs directions");
  if (t_grid.size() < 3) throw InvalidInputError("fit needs >= 3 grid points");

  ExponentFit fit;
  fit.directions = directions;
  fit.t_grid = t_grid;

  // Directions with an S-component make every norm in the series infinite;
  // report the flag instead of a fit (Theorem dichotomy).
  for (const Eigen::VectorXd& xi : directions) {
    if (ctx.report.project_S(xi).norm() > 1e-8 * xi.norm()) {
      fit.unbounded_hit = true;
      fit.pass = false;
      return fit;
    }
  }

  double predicted = 0.0;
  for (const Eigen::VectorXd& xi : directions) {
    predicted -= static_cast<double>(index_of(ctx.report, xi));
  }
  predicted -= static_cast<double>(directions.size()) / (2.0 * ctx.op.s);
  fit.predicted_slope = predicted;

  const double half_trB = 0.5 * ctx.op.B.trace();
  fit.log_values.resize(t_grid.size());
  std::vector<char> unbounded(t_grid.size(), 0);
  parallel_for(t_grid.size(), [&](std::size_t i) {
    const MultiplierNorm norm = operator_norm(ctx, t_grid[i], directions);
    if (norm.unbounded) {
      unbounded[i] = 1;
      return;
    }
    fit.log_values[i] = norm.log_value + half_trB * t_grid[i];
  });
  for (char flag : unbounded) {
    if (flag) {
      fit.unbounded_hit = true;
      fit.pass = false;
      return fit;
    }
  }

  std::vector<double> log_t(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) log_t[i] = std::log(t_grid[i]);
  const LinearFit lf = linear_fit(log_t, fit.log_values);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.r_squared = lf.r_squared;
  fit.pass = std::abs(fit.slope - fit.predicted_slope) <= cfg.slope_tol &&
             fit.r_squared >= cfg.r2_min;
  return fit;
}

VerificationReport gevrey_growth(const SymbolContext& ctx,
                                 const std::vector<Eigen::VectorXd>& direction_family,
                                 int m_max, double t, const VerifierConfig& cfg) {
  if (direction_family.empty()) throw InvalidInputError("gevrey needs directions");
  if (m_max < 4) throw InvalidInputError("gevrey needs m_max >= 4");

  VerificationReport report;
  report.experiment = "gevrey";
  report.inputs = echo_inputs(ctx, cfg);
  report.tolerance = cfg.trend_ratio_max;

  const double s = ctx.op.s;
  std::vector<double> h(m_max - 1);
  parallel_for(static_cast<std::size_t>(m_max - 1), [&](std::size_t j) {
    const int m = static_cast<int>(j) + 2;
    std::vector<Eigen::VectorXd> dirs;
    double index_sum = 0.0;
    for (int i = 0; i < m; ++i) {
      const Eigen::VectorXd& xi = direction_family[i % direction_family.size()];
      dirs.push_back(xi);
      index_sum += static_cast<double>(index_of(ctx.report, xi));
    }
    const MultiplierNorm norm = operator_norm(ctx, t, dirs);
    if (norm.unbounded) {
      throw NotInSPerpError("gevrey: direction family leaves S^perp");
    }
    // log g_m = log norm + (sum k + m/(2s)) log t; everything stays in logs.
    const double log_g =
        norm.log_value + (index_sum + m / (2.0 * s)) * std::log(t);
    h[j] = std::exp((log_g - std::lgamma(m + 1.0) / (2.0 * s)) / m);
  });

  for (std::size_t j = 0; j < h.size(); ++j) {
    report.series.push_back({"h_m", static_cast<double>(j + 2), h[j]});
  }
  const std::size_t third = h.size() / 3;
  const double first = mean(h, 0, third);
  const double last = mean(h, h.size() - third, h.size());
  report.fitted["c"] = *std::max_element(h.begin(), h.end());
  report.fitted["first_third_mean"] = first;
  report.fitted["last_third_mean"] = last;
  report.fitted["trend_ratio"] = last / first;
  report.pass = last <= cfg.trend_ratio_max * first;
  return report;
}

VerificationReport non_smoothing_witness(const SymbolContext& ctx,
                                         const Eigen::VectorXd& xi0, double t,
                                         const std::vector<double>& lambda_grid,
                                         const VerifierConfig& cfg) {
  if (lambda_grid.size() < 3) {
    throw InvalidInputError("witness needs >= 3 lambda points");
  }
  const Eigen::VectorXd xi_S = ctx.report.project_S(xi0);
  if (xi_S.norm() <= 1e-6) {
    throw NotAWitnessError(
        "direction lies in S^perp; use fit_blowup_exponent instead");
  }

  VerificationReport report;
  report.experiment = "witness";
  report.inputs = echo_inputs(ctx, cfg);
  report.tolerance = cfg.witness_r2_min;

  const int n = ctx.op.n;
  std::vector<double> values(lambda_grid.size());
  parallel_for(lambda_grid.size(), [&](std::size_t i) {
    GaussianState u = GaussianState::standard(n);
    u.omega = lambda_grid[i] * xi_S;
    values[i] = multiplier_seminorm(ctx, u, t, {xi0}, cfg.quadrature);
  });
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    report.series.push_back({"N_lambda", lambda_grid[i], values[i]});
  }

  const LinearFit lf = linear_fit(lambda_grid, values);
  report.fitted["slope"] = lf.slope;
  report.fitted["r_squared"] = lf.r_squared;
  // Asymptotic slope |xi_S|^2 ||e^{-t a_t^w} u_0||.
  GaussianState base = GaussianState::standard(n);
  report.fitted["predicted_slope"] =
      xi_S.squaredNorm() * multiplier_seminorm(ctx, base, t, {}, cfg.quadrature);
  report.pass = lf.slope > 0.0 && lf.r_squared >= cfg.witness_r2_min;
  return report;
}

Complex apply_P_fourier(const SymbolContext& ctx, const GaussianState& u,
                        const Eigen::VectorXd& xi) {
  const Complex uhat = fourier_gaussian(u, xi);
  const Eigen::VectorXcd grad = fourier_gaussian_gradient(u, xi);
  const double diffusion =
      0.5 * std::pow((ctx.report.sqrtQ * xi).squaredNorm(), ctx.op.s);
  const Eigen::VectorXd bt_xi = ctx.op.B.transpose() * xi;
  Complex transport(0.0, 0.0);
  for (int i = 0; i < ctx.op.n; ++i) transport += bt_xi(i) * grad(i);
  return diffusion * uhat - ctx.op.B.trace() * uhat - transport;
}

std::vector<SubellipticTerm> subelliptic_terms(const SymbolContext& ctx) {
  std::vector<SubellipticTerm> terms;
  Eigen::MatrixXd block = ctx.report.sqrtQ;
  for (int k = 0; k <= ctx.report.r; ++k) {
    SubellipticTerm term;
    term.k = k;
    term.theta = 2.0 * ctx.op.s / (1.0 + 2.0 * k * ctx.op.s);
    term.symbol_matrix = block;
    terms.push_back(term);
    block = block * ctx.op.B.transpose();
  }
  return terms;
}

namespace {

double subelliptic_ratio(const SymbolContext& ctx,
                         const std::vector<SubellipticTerm>& terms,
                         const GaussianState& u, const QuadratureOptions& quad) {
  double lhs = 0.0;
  for (const SubellipticTerm& term : terms) {
    auto symbol_sq = [&](const Eigen::VectorXd& xi) {
      const double bracket_sq = 1.0 + (term.symbol_matrix * xi).squaredNorm();
      return std::pow(bracket_sq, term.theta);
    };
    lhs += fourier_weighted_norm(u, symbol_sq, quad);
  }

  // ||P u||: F[Pu](xi) = c(xi) uhat(xi) with the closed-form gradient factor.
  const double trB = ctx.op.B.trace();
  const Eigen::LLT<Eigen::MatrixXd> llt(u.Gam);
  auto p_symbol_sq = [&](const Eigen::VectorXd& xi) {
    const double diffusion =
        0.5 * std::pow((ctx.report.sqrtQ * xi).squaredNorm(), ctx.op.s);
    const Eigen::VectorXd bt_xi = ctx.op.B.transpose() * xi;
    const Eigen::VectorXd solve = llt.solve(xi - u.omega);
    // c = diffusion - TrB - <B^T xi, -i mu - (1/2) Gam^{-1}(xi - omega)>.
    Complex c(diffusion - trB, 0.0);
    for (int i = 0; i < ctx.op.n; ++i) {
      c += bt_xi(i) * Complex(0.5 * solve(i), u.mu(i));
    }
    return std::norm(c);
  };
  const double p_norm = fourier_weighted_norm(u, p_symbol_sq, quad);
  const double u_norm = l2_norm(u);
  return lhs / (p_norm + u_norm);
}

}  // namespace

VerificationReport subelliptic_check(const SymbolContext& ctx, int sample_count,
                                     const VerifierConfig& cfg) {
  if (sample_count < 50) {
    throw InvalidInputError("subelliptic_check needs sample_count >= 50");
  }
  VerificationReport report;
  report.experiment = "subelliptic";
  report.inputs = echo_inputs(ctx, cfg);
  report.tolerance = 2.0;

  const int n = ctx.op.n;
  const std::vector<SubellipticTerm> terms = subelliptic_terms(ctx);

  // Seeded base family: log-uniform Gam spectra, centers in [-2,2]^n,
  // frequency shifts up to |omega| = 16.
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<GaussianState> base_family;
  for (int i = 0; i < sample_count; ++i) {
    GaussianState u;
    u.amplitude = Complex(1.0, 0.0);
    u.mu = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return 4.0 * uni(rng) - 2.0; });
    Eigen::VectorXd dir = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return normal(rng); });
    dir.normalize();
    u.omega = (16.0 * uni(rng)) * dir;
    Eigen::MatrixXd A(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) A(r, c) = normal(rng);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    const Eigen::MatrixXd V = qr.householderQ();
    Eigen::VectorXd eigs = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) {
      return std::exp(std::log(0.25) + uni(rng) * (std::log(4.0) - std::log(0.25)));
    });
    u.Gam = V * eigs.asDiagonal() * V.transpose();
    u.Gam = 0.5 * (u.Gam + u.Gam.transpose());
    base_family.push_back(u);
  }

  // Deterministic high-frequency subfamily.
  std::vector<GaussianState> high_family;
  for (double kappa : {16.0, 24.0, 32.0}) {
    for (int axis = 0; axis < n; ++axis) {
      GaussianState u = GaussianState::standard(n);
      u.omega = Eigen::VectorXd::Zero(n);
      u.omega(axis) = kappa;
      high_family.push_back(u);
    }
    GaussianState diag = GaussianState::standard(n);
    diag.omega = Eigen::VectorXd::Constant(n, kappa / std::sqrt(static_cast<double>(n)));
    high_family.push_back(diag);
  }

  std::vector<double> base_ratios(base_family.size());
  parallel_for(base_family.size(), [&](std::size_t i) {
    base_ratios[i] = subelliptic_ratio(ctx, terms, base_family[i], cfg.quadrature);
  });
  std::vector<double> high_ratios(high_family.size());
  parallel_for(high_family.size(), [&](std::size_t i) {
    high_ratios[i] = subelliptic_ratio(ctx, terms, high_family[i], cfg.quadrature);
  });

  for (std::size_t i = 0; i < base_ratios.size(); ++i) {
    report.series.push_back({"base", static_cast<double>(i), base_ratios[i]});
  }
  for (std::size_t i = 0; i < high_ratios.size(); ++i) {
    report.series.push_back({"high", high_family[i].omega.norm(), high_ratios[i]});
  }
  const double base_max = *std::max_element(base_ratios.begin(), base_ratios.end());
  const double high_max = *std::max_element(high_ratios.begin(), high_ratios.end());
  report.fitted["base_max"] = base_max;
  report.fitted["high_max"] = high_max;
  report.pass = high_max <= 2.0 * base_max;
  return report;
}

VerificationReport kolmogorov_suite(double s, const std::vector<double>& t_grid,
                                    const VerifierConfig& cfg) {
  SymbolContext ctx = make_context(kolmogorov_operator(s));
  ctx.seed = cfg.seed;

  VerificationReport report;
  report.experiment = "kolmogorov";
  report.inputs = echo_inputs(ctx, cfg);
  report.tolerance = cfg.slope_tol;

  std::vector<double> small_t, long_t;
  for (double t : t_grid) {
    if (t <= cfg.t_fit_max) small_t.push_back(t);
    if (t >= 1.0) long_t.push_back(t);
  }
  if (small_t.size() < 3 || long_t.size() < 3) {
    throw InvalidInputError(
        "kolmogorov_suite needs a grid spanning small t and t in [1,10]");
  }

  const Eigen::VectorXd x_dir = Eigen::Vector2d(1.0, 0.0);
  const Eigen::VectorXd v_dir = Eigen::Vector2d(0.0, 1.0);

  struct Case {
    const char* label;
    Eigen::VectorXd dir;
    const std::vector<double>* grid;
  };
  const std::array<Case, 4> cases = {
      Case{"x_small", x_dir, &small_t}, Case{"v_small", v_dir, &small_t},
      Case{"x_long", x_dir, &long_t}, Case{"v_long", v_dir, &long_t}};

  bool all_pass = true;
  for (const Case& c : cases) {
    const ExponentFit fit = fit_blowup_exponent(ctx, {c.dir}, *c.grid, cfg);
    report.fitted[std::string(c.label) + "_slope"] = fit.slope;
    report.fitted[std::string(c.label) + "_predicted"] = fit.predicted_slope;
    report.fitted[std::string(c.label) + "_r2"] = fit.r_squared;
    all_pass = all_pass && fit.pass;
    for (std::size_t i = 0; i < c.grid->size(); ++i) {
      report.series.push_back({c.label, (*c.grid)[i], fit.log_values[i]});
    }
  }
  report.pass = all_pass;
  return report;
}

VerificationReport appendix_suite(const SymbolContext& ctx,
                                  const std::vector<double>& t_grid,
                                  const VerifierConfig& cfg) {
  if (t_grid.size() < 4) throw InvalidInputError("appendix needs >= 4 t points");
  VerificationReport report;
  report.experiment = "appendix";
  report.inputs = echo_inputs(ctx, cfg);
  report.tolerance = cfg.plateau_slope_tol;

  std::vector<double> ratios(t_grid.size()), ms(t_grid.size());
  parallel_for(t_grid.size(), [&](std::size_t i) {
    ratios[i] = lower_bound_ratio(ctx, t_grid[i]);
    ms[i] = m_t(ctx, t_grid[i]);
  });
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    report.series.push_back({"lower_bound_ratio", t_grid[i], ratios[i]});
    report.series.push_back({"M_t", t_grid[i], ms[i]});
  }

  const double ratio_min = *std::min_element(ratios.begin(), ratios.end());
  const double m_max_val = *std::max_element(ms.begin(), ms.end());
  report.fitted["c0"] = ratio_min;
  report.fitted["c"] = m_max_val;

  // Small-t trend on the lower half of the grid: a power-law decay of the
  // ratio towards zero (positive log-log slope) fails the bound; M_t must
  // plateau.
  const std::size_t half = t_grid.size() / 2;
  std::vector<double> log_t(half), log_ratio(half), log_m(half);
  for (std::size_t i = 0; i < half; ++i) {
    log_t[i] = std::log(t_grid[i]);
    log_ratio[i] = std::log(std::max(ratios[i], 1e-300));
    log_m[i] = std::log(std::max(ms[i], 1e-300));
  }
  const double ratio_slope = linear_fit(log_t, log_ratio).slope;
  const double m_slope = linear_fit(log_t, log_m).slope;
  report.fitted["ratio_small_t_slope"] = ratio_slope;
  report.fitted["m_t_small_t_slope"] = m_slope;

  report.pass = ratio_min > 1e-12 && std::isfinite(m_max_val) &&
                ratio_slope <= cfg.plateau_slope_tol &&
                std::abs(m_slope) <= cfg.plateau_slope_tol;
  return report;
}

}  // namespace fouk
