#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "fouk/gaussian.hpp"
#include "fouk/semigroup.hpp"
#include "fouk/symbol.hpp"

namespace fouk {

/// Pass thresholds and grids. Fixed defaults, overridable from the CLI.
struct VerifierConfig {
  double t_min = 1e-3;
  double t_fit_max = 0.1;       // T_fit: the theorems are short-time statements
  int t_points = 20;
  double slope_tol = 0.05;
  double r2_min = 0.999;
  double trend_ratio_max = 1.1;  // gevrey last-third vs first-third means
  double witness_r2_min = 0.99;
  double plateau_slope_tol = 0.1;
  int m_max = 10;
  double gevrey_t = 0.05;
  int sample_count = 100;
  std::uint64_t seed = 0x5eed5eedULL;
  QuadratureOptions quadrature;
};

/// Least-squares fit of log(value) against log(t) for a directional
/// derivative norm, with the predicted short-time exponent
/// -(k_{xi_1} + … + k_{xi_m} + m/(2s)).
struct ExponentFit {
  std::vector<Eigen::VectorXd> directions;
  std::vector<double> t_grid;
  std::vector<double> log_values;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double predicted_slope = 0.0;
  bool unbounded_hit = false;
  bool pass = false;
};

struct SeriesRow {
  std::string label;
  double parameter = 0.0;
  double value = 0.0;
};

struct VerificationReport {
  std::string experiment;
  std::string inputs;  // JSON echo of operator and knobs
  std::vector<SeriesRow> series;
  std::map<std::string, double> fitted;
  double tolerance = 0.0;
  bool pass = false;
};

/// Fractional-derivative term of the subelliptic estimate:
/// symbol <sqrtQ (B^T)^k xi>^{theta_k}, theta_k = 2s/(1+2ks).
struct SubellipticTerm {
  int k = 0;
  double theta = 0.0;
  Eigen::MatrixXd symbol_matrix;
};

std::vector<SubellipticTerm> subelliptic_terms(const SymbolContext& ctx);

/// Slope of log(operator_norm(t, dirs) * e^{Tr(B) t / 2}) vs log t.
/// Pass iff |slope - predicted| <= slope_tol and r^2 >= r2_min.
ExponentFit fit_blowup_exponent(const SymbolContext& ctx,
                                const std::vector<Eigen::VectorXd>& directions,
                                const std::vector<double>& t_grid,
                                const VerifierConfig& cfg = {});

/// g_m = operator_norm(t, m directions cycled from the family) * t^{sum k + m/(2s)};
/// checks that h_m = (g_m / m!^{1/(2s)})^{1/m} stays bounded with no upward
/// trend (last-third mean <= trend_ratio_max * first-third mean).
VerificationReport gevrey_growth(const SymbolContext& ctx,
                                 const std::vector<Eigen::VectorXd>& direction_family,
                                 int m_max, double t,
                                 const VerifierConfig& cfg = {});

/// Unboundedness witness for a direction with a nonzero S-component:
/// N(lambda) = ||<xi0, grad> e^{-t a_t^w} u_lambda|| with
/// u_lambda = e^{i lambda <xi_{0,S}, x>} e^{-|x|^2} grows linearly in lambda.
VerificationReport non_smoothing_witness(const SymbolContext& ctx,
                                         const Eigen::VectorXd& xi0, double t,
                                         const std::vector<double>& lambda_grid,
                                         const VerifierConfig& cfg = {});

/// Fourier-side action of P on a Gaussian state:
/// F[Pu](xi) = (1/2)|sqrtQ xi|^{2s} uhat - Tr(B) uhat - <B^T xi, grad uhat>.
Complex apply_P_fourier(const SymbolContext& ctx, const GaussianState& u,
                        const Eigen::VectorXd& xi);

/// sum_k ||<sqrtQ(B^T)^k D>^{theta_k} u|| <= c (||Pu|| + ||u||) over seeded
/// random Gaussian states plus a deterministic high-frequency subfamily;
/// pass iff the high-frequency ratio max stays within 2x the base max.
VerificationReport subelliptic_check(const SymbolContext& ctx, int sample_count,
                                     const VerifierConfig& cfg = {});

/// Kolmogorov fixture: x/v-direction blow-up fits on the short-time window
/// and persistence of the same power law on t in [1, 10] (nilpotent drift).
VerificationReport kolmogorov_suite(double s, const std::vector<double>& t_grid,
                                    const VerifierConfig& cfg = {});

/// Tabulates lower_bound_ratio and M_t over the grid; pass iff the ratio stays
/// bounded away from zero (no decay trend) and M_t plateaus for small t.
VerificationReport appendix_suite(const SymbolContext& ctx,
                                  const std::vector<double>& t_grid,
                                  const VerifierConfig& cfg = {});

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fouk
