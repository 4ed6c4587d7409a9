#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "fouk/errors.hpp"
#include "fouk/grid.hpp"
#include "fouk/report_io.hpp"
#include "fouk/verifier.hpp"

using namespace fouk;

namespace {

OUOperator diag_degenerate() {
  // Q = diag(1, 0), B = 0: S = span(e2).
  OUOperator op;
  op.n = 2;
  op.s = 1.0;
  op.B = Eigen::MatrixXd::Zero(2, 2);
  op.Q = Eigen::MatrixXd::Zero(2, 2);
  op.Q(0, 0) = 1.0;
  return op;
}

}  // namespace

TEST_CASE("linear_fit recovers an exact line") {
  std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
  std::vector<double> y = {0.5, 2.5, 4.5, 6.5};
  LinearFit fit = linear_fit(x, y);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(fit.intercept == doctest::Approx(-1.5).epsilon(1e-13));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("blow-up fit recovers -1/(2s) for the fractional laplacian") {
  for (double s : {0.5, 1.0, 1.5}) {
    SymbolContext ctx = make_context(fractional_heat_operator(1, s));
    const auto grid = log_spaced(1e-3, 0.1, 20);
    ExponentFit fit =
        fit_blowup_exponent(ctx, {Eigen::VectorXd::Constant(1, 1.0)}, grid);
    CHECK(fit.pass);
    CHECK(fit.slope == doctest::Approx(-1.0 / (2.0 * s)).epsilon(1e-3));
    CHECK(fit.r_squared >= 0.999999);
  }
}

TEST_CASE("blow-up fit matches the kolmogorov indices") {
  SymbolContext ctx = make_context(kolmogorov_operator(1.0));
  const auto grid = log_spaced(1e-3, 0.1, 20);

  ExponentFit fx = fit_blowup_exponent(ctx, {Eigen::Vector2d(1.0, 0.0)}, grid);
  CHECK(fx.predicted_slope == doctest::Approx(-1.5));
  CHECK(fx.pass);
  CHECK(fx.slope == doctest::Approx(-1.5).epsilon(0.02));

  ExponentFit fv = fit_blowup_exponent(ctx, {Eigen::Vector2d(0.0, 1.0)}, grid);
  CHECK(fv.predicted_slope == doctest::Approx(-0.5));
  CHECK(fv.pass);
  CHECK(fv.slope == doctest::Approx(-0.5).epsilon(0.02));

  // Permuting directions leaves the fit unchanged.
  std::vector<Eigen::VectorXd> pair = {Eigen::Vector2d(1.0, 0.0),
                                       Eigen::Vector2d(0.0, 1.0)};
  std::vector<Eigen::VectorXd> swapped = {pair[1], pair[0]};
  ExponentFit fab = fit_blowup_exponent(ctx, pair, grid);
  ExponentFit fba = fit_blowup_exponent(ctx, swapped, grid);
  CHECK(fab.slope == doctest::Approx(fba.slope).epsilon(1e-12));
  CHECK(fab.predicted_slope == fba.predicted_slope);

  // Corollary-level window constant: sup over the window of
  // norm * t^{k + 1/(2s)} stays finite (monotone-free check: max/min modest).
  double lo = 1e300, hi = 0.0;
  for (double t : grid) {
    const MultiplierNorm norm = operator_norm(ctx, t, {Eigen::Vector2d(1.0, 0.0)});
    const double scaled = std::exp(norm.log_value + 1.5 * std::log(t));
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  CHECK(hi / lo < 1.5);
}

TEST_CASE("blow-up fit propagates the unbounded flag") {
  SymbolContext ctx = make_context(diag_degenerate());
  const auto grid = log_spaced(1e-3, 0.1, 10);
  ExponentFit fit = fit_blowup_exponent(ctx, {Eigen::Vector2d(0.0, 1.0)}, grid);
  CHECK(fit.unbounded_hit);
  CHECK_FALSE(fit.pass);
}

TEST_CASE("gevrey ratio sequence matches the closed form for the heat preset") {
  // g_m = (m/(2se))^{m/(2s)} for the e^{-t|xi|^{2s}} multiplier, so
  // h_m = (m/(2se))^{1/(2s)} m!^{-1/(2sm)}.
  for (double s : {0.5, 1.0}) {
    SymbolContext ctx = make_context(fractional_heat_operator(2, s));
    VerificationReport rep =
        gevrey_growth(ctx, {Eigen::Vector2d(1.0, 0.0)}, 10, 0.05);
    REQUIRE(rep.series.size() == 9);
    for (const SeriesRow& row : rep.series) {
      const double m = row.parameter;
      const double expected =
          std::pow(m / (2.0 * s * M_E), 1.0 / (2.0 * s)) *
          std::exp(-std::lgamma(m + 1.0) / (2.0 * s * m));
      CHECK(row.value == doctest::Approx(expected).epsilon(1e-8));
      // Bounded by the limit value (2s)^{-1/(2s)}.
      CHECK(row.value <= std::pow(2.0 * s, -1.0 / (2.0 * s)) * (1.0 + 1e-9));
    }
    // The exact sequence rises towards its limit by more than 10% over
    // m = 2..10, so the spec-default trend gate reads as a fail here.
    CHECK(rep.fitted.at("trend_ratio") ==
          doctest::Approx(s == 0.5 ? 1.3348 : 1.1567).epsilon(1e-3));
  }
}

TEST_CASE("gevrey growth for the kolmogorov v-family vs doubled resolution") {
  SymbolContext ctx = make_context(kolmogorov_operator(0.5));
  SymbolContext fine = make_context(kolmogorov_operator(0.5));
  fine.sphere_grid_points = 2 * ctx.sphere_grid_points;
  fine.opt_samples = 2 * ctx.opt_samples;

  VerificationReport coarse =
      gevrey_growth(ctx, {Eigen::Vector2d(0.0, 1.0)}, 8, 0.05);
  VerificationReport refined =
      gevrey_growth(fine, {Eigen::Vector2d(0.0, 1.0)}, 8, 0.05);
  REQUIRE(coarse.series.size() == refined.series.size());
  for (std::size_t i = 0; i < coarse.series.size(); ++i) {
    CHECK(coarse.series[i].value ==
          doctest::Approx(refined.series[i].value).epsilon(1e-6));
    CHECK(std::isfinite(coarse.series[i].value));
  }
  // Bounded ratio: the whole sequence stays under its fitted constant.
  const double c = coarse.fitted.at("c");
  for (const SeriesRow& row : coarse.series) CHECK(row.value <= c * (1 + 1e-12));
}

TEST_CASE("gevrey rejects directions outside S^perp") {
  SymbolContext ctx = make_context(diag_degenerate());
  CHECK_THROWS_AS(gevrey_growth(ctx, {Eigen::Vector2d(0.0, 1.0)}, 6, 0.05),
                  NotInSPerpError);
}

TEST_CASE("non-smoothing witness grows linearly in lambda") {
  SymbolContext ctx = make_context(diag_degenerate());
  std::vector<double> lambdas;
  for (int i = 1; i <= 8; ++i) lambdas.push_back(2.0 * i);
  VerificationReport rep =
      non_smoothing_witness(ctx, Eigen::Vector2d(0.0, 1.0), 1.0, lambdas);
  CHECK(rep.pass);
  CHECK(rep.fitted.at("slope") > 0.0);
  CHECK(rep.fitted.at("r_squared") >= 0.99);
  // Slope approaches |xi_S|^2 ||e^{-t a_t^w} u_0||.
  CHECK(rep.fitted.at("slope") ==
        doctest::Approx(rep.fitted.at("predicted_slope")).epsilon(0.05));

  // Refining the grid moves the slope by less than 1%.
  std::vector<double> denser;
  for (int i = 1; i <= 16; ++i) denser.push_back(1.0 * i);
  VerificationReport fine =
      non_smoothing_witness(ctx, Eigen::Vector2d(0.0, 1.0), 1.0, denser);
  CHECK(std::abs(fine.fitted.at("slope") - rep.fitted.at("slope")) <
        0.01 * rep.fitted.at("slope"));
}

TEST_CASE("witness preconditions") {
  SymbolContext ctx = make_context(diag_degenerate());
  std::vector<double> lambdas = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(
      non_smoothing_witness(ctx, Eigen::Vector2d(1.0, 0.0), 1.0, lambdas),
      NotAWitnessError);

  // Kalman case: S = {0}, every direction triggers the error.
  SymbolContext kol = make_context(kolmogorov_operator(1.0));
  for (const Eigen::Vector2d dir :
       {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0),
        Eigen::Vector2d(0.6, -0.8)}) {
    CHECK_THROWS_AS(non_smoothing_witness(kol, dir, 1.0, lambdas),
                    NotAWitnessError);
  }
}

TEST_CASE("apply_P_fourier without drift is the diffusion symbol") {
  OUOperator op = diag_degenerate();
  op.s = 0.7;
  SymbolContext ctx = make_context(op);
  GaussianState u = GaussianState::standard(2);
  u.omega = Eigen::Vector2d(0.4, -1.0);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    Eigen::Vector2d xi(std::normal_distribution<double>()(rng),
                       std::normal_distribution<double>()(rng));
    const Complex expected =
        0.5 * std::pow((ctx.report.sqrtQ * xi).squaredNorm(), op.s) *
        fourier_gaussian(u, xi);
    CHECK(std::abs(apply_P_fourier(ctx, u, xi) - expected) <=
          1e-13 * (1.0 + std::abs(expected)));
  }
}

TEST_CASE("apply_P_fourier is linear in the amplitude") {
  SymbolContext ctx = make_context(kolmogorov_operator(1.0));
  GaussianState u = GaussianState::standard(2);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const Complex scale(std::normal_distribution<double>()(rng),
                        std::normal_distribution<double>()(rng));
    GaussianState v = u;
    v.amplitude = u.amplitude * scale;
    Eigen::Vector2d xi(std::normal_distribution<double>()(rng),
                       std::normal_distribution<double>()(rng));
    const Complex lhs = apply_P_fourier(ctx, v, xi);
    const Complex rhs = scale * apply_P_fourier(ctx, u, xi);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("apply_P_fourier vs a finite-difference grid oracle") {
  // Kolmogorov s = 1 on the standard gaussian: P u = -Laplacian_v u + v d_x u
  // sampled with 4th-order centered stencils, then transformed by direct DFT.
  SymbolContext ctx = make_context(kolmogorov_operator(1.0));
  GaussianState u = GaussianState::standard(2);

  const int N = 512;
  const double L = 8.0, h = 2.0 * L / N;
  // values[i1][i2] = u(x_{i1}, v_{i2}).
  std::vector<std::vector<Complex>> vals(N, std::vector<Complex>(N));
  for (int i1 = 0; i1 < N; ++i1) {
    for (int i2 = 0; i2 < N; ++i2) {
      Eigen::Vector2d p(-L + h * i1, -L + h * i2);
      vals[i1][i2] = evaluate(u, p);
    }
  }
  auto at = [&](int i, int j) {
    return vals[(i + N) % N][(j + N) % N];  // periodic wrap; u decays anyway
  };
  std::vector<std::vector<Complex>> Pu(N, std::vector<Complex>(N));
  for (int i1 = 0; i1 < N; ++i1) {
    const double v = -L + h * i1 * 0.0;  // placeholder, rewritten below
    (void)v;
    for (int i2 = 0; i2 < N; ++i2) {
      const double vcoord = -L + h * i2;
      const Complex lap_v = (-at(i1, i2 + 2) + 16.0 * at(i1, i2 + 1) -
                             30.0 * at(i1, i2) + 16.0 * at(i1, i2 - 1) -
                             at(i1, i2 - 2)) /
                            (12.0 * h * h);
      const Complex dx = (-at(i1 + 2, i2) + 8.0 * at(i1 + 1, i2) -
                          8.0 * at(i1 - 1, i2) + at(i1 - 2, i2)) /
                         (12.0 * h);
      Pu[i1][i2] = -lap_v + vcoord * dx;
    }
  }

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Vector2d xi(std::normal_distribution<double>(0.0, 1.2)(rng),
                       std::normal_distribution<double>(0.0, 1.2)(rng));
    Complex acc(0.0, 0.0);
    for (int i1 = 0; i1 < N; ++i1) {
      const double x = -L + h * i1;
      const Complex ex = std::exp(Complex(0.0, -xi(0) * x));
      Complex inner(0.0, 0.0);
      for (int i2 = 0; i2 < N; ++i2) {
        const double vc = -L + h * i2;
        inner += Pu[i1][i2] * std::exp(Complex(0.0, -xi(1) * vc));
      }
      acc += ex * inner;
    }
    acc *= h * h;
    const Complex exact = apply_P_fourier(ctx, u, xi);
    CHECK(std::abs(acc - exact) < 1e-4 * (1.0 + std::abs(exact)));
  }
}

TEST_CASE("subelliptic ratios bounded for the pure multiplier case") {
  OUOperator op;
  op.n = 2;
  op.s = 1.0;
  op.B = Eigen::MatrixXd::Zero(2, 2);
  op.Q = Eigen::MatrixXd::Identity(2, 2);
  SymbolContext ctx = make_context(op);
  VerificationReport rep = subelliptic_check(ctx, 50);
  CHECK(rep.pass);
  // Closed-form symbol bound: <xi>^{2s} <= c (|xi|^{2s}/2 + 1) with c = 2.
  for (const SeriesRow& row : rep.series) {
    CHECK(row.value <= 2.0 + 1e-9);
  }
}

TEST_CASE("subelliptic kolmogorov family stays controlled") {
  SymbolContext ctx = make_context(kolmogorov_operator(1.0));
  VerificationReport rep = subelliptic_check(ctx, 100);
  CHECK(rep.pass);
  CHECK(rep.fitted.at("high_max") <= 2.0 * rep.fitted.at("base_max"));
  CHECK(rep.fitted.at("base_max") < 10.0);
}

TEST_CASE("subelliptic scaling family trend and doubled-quadrature oracle") {
  SymbolContext ctx = make_context(kolmogorov_operator(1.0));
  const auto terms = subelliptic_terms(ctx);
  REQUIRE(terms.size() == 2);
  CHECK(terms[0].theta == doctest::Approx(2.0));
  CHECK(terms[1].theta == doctest::Approx(2.0 / 3.0));

  // u(kappa x) spreads uhat over scale kappa while the bracket symbols keep
  // their O(1) curvature near the origin, so the nodes matched to the
  // envelope converge slowly; 5e-4 at axis order <= 512 is attainable up to
  // kappa = 8 (trend recorded, no pass gate on this family).
  QuadratureOptions wide;
  wide.rel_target = 5e-4;
  wide.max_axis_order = 512;
  double prev_lhs = 0.0;
  for (double kappa : {1.0, 2.0, 4.0, 8.0}) {
    GaussianState u = GaussianState::standard(2);
    u.Gam *= kappa * kappa;  // u(kappa x)
    double lhs = 0.0;
    for (const auto& term : terms) {
      auto symbol_sq = [&](const Eigen::VectorXd& xi) {
        return std::pow(1.0 + (term.symbol_matrix * xi).squaredNorm(), term.theta);
      };
      const double value = fourier_weighted_norm(u, symbol_sq, wide);
      lhs += value;
      // Doubled-order oracle agreement at the achievable accuracy.
      QuadratureOptions doubled = wide;
      doubled.max_axis_order = 512;
      doubled.rel_target = 1e-4;
      const double oracle = fourier_weighted_norm(u, symbol_sq, doubled);
      CHECK(value == doctest::Approx(oracle).epsilon(2e-3));
    }
    CHECK(std::isfinite(lhs));
    CHECK(lhs > prev_lhs);  // the ratio data grows with kappa; record the trend
    prev_lhs = lhs;
  }
}

TEST_CASE("kolmogorov suite slopes for s = 1 and s = 1/2") {
  auto grid = log_spaced(1e-3, 10.0, 36);
  {
    VerificationReport rep = kolmogorov_suite(1.0, grid);
    CHECK(rep.pass);
    CHECK(rep.fitted.at("x_small_slope") == doctest::Approx(-1.5).epsilon(0.02));
    CHECK(rep.fitted.at("v_small_slope") == doctest::Approx(-0.5).epsilon(0.02));
    CHECK(rep.fitted.at("x_long_slope") == doctest::Approx(-1.5).epsilon(0.02));
    CHECK(rep.fitted.at("v_long_slope") == doctest::Approx(-0.5).epsilon(0.02));
  }
  {
    VerificationReport rep = kolmogorov_suite(0.5, grid);
    CHECK(rep.pass);
    CHECK(rep.fitted.at("x_small_slope") == doctest::Approx(-2.0).epsilon(0.02));
    CHECK(rep.fitted.at("v_small_slope") == doctest::Approx(-1.0).epsilon(0.02));
  }
}

TEST_CASE("appendix suite passes on trivial, nilpotent and random kalman cases") {
  // B = 0, Q != 0: ratio identically 1, M_t constant.
  OUOperator plain;
  plain.n = 2;
  plain.s = 1.0;
  plain.B = Eigen::MatrixXd::Zero(2, 2);
  plain.Q = Eigen::MatrixXd::Identity(2, 2);
  SymbolContext pctx = make_context(plain);
  VerificationReport triv = appendix_suite(pctx, log_spaced(1e-3, 0.5, 12));
  CHECK(triv.pass);
  CHECK(triv.fitted.at("c0") == doctest::Approx(1.0).epsilon(1e-9));

  SymbolContext kol = make_context(kolmogorov_operator(0.5));
  VerificationReport nil = appendix_suite(kol, log_spaced(1e-3, 10.0, 20));
  CHECK(nil.pass);

  std::mt19937_64 rng(2718);
  OUOperator rnd;
  rnd.n = 3;
  rnd.s = 1.0;
  rnd.B.resize(3, 3);
  Eigen::MatrixXd A(3, 3);
  for (int i = 0; i < 9; ++i) {
    rnd.B(i / 3, i % 3) = std::normal_distribution<double>()(rng);
    A(i / 3, i % 3) = std::normal_distribution<double>()(rng);
  }
  rnd.Q = A.transpose() * A;
  SymbolContext rctx = make_context(rnd);
  REQUIRE(rctx.report.dim_S() == 0);
  VerificationReport gen = appendix_suite(rctx, log_spaced(1e-3, 0.5, 16));
  CHECK(gen.pass);
  CHECK(gen.fitted.at("c0") > 0.0);
  CHECK(std::isfinite(gen.fitted.at("c")));

  // Degenerate case propagates.
  OUOperator zero = plain;
  zero.Q.setZero();
  SymbolContext zctx = make_context(zero);
  CHECK_THROWS_AS(appendix_suite(zctx, log_spaced(0.01, 0.5, 8)),
                  DegenerateOperatorError);
}

TEST_CASE("reports are deterministic and CSV round-trips") {
  SymbolContext ctx = make_context(kolmogorov_operator(1.0));
  VerificationReport a = subelliptic_check(ctx, 50);
  VerificationReport b = subelliptic_check(ctx, 50);
  CHECK(report_to_json(a, false) == report_to_json(b, false));

  const std::string csv = report_to_csv(a);
  VerificationReport back = report_from_csv(csv);
  CHECK(back.experiment == a.experiment);
  CHECK(back.pass == a.pass);
  CHECK(back.tolerance == a.tolerance);
  REQUIRE(back.series.size() == a.series.size());
  for (std::size_t i = 0; i < a.series.size(); ++i) {
    CHECK(back.series[i].label == a.series[i].label);
    CHECK(back.series[i].parameter == a.series[i].parameter);
    CHECK(back.series[i].value == a.series[i].value);
  }
  for (const auto& [key, value] : a.fitted) {
    CHECK(back.fitted.at(key) == value);
  }
}
