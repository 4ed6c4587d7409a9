#include "fouk/semigroup.hpp"

#include <cmath>
#include <limits>

#include "fouk/errors.hpp"
#include "fouk/quadrature.hpp"

namespace fouk {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

EvolvedFourierState::EvolvedFourierState(const SymbolContext& ctx,
                                         GaussianState base, double t)
    : base_(std::move(base)), t_(t) {
  if (t < 0.0) throw InvalidInputError("evolve requires t >= 0");
  base_.validate();
  trB_factor_ = std::exp(ctx.op.B.trace() * t);
  exp_tBt_ = matrix_exp(ctx.op.B.transpose(), t);
  if (t > 0.0) table_ = symbol_table(ctx, t);
}

Complex EvolvedFourierState::operator()(const Eigen::VectorXd& xi) const {
  if (t_ == 0.0) return fourier_gaussian(base_, xi);
  const double decay = std::exp(-t_ * table_->a(xi));
  return decay * trB_factor_ * fourier_gaussian(base_, exp_tBt_ * xi);
}

EvolvedFourierState evolve(const SymbolContext& ctx, const GaussianState& u,
                           double t) {
  return EvolvedFourierState(ctx, u, t);
}

double MultiplierNorm::value() const {
  if (unbounded) return std::numeric_limits<double>::infinity();
  return std::exp(log_value);
}

MultiplierNorm operator_norm(const SymbolContext& ctx, double t,
                             const std::vector<Eigen::VectorXd>& directions) {
  if (!(t > 0.0)) throw InvalidInputError("operator_norm requires t > 0");
  MultiplierNorm result;
  if (directions.empty()) return result;  // norm of e^{-t a_t^w} is 1

  double log_product_scale = 0.0;
  for (const Eigen::VectorXd& xi : directions) {
    const double norm = xi.norm();
    if (norm == 0.0) {
      result.log_value = kNegInf;
      return result;
    }
    if (ctx.report.project_S(xi).norm() > 1e-8 * norm) {
      result.unbounded = true;  // Theorem dichotomy: not a smoothing direction
      return result;
    }
    log_product_scale += std::log(norm);
  }

  const double s = ctx.op.s;
  const double m = static_cast<double>(directions.size());
  const Eigen::MatrixXd basis = ctx.report.s_perp_basis();
  const auto table = symbol_table(ctx, t);

  // log of the radial maximum at unit sigma.
  auto radial_log = [&](const Eigen::VectorXd& sigma) {
    double log_dirs = 0.0;
    for (const Eigen::VectorXd& xi : directions) {
      const double inner = std::abs(xi.normalized().dot(sigma));
      if (inner == 0.0) return kNegInf;
      log_dirs += std::log(inner);
    }
    // a_t > 0 on the S^perp sphere; the floor only guards underflow.
    const double a = std::max(table->a(sigma), 1e-300);
    return log_dirs +
           (m / (2.0 * s)) * (std::log(m / (2.0 * s * t * a)) - 1.0);
  };

  const SphereExtremum best =
      maximize_on_sphere(radial_log, basis, ctx.sphere_options());
  result.log_value = best.value + log_product_scale;
  return result;
}

namespace {

struct EnvelopeNodes {
  // Integration nodes xi = center + axes * y over GH points y, with the
  // combined jacobian; residual integrands are evaluated with the Gaussian
  // envelope divided out.
  Eigen::VectorXd center;
  Eigen::MatrixXd axes;
  double log_jacobian = 0.0;
};

EnvelopeNodes envelope_frame(const GaussianState& u) {
  // |uhat(xi)|^2 = P^2 e^{-(1/2) <Gam^{-1} d, d>}, d = xi - omega.
  const int n = u.n();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(u.Gam);
  EnvelopeNodes frame;
  frame.center = u.omega;
  // Gam^{-1} = V diag(1/lambda) V^T; substitution d = V diag(sqrt(2 lambda)) y
  // turns the envelope into e^{-|y|^2}.
  Eigen::VectorXd scale(n);
  for (int i = 0; i < n; ++i) {
    const double lambda = es.eigenvalues()(i);
    if (lambda <= 0.0) throw NotPsdError("envelope_frame: Gam not PD");
    scale(i) = std::sqrt(2.0 * lambda);
    frame.log_jacobian += std::log(scale(i));
  }
  frame.axes = es.eigenvectors() * scale.asDiagonal();
  return frame;
}

// log(P^2) for |uhat|^2 = P^2 * envelope.
double log_envelope_prefactor_sq(const GaussianState& u) {
  const Eigen::LLT<Eigen::MatrixXd> llt(u.Gam);
  double log_det = 0.0;
  for (int i = 0; i < u.n(); ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
  return 2.0 * std::log(std::abs(u.amplitude)) + u.n() * std::log(M_PI) -
         log_det;
}

double tensor_gh_integral(const EnvelopeNodes& frame,
                          const std::function<double(const Eigen::VectorXd&)>& residual,
                          int order) {
  const int n = static_cast<int>(frame.center.size());
  const QuadratureRule& rule = gauss_hermite(order);
  std::vector<int> idx(n, 0);
  double total = 0.0;
  Eigen::VectorXd y(n);
  while (true) {
    double w = 1.0;
    for (int d = 0; d < n; ++d) {
      y(d) = rule.nodes(idx[d]);
      w *= rule.weights(idx[d]);
    }
    total += w * residual(frame.center + frame.axes * y);
    int d = 0;
    for (; d < n; ++d) {
      if (++idx[d] < order) break;
      idx[d] = 0;
    }
    if (d == n) break;
  }
  return total * std::exp(frame.log_jacobian);
}

int default_max_order(int n) {
  switch (n) {
    case 1: return 512;
    case 2: return 256;
    case 3: return 96;
    default: return 48;
  }
}

double adaptive_fourier_integral(const GaussianState& u,
                                 const std::function<double(const Eigen::VectorXd&)>& residual,
                                 const QuadratureOptions& options) {
  const int n = u.n();
  if (n > 4) {
    throw InvalidInputError("fourier quadrature supports n <= 4");
  }
  const EnvelopeNodes frame = envelope_frame(u);
  const int max_order =
      options.max_axis_order > 0 ? options.max_axis_order : default_max_order(n);
  int order = std::min(24, max_order);
  double prev = tensor_gh_integral(frame, residual, order);
  while (true) {
    const int next_order = std::min(max_order, order + order / 2 + order % 2);
    if (next_order <= order) break;
    const double next = tensor_gh_integral(frame, residual, next_order);
    const double scale = std::max({std::abs(next), std::abs(prev), 1e-300});
    if (std::abs(next - prev) <= options.rel_target * scale) return next;
    prev = next;
    order = next_order;
  }
  throw QuadratureNotConvergedError(
      "fourier quadrature self-check failed at maximum order");
}

double weighted_norm_impl(const GaussianState& state,
                          const std::function<double(const Eigen::VectorXd&)>& symbol_sq,
                          const QuadratureOptions& options) {
  const int n = state.n();
  const double log_pref = log_envelope_prefactor_sq(state);
  auto residual = [&](const Eigen::VectorXd& xi) { return symbol_sq(xi); };
  const double integral = adaptive_fourier_integral(state, residual, options);
  if (integral < 0.0) return 0.0;
  return std::sqrt(integral) *
         std::exp(0.5 * (log_pref - n * std::log(2.0 * M_PI)));
}

}  // namespace

double fourier_weighted_norm(const GaussianState& u,
                             const std::function<double(const Eigen::VectorXd&)>& symbol_sq,
                             const QuadratureOptions& options) {
  u.validate();
  return weighted_norm_impl(u, symbol_sq, options);
}

namespace {

double directional_symbol_sq(const std::vector<Eigen::VectorXd>& directions,
                             const Eigen::VectorXd& xi) {
  double prod = 1.0;
  for (const Eigen::VectorXd& dir : directions) {
    const double inner = dir.dot(xi);
    prod *= inner * inner;
  }
  return prod;
}

double seminorm_impl(const SymbolContext& ctx, const GaussianState& state,
                     double t, const std::vector<Eigen::VectorXd>& directions,
                     const QuadratureOptions& options) {
  const auto table = symbol_table(ctx, t);
  auto symbol_sq = [&](const Eigen::VectorXd& xi) {
    return directional_symbol_sq(directions, xi) *
           std::exp(-2.0 * t * table->a(xi));
  };
  return fourier_weighted_norm(state, symbol_sq, options);
}

}  // namespace

double seminorm(const SymbolContext& ctx, const GaussianState& u, double t,
                const std::vector<Eigen::VectorXd>& directions,
                const QuadratureOptions& options) {
  if (!(t > 0.0)) throw InvalidInputError("seminorm requires t > 0");
  if (directions.empty()) throw InvalidInputError("seminorm needs directions");
  // uhat_t = e^{-t a_t} * FT(u o e^{-tB}); apply the drift flow exactly.
  const GaussianState transported = transport_apply(u, ctx.op.B, t);
  return seminorm_impl(ctx, transported, t, directions, options);
}

double multiplier_seminorm(const SymbolContext& ctx, const GaussianState& u,
                           double t,
                           const std::vector<Eigen::VectorXd>& directions,
                           const QuadratureOptions& options) {
  if (!(t > 0.0)) throw InvalidInputError("multiplier_seminorm requires t > 0");
  return seminorm_impl(ctx, u, t, directions, options);
}

double plancherel_norm(const GaussianState& u, const QuadratureOptions& options) {
  return fourier_weighted_norm(u, [](const Eigen::VectorXd&) { return 1.0; },
                               options);
}

}  // namespace fouk
