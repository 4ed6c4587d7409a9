#include "fouk/symbol.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "fouk/errors.hpp"
#include "fouk/quadrature.hpp"

namespace fouk {

class SymbolTableCache {
 public:
  std::shared_ptr<const SymbolTable> get(const SymbolContext& ctx, double t) {
    const std::pair<double, int> key{t, ctx.quad_order};
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = tables_.find(key);
    if (it == tables_.end()) {
      it = tables_.emplace(key, std::make_shared<const SymbolTable>(ctx, t)).first;
    }
    return it->second;
  }

 private:
  std::map<std::pair<double, int>, std::shared_ptr<const SymbolTable>> tables_;
  std::mutex mutex_;
};

SphereOptions SymbolContext::sphere_options() const {
  SphereOptions opts;
  opts.grid_points = sphere_grid_points;
  opts.starts = opt_samples;
  opts.seed = seed;
  return opts;
}

SymbolContext make_context(const OUOperator& op, int quad_order, int opt_samples,
                           double tol) {
  if (quad_order < 16) throw InvalidInputError("quad_order must be >= 16");
  if (opt_samples < 1) throw InvalidInputError("opt_samples must be >= 1");
  SymbolContext ctx;
  ctx.op = op;
  ctx.report = compute_structure(op, tol);
  ctx.quad_order = quad_order;
  ctx.opt_samples = opt_samples;
  ctx.cache = std::make_shared<SymbolTableCache>();
  return ctx;
}

std::shared_ptr<const SymbolTable> symbol_table(const SymbolContext& ctx,
                                                double t) {
  if (ctx.cache) return ctx.cache->get(ctx, t);
  return std::make_shared<const SymbolTable>(ctx, t);
}

SymbolTable::SymbolTable(const SymbolContext& ctx, double t)
    : t_(t), s_(ctx.op.s), n_(ctx.op.n) {
  if (!(t > 0.0)) throw InvalidInputError("symbol evaluation requires t > 0");
  build(ctx.report.sqrtQ, ctx.op.B, ctx.quad_order);
}

SymbolTable::SymbolTable(const Eigen::MatrixXd& sqrtQ, const Eigen::MatrixXd& B,
                         double s, double t, int quad_order)
    : t_(t), s_(s), n_(static_cast<int>(B.rows())) {
  if (!(t > 0.0)) throw InvalidInputError("symbol evaluation requires t > 0");
  build(sqrtQ, B, quad_order);
}

void SymbolTable::build(const Eigen::MatrixXd& sqrtQ, const Eigen::MatrixXd& B,
                        int quad_order) {
  const QuadratureRule& rule = gauss_legendre_01(quad_order);
  weights_ = rule.weights;
  stack_.resize(quad_order * n_, n_);
  const Eigen::MatrixXd Bt = B.transpose();
  for (int j = 0; j < quad_order; ++j) {
    stack_.middleRows(j * n_, n_) = sqrtQ * matrix_exp(Bt, rule.nodes(j) * t_);
  }
}

double SymbolTable::integral(const Eigen::VectorXd& xi, double p) const {
  const Eigen::VectorXd y = stack_ * xi;
  const int order = static_cast<int>(weights_.size());
  const double e = p / 2.0;
  double total = 0.0;
  if (e == 1.0) {
    for (int j = 0; j < order; ++j) {
      total += weights_(j) * y.segment(j * n_, n_).squaredNorm();
    }
  } else if (e == 0.5) {
    for (int j = 0; j < order; ++j) {
      total += weights_(j) * y.segment(j * n_, n_).norm();
    }
  } else {
    for (int j = 0; j < order; ++j) {
      const double norm2 = y.segment(j * n_, n_).squaredNorm();
      total += weights_(j) * std::pow(norm2, e);
    }
  }
  return total;
}

double SymbolTable::a(const Eigen::VectorXd& xi) const {
  return 0.5 * integral(xi, 2.0 * s_);
}

double SymbolTable::q(const Eigen::VectorXd& xi) const {
  return integral(xi, 2.0);
}

double a_t(const SymbolContext& ctx, double t, const Eigen::VectorXd& xi) {
  return symbol_table(ctx, t)->a(xi);
}

double cumulative_exponent(const SymbolContext& ctx, double t,
                           const Eigen::VectorXd& xi) {
  // Substitution tau = alpha * t.
  return t * a_t(ctx, t, xi);
}

double gamma_symbol(const SymbolContext& ctx, double q, double t, double tau,
                    const Eigen::VectorXd& xi) {
  if (!(q > 0.0) || !(tau > 0.0)) {
    throw InvalidInputError("gamma_symbol requires q > 0 and tau > 0");
  }
  const auto table = symbol_table(ctx, t);
  return std::pow(table->q(xi), q / 2.0) * std::exp(-tau * table->a(xi));
}

double m_t(const SymbolContext& ctx, double t) {
  const Eigen::MatrixXd basis = ctx.report.s_perp_basis();
  if (basis.cols() == 0) {
    throw DegenerateOperatorError("m_t: S = R^n, no smoothing directions");
  }
  const auto table = symbol_table(ctx, t);
  const double s = ctx.op.s;
  auto value = [&](const Eigen::VectorXd& eta) {
    const double i2 = table->q(eta);
    const double i2s = table->integral(eta, 2.0 * s);
    if (i2 <= 0.0 || i2s <= 0.0) return -std::numeric_limits<double>::infinity();
    return 0.5 * std::log(i2) - std::log(i2s) / (2.0 * s);
  };
  const SphereExtremum best = maximize_on_sphere(value, basis, ctx.sphere_options());
  return std::exp(best.value);
}

double lower_bound_ratio(const SymbolContext& ctx, double t) {
  const Eigen::MatrixXd basis = ctx.report.s_perp_basis();
  if (basis.cols() == 0) {
    throw DegenerateOperatorError("lower_bound_ratio: S = R^n");
  }
  const auto table = symbol_table(ctx, t);
  // Denominator terms sqrtQ (B^T)^k, k = 0..r.
  std::vector<Eigen::MatrixXd> terms;
  Eigen::MatrixXd block = ctx.report.sqrtQ;
  for (int k = 0; k <= ctx.report.r; ++k) {
    terms.push_back(block);
    block = block * ctx.op.B.transpose();
  }
  auto ratio = [&](const Eigen::VectorXd& xi) {
    double denom = 0.0;
    double tk = 1.0;
    for (int k = 0; k <= ctx.report.r; ++k) {
      denom += tk * (terms[k] * xi).squaredNorm();
      tk *= t * t;
    }
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return table->q(xi) / denom;
  };
  const SphereExtremum best = minimize_on_sphere(ratio, basis, ctx.sphere_options());
  return best.value;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) {
    throw InvalidInputError("log_spaced requires 0 < lo < hi and count >= 2");
  }
  std::vector<double> grid(count);
  const double step = (std::log(hi) - std::log(lo)) / (count - 1);
  for (int i = 0; i < count; ++i) grid[i] = std::exp(std::log(lo) + i * step);
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

}  // namespace fouk
