#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "fouk/operator.hpp"
#include "fouk/sphere.hpp"
#include "fouk/structure.hpp"

namespace fouk {

class SymbolTableCache;

/// Evaluation context for the time-dependent symbol
/// a_t(xi) = (1/2) ∫_0^1 |sqrtQ e^{alpha t B^T} xi|^{2s} d(alpha)
/// and its relatives. quad_order fixes the Gauss-Legendre order on [0, 1];
/// opt_samples seeds the multistart sphere searches.
struct SymbolContext {
  OUOperator op;
  StructureReport report;
  int quad_order = 64;
  int opt_samples = 64;
  int sphere_grid_points = 16384;
  std::uint64_t seed = 0x5eed5eedULL;
  std::shared_ptr<SymbolTableCache> cache;  // set by make_context

  SphereOptions sphere_options() const;
};

SymbolContext make_context(const OUOperator& op, int quad_order = 64,
                           int opt_samples = 64, double tol = kDefaultRankTol);

/// Quadrature table for a fixed t: G_j = sqrtQ e^{alpha_j t B^T} stacked
/// row-wise, plus weights. All symbol integrals reduce to one matrix-vector
/// product against the stack.
class SymbolTable {
 public:
  SymbolTable(const SymbolContext& ctx, double t);
  SymbolTable(const Eigen::MatrixXd& sqrtQ, const Eigen::MatrixXd& B, double s,
              double t, int quad_order);

  double t() const { return t_; }
  double s() const { return s_; }

  /// ∫_0^1 |sqrtQ e^{alpha t B^T} xi|^p d(alpha).
  double integral(const Eigen::VectorXd& xi, double p) const;
  /// a_t(xi) = (1/2) * integral(xi, 2s).
  double a(const Eigen::VectorXd& xi) const;
  /// q_t(xi) = integral(xi, 2).
  double q(const Eigen::VectorXd& xi) const;

 private:
  void build(const Eigen::MatrixXd& sqrtQ, const Eigen::MatrixXd& B,
             int quad_order);
  double t_;
  double s_;
  int n_;
  Eigen::MatrixXd stack_;    // (order*n) x n
  Eigen::VectorXd weights_;  // order
};

/// Table for the given t, via the context cache when available.
std::shared_ptr<const SymbolTable> symbol_table(const SymbolContext& ctx,
                                                double t);

/// a_t(xi); t > 0.
double a_t(const SymbolContext& ctx, double t, const Eigen::VectorXd& xi);

/// A(t, xi) = (1/2) ∫_0^t |sqrtQ e^{tau B^T} xi|^{2s} d(tau) = t * a_t(xi).
double cumulative_exponent(const SymbolContext& ctx, double t,
                           const Eigen::VectorXd& xi);

/// Gamma_{q,t,tau}(xi) = q_t(xi)^{q/2} exp(-tau * a_t(xi)).
double gamma_symbol(const SymbolContext& ctx, double q, double t, double tau,
                    const Eigen::VectorXd& xi);

/// M_t = sup over the unit sphere of S^perp of
/// q_t(eta)^{1/2} * (2 a_t(eta))^{-1/(2s)}. Throws DegenerateOperatorError
/// when S = R^n.
double m_t(const SymbolContext& ctx, double t);

/// min over the unit sphere of S^perp of
/// q_t(xi) / sum_{k=0..r} t^{2k} |sqrtQ (B^T)^k xi|^2.
double lower_bound_ratio(const SymbolContext& ctx, double t);

/// Log-spaced grid in [lo, hi] (inclusive endpoints).
std::vector<double> log_spaced(double lo, double hi, int count);

}  // namespace fouk
