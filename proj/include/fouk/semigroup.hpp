#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "fouk/gaussian.hpp"
#include "fouk/symbol.hpp"

namespace fouk {

/// Lazy Fourier-side evolution of a Gaussian state:
/// uhat_t(xi) = e^{-t a_t(xi)} e^{Tr(B) t} uhat_0(e^{t B^T} xi).
class EvolvedFourierState {
 public:
  EvolvedFourierState(const SymbolContext& ctx, GaussianState base, double t);

  Complex operator()(const Eigen::VectorXd& xi) const;
  const GaussianState& base() const { return base_; }
  double t() const { return t_; }

 private:
  GaussianState base_;
  double t_;
  double trB_factor_;
  Eigen::MatrixXd exp_tBt_;  // e^{t B^T}
  std::shared_ptr<const SymbolTable> table_;  // null at t = 0
};

EvolvedFourierState evolve(const SymbolContext& ctx, const GaussianState& u,
                           double t);

/// Operator norm of the Fourier multiplier
/// prod_j <xi_j, xi> e^{-t a_t(xi)}: either a finite value (kept in log form;
/// the norm of high-order products under- or overflows double range) or the
/// unbounded flag when some direction leaves S^perp.
struct MultiplierNorm {
  bool unbounded = false;
  double log_value = 0.0;

  double value() const;
};

/// sup_xi prod_j |<xi_j, xi>| e^{-t a_t(xi)}. Radial reduction: for a unit
/// sigma in S^perp the maximum over the ray is
/// prod_j |<xi_j, sigma>| (m / (2 s t a_t(sigma)))^{m/(2s)} e^{-m/(2s)},
/// then a sphere search over sigma. Directions with an S-component make the
/// symbol unbounded along S and yield the flag.
MultiplierNorm operator_norm(const SymbolContext& ctx, double t,
                             const std::vector<Eigen::VectorXd>& directions);

struct QuadratureOptions {
  double rel_target = 1e-6;
  int max_axis_order = 0;  // 0 = pick by dimension
};

/// ((2 pi)^{-n} ∫ symbol_sq(xi) |uhat(xi)|^2 dxi)^{1/2} by tensor
/// Gauss-Hermite nodes matched to the Gaussian envelope of |uhat|^2, with an
/// order-doubling self-check. Throws QuadratureNotConvergedError when two
/// successive refinements disagree beyond the target.
double fourier_weighted_norm(const GaussianState& u,
                             const std::function<double(const Eigen::VectorXd&)>& symbol_sq,
                             const QuadratureOptions& options = {});

/// || <xi_1,grad> … <xi_m,grad> e^{-tP} u ||_{L^2} for t > 0 via Plancherel;
/// the drift flow is applied exactly to the Gaussian state, the multiplier
/// through the quadrature weight.
double seminorm(const SymbolContext& ctx, const GaussianState& u, double t,
                const std::vector<Eigen::VectorXd>& directions,
                const QuadratureOptions& options = {});

/// Same without the drift flow: || prod_j <xi_j,grad> e^{-t a_t^w} u ||.
double multiplier_seminorm(const SymbolContext& ctx, const GaussianState& u,
                           double t,
                           const std::vector<Eigen::VectorXd>& directions,
                           const QuadratureOptions& options = {});

/// ||u||_{L^2} computed Fourier-side (Plancherel cross-check of l2_norm).
double plancherel_norm(const GaussianState& u,
                       const QuadratureOptions& options = {});

}  // namespace fouk
