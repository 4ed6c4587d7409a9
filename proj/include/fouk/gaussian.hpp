#pragma once

#include <Eigen/Dense>
#include <complex>

#include "fouk/operator.hpp"

namespace fouk {

using Complex = std::complex<double>;

/// Modulated Gaussian u(x) = amplitude * e^{i<omega,x>} e^{-<Gam(x-mu),x-mu>}
/// with Gam symmetric positive definite. Closed under the drift flow and under
/// Fourier transform, which makes it the exact test-state family.
struct GaussianState {
  Complex amplitude{1.0, 0.0};
  Eigen::VectorXd mu;
  Eigen::VectorXd omega;
  Eigen::MatrixXd Gam;

  int n() const { return static_cast<int>(mu.size()); }
  void validate() const;

  static GaussianState standard(int n);  // e^{-|x|^2}
};

/// Pointwise evaluation of u.
Complex evaluate(const GaussianState& u, const Eigen::VectorXd& x);

/// uhat(xi) = amplitude * sqrt(pi^n / det Gam) * e^{-i<mu, xi-omega>}
///            * e^{-(1/4)<Gam^{-1}(xi-omega), xi-omega>}
/// with the convention uhat(xi) = ∫ e^{-i<x,xi>} u(x) dx.
Complex fourier_gaussian(const GaussianState& u, const Eigen::VectorXd& xi);

/// grad_xi uhat(xi) = uhat(xi) * (-i mu - (1/2) Gam^{-1}(xi-omega)).
Eigen::VectorXcd fourier_gaussian_gradient(const GaussianState& u,
                                           const Eigen::VectorXd& xi);

/// ||u||_{L^2} in closed form.
double l2_norm(const GaussianState& u);

/// u(e^{-tB} x): mu -> e^{tB} mu, omega -> e^{-tB^T} omega,
/// Gam -> e^{-tB^T} Gam e^{-tB}; the L^2 norm scales by e^{Tr(B) t / 2}.
GaussianState transport_apply(const GaussianState& u,
                              const Eigen::Ref<const Eigen::MatrixXd>& B,
                              double t);

/// {"type":"gaussian","amplitude":[re,im]|number,"mu":[…],"omega":[…],
///  "Gamma":[[…]]}.
GaussianState gaussian_from_json(const std::string& text);
std::string gaussian_to_json(const GaussianState& u);

}  // namespace fouk
