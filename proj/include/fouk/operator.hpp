#pragma once

#include <Eigen/Dense>
#include <string>

namespace fouk {

/// Default relative threshold below which singular/eigen values count as zero.
inline constexpr double kDefaultRankTol = 1e-10;

/// Problem instance: the operator (1/2)Tr^s(-Q grad^2) + <Bx, grad> on L^2(R^n),
/// described by its dimension, drift matrix B, diffusion matrix Q and
/// fractional order s > 0.
struct OUOperator {
  int n = 0;
  Eigen::MatrixXd B;
  Eigen::MatrixXd Q;
  double s = 1.0;

  /// Throws InvalidInputError / NonSymmetricError / NotPsdError when the
  /// instance violates its invariants (Q symmetric PSD, s > 0, shapes).
  void validate(double tol = kDefaultRankTol) const;
};

/// Parses {"n":…, "B":[[…]], "Q":[[…]], "s":…} (row-major matrices).
OUOperator operator_from_json(const std::string& text);
OUOperator load_operator(const std::string& path);
std::string operator_to_json(const OUOperator& op);

/// Fractional Kolmogorov operator (-Delta_v)^s + v.grad_x on R^{2d}:
/// B = [[0, I], [0, 0]], Q = 2^{1/s} [[0, 0], [0, I]].
OUOperator kolmogorov_operator(double s, int d = 1);

/// Fractional heat operator Tr^s with Q = 2^{1/s} I, B = 0; the associated
/// Fourier multiplier of e^{-tP} is exactly e^{-t|xi|^{2s}}.
OUOperator fractional_heat_operator(int n, double s);

}  // namespace fouk
