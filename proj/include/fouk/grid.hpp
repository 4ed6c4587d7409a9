#pragma once

#include <Eigen/Dense>
#include <string>

#include "fouk/gaussian.hpp"
#include "fouk/symbol.hpp"

namespace fouk {

/// Sampled complex function on the periodic box [-L, L)^n, N points per axis
/// (power of two), values in C row-major order.
struct GridState {
  Eigen::VectorXcd values;
  int N = 0;
  double L = 1.0;
  int dim = 1;

  void validate() const;
  double grid_coord(int i) const { return -L + 2.0 * L * i / N; }
  /// Discrete L^2 norm sqrt((2L/N)^n sum |u|^2).
  double norm() const;
};

/// Samples a Gaussian state on the box.
GridState sample_on_grid(const GaussianState& u, int N, double L);

/// Trigonometric-interpolation coefficients c_k (k per axis in [-N/2, N/2),
/// stored at linear index (k + N/2)) with u(x) = sum_k c_k e^{i pi <k,x> / L}.
Eigen::VectorXcd grid_to_coeffs(const GridState& u);
GridState coeffs_to_grid(const Eigen::VectorXcd& coeffs, int N, double L, int dim);

struct GridEvolveReport {
  double t = 0.0;
  double norm_in = 0.0;
  double norm_out = 0.0;
  double similitude_bound = 0.0;  // e^{Tr(B) t / 2} * norm_in
  double tail_fraction = 0.0;     // coefficient mass on the top frequency shell
  bool box_escape = false;
  bool alias_warning = false;
};

/// Semi-Lagrangian transport u(e^{-tB} x) by full trigonometric interpolation
/// (dim <= 2). Sets report->box_escape when characteristics leave the box.
GridState grid_transport(const GridState& u,
                         const Eigen::Ref<const Eigen::MatrixXd>& B, double t,
                         GridEvolveReport* report = nullptr);

/// Two-step evolution: exact-in-time transport, then the Fourier multiplier
/// e^{-t a_t(xi)} on the trigonometric modes.
GridState grid_evolve(const SymbolContext& ctx, const GridState& u, double t,
                      GridEvolveReport* report = nullptr);

/// Raw little-endian complex64 (float re, float im), C row-major, with a JSON
/// sidecar carrying {"type":"grid","n":…,"N":…,"L":…,"file":…}.
GridState read_grid(const std::string& sidecar_json_path);
void write_grid(const GridState& u, const std::string& raw_path,
                const std::string& sidecar_json_path);

}  // namespace fouk
