#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

namespace fouk {

struct SphereOptions {
  int grid_points = 16384;   // dense scan budget (d = 2, 3)
  int starts = 64;           // multistart count (also random-sample factor, d >= 4)
  std::uint64_t seed = 0x5eed5eedULL;
  double step_tol = 1e-9;    // compass-search termination step
  int max_iters = 200;
};

struct SphereExtremum {
  Eigen::VectorXd point;   // unit vector, ambient coordinates
  double value = 0.0;
};

/// Maximizes f over the unit sphere of the column span of `basis`
/// (n x d orthonormal). Dense deterministic coarse scan (uniform circle for
/// d = 2, Fibonacci sphere for d = 3, seeded samples for d >= 4) followed by
/// compass-search refinement of the best candidates. f receives ambient unit
/// vectors and may return -inf.
SphereExtremum maximize_on_sphere(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::Ref<const Eigen::MatrixXd>& basis,
    const SphereOptions& options = {});

SphereExtremum minimize_on_sphere(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::Ref<const Eigen::MatrixXd>& basis,
    const SphereOptions& options = {});

/// Deterministic quasi-uniform unit vectors in R^d (grid scan oracle helper).
Eigen::MatrixXd sphere_grid(int d, int count, std::uint64_t seed = 0x5eed5eedULL);

}  // namespace fouk
