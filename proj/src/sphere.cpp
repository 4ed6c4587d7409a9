#include "fouk/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "fouk/errors.hpp"
#include "fouk/parallel.hpp"

namespace fouk {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Eigen::MatrixXd coordinate_grid(int d, int count, std::uint64_t seed) {
  if (d == 1) {
    Eigen::MatrixXd pts(1, 2);
    pts << 1.0, -1.0;
    return pts;
  }
  if (d == 2) {
    Eigen::MatrixXd pts(2, count);
    for (int i = 0; i < count; ++i) {
      const double theta = 2.0 * M_PI * i / count;
      pts.col(i) << std::cos(theta), std::sin(theta);
    }
    return pts;
  }
  if (d == 3) {
    // Fibonacci sphere.
    Eigen::MatrixXd pts(3, count);
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / count;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double theta = 2.0 * M_PI * i / golden;
      pts.col(i) << rho * std::cos(theta), rho * std::sin(theta), z;
    }
    return pts;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd pts(d, count);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd v(d);
    double norm = 0.0;
    do {
      for (int k = 0; k < d; ++k) v(k) = normal(rng);
      norm = v.norm();
    } while (norm < 1e-12);
    pts.col(i) = v / norm;
  }
  return pts;
}

// Orthonormal completion of sigma: columns 1..d-1 of the Householder Q.
Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& sigma) {
  const int d = static_cast<int>(sigma.size());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(sigma);
  Eigen::MatrixXd Qfull = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  return Qfull.rightCols(d - 1);
}

struct Candidate {
  Eigen::VectorXd sigma;
  double value;
};

Candidate compass_refine(const std::function<double(const Eigen::VectorXd&)>& f,
                         Eigen::VectorXd sigma, double value, double step,
                         const SphereOptions& options) {
  const int d = static_cast<int>(sigma.size());
  if (d < 2) return {sigma, value};
  Eigen::MatrixXd tangent = tangent_basis(sigma);
  for (int iter = 0; iter < options.max_iters && step > options.step_tol; ++iter) {
    bool improved = false;
    Eigen::VectorXd best_sigma = sigma;
    double best_value = value;
    for (int k = 0; k < d - 1; ++k) {
      for (double sign : {1.0, -1.0}) {
        Eigen::VectorXd trial = (sigma + sign * step * tangent.col(k)).normalized();
        const double tv = f(trial);
        if (tv > best_value) {
          best_value = tv;
          best_sigma = trial;
          improved = true;
        }
      }
    }
    if (improved) {
      sigma = best_sigma;
      value = best_value;
      tangent = tangent_basis(sigma);
    } else {
      step *= 0.5;
    }
  }
  return {sigma, value};
}

}  // namespace

Eigen::MatrixXd sphere_grid(int d, int count, std::uint64_t seed) {
  if (d < 1) throw InvalidInputError("sphere_grid: dimension must be >= 1");
  return coordinate_grid(d, count, seed);
}

SphereExtremum maximize_on_sphere(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::Ref<const Eigen::MatrixXd>& basis, const SphereOptions& options) {
  const int d = static_cast<int>(basis.cols());
  if (d < 1) throw DegenerateOperatorError("sphere optimization over empty subspace");

  auto eval = [&](const Eigen::VectorXd& sigma) { return f(basis * sigma); };

  const int count = d == 1 ? 2
                  : d == 2 ? options.grid_points
                  : d == 3 ? options.grid_points
                           : std::max(options.starts * 64, 1024);
  const Eigen::MatrixXd pts = coordinate_grid(d, count, options.seed);

  std::vector<double> values(pts.cols());
  parallel_for(static_cast<std::size_t>(pts.cols()),
               [&](std::size_t i) { values[i] = eval(pts.col(static_cast<int>(i))); });

  if (d == 1) {
    const int best = values[0] >= values[1] ? 0 : 1;
    return {basis * pts.col(best), values[best]};
  }

  // Pick the best spread-out candidates, then refine each.
  std::vector<int> order(pts.cols());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return values[a] > values[b]; });

  const double coarse_step = d == 2 ? 2.0 * M_PI / count
                                    : 2.0 / std::sqrt(static_cast<double>(count));
  const double min_sep = 4.0 * coarse_step;
  std::vector<Candidate> picks;
  for (int idx : order) {
    if (!std::isfinite(values[idx])) continue;
    bool too_close = false;
    for (const Candidate& c : picks) {
      if ((c.sigma - pts.col(idx)).norm() < min_sep) {
        too_close = true;
        break;
      }
    }
    if (!too_close) picks.push_back({pts.col(idx), values[idx]});
    if (static_cast<int>(picks.size()) >= options.starts) break;
  }
  if (picks.empty()) {
    return {basis * pts.col(order[0]),
            values.empty() ? kNegInf : values[order[0]]};
  }

  std::vector<Candidate> refined(picks.size());
  parallel_for(picks.size(), [&](std::size_t i) {
    refined[i] = compass_refine(eval, picks[i].sigma, picks[i].value,
                                2.0 * coarse_step, options);
  });

  const auto best = std::max_element(
      refined.begin(), refined.end(),
      [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
  return {basis * best->sigma, best->value};
}

SphereExtremum minimize_on_sphere(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::Ref<const Eigen::MatrixXd>& basis, const SphereOptions& options) {
  SphereExtremum flipped = maximize_on_sphere(
      [&](const Eigen::VectorXd& x) { return -f(x); }, basis, options);
  flipped.value = -flipped.value;
  return flipped;
}

}  // namespace fouk
