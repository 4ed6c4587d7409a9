#include "fouk/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "fouk/errors.hpp"

namespace fouk {

namespace {

// Golub-Welsch with the tridiagonal Jacobi matrix: eigenvalues-only solve for
// the nodes, Christoffel function for the weights
// (w_i = 1 / sum_k p_k(x_i)^2 with orthonormal p_k), which keeps the cost at
// O(order^2) instead of a dense eigenvector decomposition.
QuadratureRule golub_welsch(const Eigen::VectorXd& offdiag, double mu0) {
  const int n = static_cast<int>(offdiag.size()) + 1;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, offdiag, Eigen::EigenvaluesOnly);

  QuadratureRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = rule.nodes(i);
    double pm1 = 0.0;
    double p = 1.0 / std::sqrt(mu0);
    double sum = p * p;
    for (int k = 0; k + 1 < n; ++k) {
      const double next = (x * p - (k > 0 ? offdiag(k - 1) * pm1 : 0.0)) / offdiag(k);
      pm1 = p;
      p = next;
      sum += p * p;
    }
    rule.weights(i) = std::isfinite(sum) ? 1.0 / sum : 0.0;
  }
  return rule;
}

QuadratureRule make_gauss_legendre_01(int order) {
  // Legendre on [-1, 1]: beta_k = k / sqrt(4k^2 - 1), mu0 = 2.
  Eigen::VectorXd beta(order - 1);
  for (int k = 1; k < order; ++k) {
    beta(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  }
  QuadratureRule rule = golub_welsch(beta, 2.0);
  rule.nodes = (rule.nodes.array() + 1.0) / 2.0;
  rule.weights /= 2.0;
  return rule;
}

QuadratureRule make_gauss_hermite(int order) {
  // Hermite weight e^{-x^2}: beta_k = sqrt(k / 2), mu0 = sqrt(pi).
  Eigen::VectorXd beta(order - 1);
  for (int k = 1; k < order; ++k) beta(k - 1) = std::sqrt(k / 2.0);
  return golub_welsch(beta, std::sqrt(M_PI));
}

template <typename Maker>
const QuadratureRule& cached(int order, Maker maker,
                             std::map<int, QuadratureRule>& cache,
                             std::mutex& mutex) {
  if (order < 1) throw InvalidInputError("quadrature order must be >= 1");
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, maker(order)).first;
  return it->second;
}

}  // namespace

const QuadratureRule& gauss_legendre_01(int order) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mutex;
  return cached(order, make_gauss_legendre_01, cache, mutex);
}

const QuadratureRule& gauss_hermite(int order) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mutex;
  return cached(order, make_gauss_hermite, cache, mutex);
}

}  // namespace fouk
