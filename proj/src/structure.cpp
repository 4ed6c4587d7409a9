#include "fouk/structure.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "fouk/errors.hpp"

namespace fouk {

Eigen::MatrixXd psd_sqrt(const Eigen::Ref<const Eigen::MatrixXd>& Q, double tol) {
  const double scale = std::max(Q.norm(), 1.0);
  if ((Q - Q.transpose()).norm() > tol * scale) {
    throw NonSymmetricError("psd_sqrt: input is not symmetric within tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Q + Q.transpose()));
  Eigen::VectorXd lambda = es.eigenvalues();
  const double lmax = std::max(lambda.maxCoeff(), 0.0);
  Eigen::VectorXd root(lambda.size());
  for (int i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < -tol * std::max(lmax, 1.0)) {
      throw NotPsdError("psd_sqrt: eigenvalue below PSD tolerance");
    }
    root(i) = std::sqrt(std::max(lambda(i), 0.0));
  }
  Eigen::MatrixXd R =
      es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (R + R.transpose());
}

Eigen::MatrixXd matrix_exp(const Eigen::Ref<const Eigen::MatrixXd>& M, double t) {
  if (t == 0.0 || M.isZero(0.0)) {
    return Eigen::MatrixXd::Identity(M.rows(), M.cols());
  }
  return (t * M).exp();
}

Eigen::MatrixXd null_space(const Eigen::Ref<const Eigen::MatrixXd>& A, double tol,
                           double zero_scale) {
  const int n = static_cast<int>(A.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  // A matrix whose largest singular value sits at roundoff level relative to
  // the problem scale is identically zero.
  if (smax <= tol * zero_scale) return Eigen::MatrixXd::Identity(n, n);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol * std::max(smax, 1e-300)) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

Eigen::MatrixXd StructureReport::s_perp_basis() const {
  const int nn = n();
  if (dim_S() == 0) return Eigen::MatrixXd::Identity(nn, nn);
  // Null space of S_basis^T = orthogonal complement of S.
  return null_space(S_basis.transpose(), tol);
}

Eigen::VectorXd StructureReport::project_S(
    const Eigen::Ref<const Eigen::VectorXd>& xi) const {
  if (dim_S() == 0) return Eigen::VectorXd::Zero(n());
  return S_basis * (S_basis.transpose() * xi);
}

StructureReport compute_structure(const OUOperator& op, double tol) {
  op.validate(tol);
  const int n = op.n;
  StructureReport rep;
  rep.tol = tol;
  rep.sqrtQ = psd_sqrt(op.Q, tol);

  // V_k = V_{k-1} ∩ Ker(sqrtQ (B^T)^k), computed by restricting each new term
  // to the running kernel. The chain is nested by construction, which a
  // per-level decomposition of the stacked matrix does not guarantee once
  // ||B||^k amplifies the singular-value scales.
  const Eigen::MatrixXd Bt = op.B.transpose();
  Eigen::MatrixXd term = rep.sqrtQ;
  Eigen::MatrixXd running = Eigen::MatrixXd::Identity(n, n);
  std::vector<Eigen::MatrixXd> kernels;
  kernels.reserve(n);
  for (int k = 0; k < n; ++k) {
    if (running.cols() > 0) {
      const Eigen::MatrixXd restricted = term * running;
      running = running * null_space(restricted, tol, term.norm());
    }
    kernels.push_back(running);
    term = term * Bt;
  }

  rep.S_basis = kernels.back();
  const int dimS = static_cast<int>(rep.S_basis.cols());
  rep.r = 0;
  while (rep.r < n - 1 && static_cast<int>(kernels[rep.r].cols()) != dimS) ++rep.r;

  rep.V_bases.assign(kernels.begin(), kernels.begin() + rep.r + 1);
  rep.projectors.clear();
  for (const Eigen::MatrixXd& W : rep.V_bases) {
    // Projector onto V_k^perp = I - W W^T.
    rep.projectors.push_back(Eigen::MatrixXd::Identity(n, n) - W * W.transpose());
  }
  rep.kalman = (dimS == 0);
  return rep;
}

int index_of(const StructureReport& report,
             const Eigen::Ref<const Eigen::VectorXd>& xi) {
  const double norm = xi.norm();
  if (norm == 0.0) return 0;
  if (report.project_S(xi).norm() > 1e-8 * norm) {
    throw NotInSPerpError(
        "index: vector has a significant S-component; the direction is "
        "non-smoothing");
  }
  // xi ∈ V_k^perp iff its V_k-component vanishes.
  for (int k = 0; k <= report.r; ++k) {
    const Eigen::MatrixXd& W = report.V_bases[k];
    const double in_vk = W.cols() == 0 ? 0.0 : (W.transpose() * xi).norm();
    if (in_vk <= 1e-8 * norm) return k;
  }
  return report.r;
}

bool kalman_rank(const OUOperator& op, double tol) {
  op.validate(tol);
  const int n = op.n;
  const Eigen::MatrixXd sqrtQ = psd_sqrt(op.Q, tol);
  Eigen::MatrixXd ctrl(n, n * n);
  Eigen::MatrixXd block = sqrtQ;
  for (int k = 0; k < n; ++k) {
    ctrl.middleCols(k * n, n) = block;
    block = op.B * block;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ctrl);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol * std::max(smax, 1e-300)) ++rank;
  }
  return rank == n;
}

}  // namespace fouk
