#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fouk/operator.hpp"

namespace fouk {

/// Symmetric PSD square root by eigendecomposition. Eigenvalues in
/// [-tol*lambda_max, 0) are clamped to zero; anything lower throws NotPsdError,
/// and an asymmetric input throws NonSymmetricError.
Eigen::MatrixXd psd_sqrt(const Eigen::Ref<const Eigen::MatrixXd>& Q,
                         double tol = kDefaultRankTol);

/// e^{tM} (scaling-and-squaring with a Pade core).
Eigen::MatrixXd matrix_exp(const Eigen::Ref<const Eigen::MatrixXd>& M, double t);

/// The algebraic structure attached to (B, Q): the space
/// S = Ker(sqrtQ) ∩ Ker(sqrtQ B^T) ∩ … ∩ Ker(sqrtQ (B^T)^{n-1}), the smallest
/// truncation depth r at which the intersection stabilizes, the stratification
/// V_0 ⊇ … ⊇ V_r = S, and the projectors onto the V_k-orthogonals.
struct StructureReport {
  Eigen::MatrixXd sqrtQ;
  Eigen::MatrixXd S_basis;                 // n x dim(S), orthonormal columns
  int r = 0;
  std::vector<Eigen::MatrixXd> V_bases;    // V_bases[k]: n x dim(V_k), k = 0..r
  std::vector<Eigen::MatrixXd> projectors; // onto V_k^perp, k = 0..r
  bool kalman = false;
  double tol = kDefaultRankTol;

  int n() const { return static_cast<int>(sqrtQ.rows()); }
  int dim_S() const { return static_cast<int>(S_basis.cols()); }

  /// Orthonormal basis of S^perp (n x (n - dim S)).
  Eigen::MatrixXd s_perp_basis() const;
  /// Component of xi in S.
  Eigen::VectorXd project_S(const Eigen::Ref<const Eigen::VectorXd>& xi) const;
};

StructureReport compute_structure(const OUOperator& op,
                                  double tol = kDefaultRankTol);

/// Index of xi in S^perp: min{k : xi ∈ V_k^perp}. Throws NotInSPerpError when
/// the S-component of xi exceeds 1e-8 |xi|. index(0) = 0.
int index_of(const StructureReport& report,
             const Eigen::Ref<const Eigen::VectorXd>& xi);

/// Rank[ sqrtQ, B sqrtQ, …, B^{n-1} sqrtQ ] == n.
bool kalman_rank(const OUOperator& op, double tol = kDefaultRankTol);

/// Orthonormal null-space basis of A (columns), singular values below
/// tol * sigma_max counting as zero. When sigma_max itself is at roundoff
/// level relative to zero_scale, A counts as the zero matrix.
Eigen::MatrixXd null_space(const Eigen::Ref<const Eigen::MatrixXd>& A,
                           double tol = kDefaultRankTol,
                           double zero_scale = 0.0);

}  // namespace fouk
