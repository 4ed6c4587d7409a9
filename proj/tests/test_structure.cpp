#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "fouk/errors.hpp"
#include "fouk/operator.hpp"
#include "fouk/structure.hpp"

using namespace fouk;

namespace {

Eigen::MatrixXd random_matrix(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = normal(rng);
  return M;
}

Eigen::MatrixXd random_psd(int n, std::mt19937_64& rng, int rank = -1) {
  if (rank < 0) rank = n;
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd A(rank, n);
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = normal(rng);
  return A.transpose() * A;
}

}  // namespace

TEST_CASE("psd_sqrt identity") {
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
  CHECK((psd_sqrt(I) - I).norm() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("psd_sqrt of the kolmogorov diffusion matrix") {
  for (double s : {0.5, 1.0, 1.5}) {
    OUOperator op = kolmogorov_operator(s);
    Eigen::MatrixXd R = psd_sqrt(op.Q);
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(2, 2);
    expected(1, 1) = std::pow(2.0, 1.0 / (2.0 * s));
    CHECK((R - expected).norm() < 1e-12);
  }
}

TEST_CASE("psd_sqrt squares back to the input") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    Eigen::MatrixXd M = random_psd(n, rng, trial % 3 == 0 ? n / 2 + 1 : n);
    Eigen::MatrixXd R = psd_sqrt(M);
    CHECK((R - R.transpose()).norm() < 1e-12 * std::max(1.0, R.norm()));
    CHECK((R * R - M).norm() <= 1e-10 * std::max(1.0, M.norm()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  }
}

TEST_CASE("psd_sqrt rejects bad inputs") {
  Eigen::MatrixXd A(2, 2);
  A << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(psd_sqrt(A), NonSymmetricError);
  Eigen::MatrixXd N(2, 2);
  N << 1.0, 0.0, 0.0, -0.5;
  CHECK_THROWS_AS(psd_sqrt(N), NotPsdError);
}

TEST_CASE("matrix_exp basics") {
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(4, 4);
  CHECK(matrix_exp(Z, 2.5) == Eigen::MatrixXd::Identity(4, 4));

  // Nilpotent kolmogorov drift: e^{t B^T} = I + t B^T exactly.
  OUOperator op = kolmogorov_operator(1.0);
  const double t = 0.37;
  Eigen::MatrixXd Bt = op.B.transpose();
  Eigen::MatrixXd expected = Eigen::MatrixXd::Identity(2, 2) + t * Bt;
  CHECK((matrix_exp(Bt, t) - expected).norm() < 1e-15);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    Eigen::MatrixXd M = random_matrix(n, rng);
    Eigen::MatrixXd prod = matrix_exp(M, 0.8) * matrix_exp(M, -0.8);
    CHECK((prod - Eigen::MatrixXd::Identity(n, n)).norm() < 1e-12);
  }
}

TEST_CASE("compute_structure on the kolmogorov operator") {
  OUOperator op = kolmogorov_operator(1.0);
  StructureReport rep = compute_structure(op);
  CHECK(rep.dim_S() == 0);
  CHECK(rep.r == 1);
  CHECK(rep.kalman);
  // V_0 = Ker(sqrtQ) = x-axis.
  REQUIRE(rep.V_bases[0].cols() == 1);
  CHECK(std::abs(std::abs(rep.V_bases[0](0, 0)) - 1.0) < 1e-12);
  CHECK(std::abs(rep.V_bases[0](1, 0)) < 1e-12);

  Eigen::Vector2d v_dir(0.0, 1.0), x_dir(1.0, 0.0);
  CHECK(index_of(rep, v_dir) == 0);
  CHECK(index_of(rep, x_dir) == 1);
}

TEST_CASE("compute_structure with zero diffusion") {
  OUOperator op;
  op.n = 3;
  op.s = 1.0;
  op.B = Eigen::MatrixXd::Random(3, 3);
  op.Q = Eigen::MatrixXd::Zero(3, 3);
  StructureReport rep = compute_structure(op);
  CHECK(rep.dim_S() == 3);
  CHECK(rep.r == 0);
  CHECK_FALSE(rep.kalman);
  CHECK_FALSE(kalman_rank(op));
}

TEST_CASE("compute_structure shift-matrix fixture vs stacked-kernel oracle") {
  // n = 4, Q = diag(1,0,0,0), B = lower shift: sqrtQ (B^T)^j has a single 1 in
  // entry (0, j), so V_k = {x : x_0 = … = x_k = 0} and S = {0}.
  const int n = 4;
  OUOperator op;
  op.n = n;
  op.s = 1.0;
  op.B = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) op.B(i + 1, i) = 1.0;
  op.Q = Eigen::MatrixXd::Zero(n, n);
  op.Q(0, 0) = 1.0;

  StructureReport rep = compute_structure(op);
  CHECK(rep.dim_S() == 0);
  CHECK(rep.r == n - 1);
  CHECK(rep.kalman);
  for (int k = 0; k <= rep.r; ++k) {
    CHECK(rep.V_bases[k].cols() == n - 1 - k);
  }

  // Oracle: null space of the explicitly stacked matrix at a tighter threshold.
  Eigen::MatrixXd sqrtQ = psd_sqrt(op.Q);
  Eigen::MatrixXd stack(n * n, n);
  Eigen::MatrixXd block = sqrtQ;
  for (int j = 0; j < n; ++j) {
    stack.middleRows(j * n, n) = block;
    block = block * op.B.transpose();
  }
  Eigen::MatrixXd oracle = null_space(stack, 1e-13);
  CHECK(oracle.cols() == rep.dim_S());
}

TEST_CASE("structure invariants on random operators") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    OUOperator op;
    op.n = n;
    op.s = 1.0;
    op.B = random_matrix(n, rng);
    const int rank = 1 + static_cast<int>(rng() % n);
    op.Q = random_psd(n, rng, rank);
    StructureReport rep = compute_structure(op);

    // kalman_rank agrees with S-emptiness.
    CHECK(kalman_rank(op) == (rep.dim_S() == 0));

    // Nesting and strict growth of the orthogonals up to r.
    for (int k = 0; k + 1 <= rep.r; ++k) {
      CHECK(rep.V_bases[k].cols() > rep.V_bases[k + 1].cols());
      // V_{k+1} ⊆ V_k: projecting onto V_k keeps every V_{k+1} basis vector.
      const Eigen::MatrixXd& W = rep.V_bases[k];
      Eigen::MatrixXd proj = W * W.transpose() * rep.V_bases[k + 1];
      CHECK((proj - rep.V_bases[k + 1]).norm() < 1e-8);
    }
    CHECK(rep.V_bases[rep.r].cols() == rep.dim_S());

    // Cayley-Hamilton: extending the stack to j = 0..2n-1 leaves S unchanged.
    Eigen::MatrixXd stack(2 * n * n, n);
    Eigen::MatrixXd block = rep.sqrtQ;
    for (int j = 0; j < 2 * n; ++j) {
      stack.middleRows(j * n, n) = block;
      block = block * op.B.transpose();
    }
    Eigen::MatrixXd extended = null_space(stack);
    CHECK(extended.cols() == rep.dim_S());

    // sqrtQ (B^T)^k annihilates S.
    for (int c = 0; c < rep.dim_S(); ++c) {
      Eigen::VectorXd eta = rep.S_basis.col(c);
      Eigen::MatrixXd term = rep.sqrtQ;
      for (int k = 0; k < n; ++k) {
        CHECK((term * eta).norm() < 1e-10);
        term = term * op.B.transpose();
      }
    }

    // Projector idempotence and symmetry.
    for (const Eigen::MatrixXd& P : rep.projectors) {
      CHECK((P * P - P).norm() < 1e-12);
      CHECK((P - P.transpose()).norm() < 1e-12);
    }
  }
}

TEST_CASE("index conventions and error path") {
  OUOperator op;
  op.n = 2;
  op.s = 1.0;
  op.B = Eigen::MatrixXd::Zero(2, 2);
  op.Q = Eigen::MatrixXd::Identity(2, 2);
  StructureReport rep = compute_structure(op);
  CHECK(rep.r == 0);
  Eigen::Vector2d any(0.3, -0.7);
  CHECK(index_of(rep, any) == 0);
  CHECK(index_of(rep, Eigen::Vector2d::Zero()) == 0);

  // Q = diag(1,0), B = 0: S = span(e2); e2 is not in S^perp.
  OUOperator deg;
  deg.n = 2;
  deg.s = 1.0;
  deg.B = Eigen::MatrixXd::Zero(2, 2);
  deg.Q = Eigen::MatrixXd::Zero(2, 2);
  deg.Q(0, 0) = 1.0;
  StructureReport drep = compute_structure(deg);
  CHECK(drep.dim_S() == 1);
  CHECK_THROWS_AS(index_of(drep, Eigen::Vector2d(0.0, 1.0)), NotInSPerpError);
  CHECK(index_of(drep, Eigen::Vector2d(1.0, 0.0)) == 0);
}

TEST_CASE("operator JSON round trip and validation") {
  OUOperator op = kolmogorov_operator(0.5);
  OUOperator back = operator_from_json(operator_to_json(op));
  CHECK(back.n == op.n);
  CHECK(back.s == op.s);
  CHECK((back.B - op.B).norm() == 0.0);
  CHECK((back.Q - op.Q).norm() == 0.0);

  CHECK_THROWS_AS(operator_from_json("{"), InvalidInputError);
  CHECK_THROWS_AS(operator_from_json("{\"n\":1,\"B\":[[0]],\"Q\":[[0]]}"),
                  InvalidInputError);
  CHECK_THROWS_AS(
      operator_from_json(
          "{\"n\":1,\"B\":[[0]],\"Q\":[[-1]],\"s\":1.0}"),
      NotPsdError);
  CHECK_THROWS_AS(
      operator_from_json(
          "{\"n\":2,\"B\":[[0,0],[0,0]],\"Q\":[[0,1],[0,0]],\"s\":1.0}"),
      NonSymmetricError);
}
