#include "fouk/operator.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fouk/errors.hpp"

namespace fouk {

using nlohmann::json;

namespace {

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& field, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw InvalidInputError("field '" + field + "' must be a " +
                            std::to_string(n) + "x" + std::to_string(n) +
                            " row-major matrix");
  }
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = j.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw InvalidInputError("field '" + field + "', row " +
                              std::to_string(i) + ": expected " +
                              std::to_string(n) + " entries");
    }
    for (int k = 0; k < n; ++k) {
      if (!row.at(k).is_number()) {
        throw InvalidInputError("field '" + field + "', entry (" +
                                std::to_string(i) + "," + std::to_string(k) +
                                ") is not a number");
      }
      M(i, k) = row.at(k).get<double>();
    }
  }
  return M;
}

}  // namespace

void OUOperator::validate(double tol) const {
  if (n < 1) throw InvalidInputError("dimension n must be >= 1");
  if (B.rows() != n || B.cols() != n) throw InvalidInputError("B must be n x n");
  if (Q.rows() != n || Q.cols() != n) throw InvalidInputError("Q must be n x n");
  if (!(s > 0.0)) throw InvalidInputError("fractional order s must be > 0");

  const double scale = std::max(Q.norm(), 1.0);
  if ((Q - Q.transpose()).norm() > tol * scale) {
    throw NonSymmetricError("Q is not symmetric within tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Q + Q.transpose()),
                                                    Eigen::EigenvaluesOnly);
  const double lmax = std::max(es.eigenvalues().maxCoeff(), 0.0);
  if (es.eigenvalues().minCoeff() < -tol * std::max(lmax, 1.0)) {
    throw NotPsdError("Q has a negative eigenvalue beyond tolerance");
  }
}

OUOperator operator_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInputError(std::string("operator JSON parse error: ") + e.what());
  }
  for (const char* field : {"n", "B", "Q", "s"}) {
    if (!j.contains(field)) {
      throw InvalidInputError(std::string("operator JSON missing field '") +
                              field + "'");
    }
  }
  if (!j["n"].is_number_integer()) throw InvalidInputError("field 'n' must be an integer");
  OUOperator op;
  op.n = j["n"].get<int>();
  if (op.n < 1) throw InvalidInputError("field 'n' must be >= 1");
  op.B = matrix_from_json(j["B"], "B", op.n);
  op.Q = matrix_from_json(j["Q"], "Q", op.n);
  if (!j["s"].is_number()) throw InvalidInputError("field 's' must be a number");
  op.s = j["s"].get<double>();
  op.validate();
  return op;
}

OUOperator load_operator(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open operator file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return operator_from_json(ss.str());
}

std::string operator_to_json(const OUOperator& op) {
  json j;
  j["n"] = op.n;
  j["s"] = op.s;
  auto mat = [](const Eigen::MatrixXd& M) {
    json rows = json::array();
    for (int i = 0; i < M.rows(); ++i) {
      json row = json::array();
      for (int k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
      rows.push_back(row);
    }
    return rows;
  };
  j["B"] = mat(op.B);
  j["Q"] = mat(op.Q);
  return j.dump(2);
}

OUOperator kolmogorov_operator(double s, int d) {
  if (d < 1) throw InvalidInputError("kolmogorov block size must be >= 1");
  if (!(s > 0.0)) throw InvalidInputError("fractional order s must be > 0");
  OUOperator op;
  op.n = 2 * d;
  op.s = s;
  op.B = Eigen::MatrixXd::Zero(op.n, op.n);
  op.B.topRightCorner(d, d) = Eigen::MatrixXd::Identity(d, d);
  op.Q = Eigen::MatrixXd::Zero(op.n, op.n);
  op.Q.bottomRightCorner(d, d) =
      std::pow(2.0, 1.0 / s) * Eigen::MatrixXd::Identity(d, d);
  return op;
}

OUOperator fractional_heat_operator(int n, double s) {
  if (n < 1) throw InvalidInputError("dimension n must be >= 1");
  if (!(s > 0.0)) throw InvalidInputError("fractional order s must be > 0");
  OUOperator op;
  op.n = n;
  op.s = s;
  op.B = Eigen::MatrixXd::Zero(n, n);
  op.Q = std::pow(2.0, 1.0 / s) * Eigen::MatrixXd::Identity(n, n);
  return op;
}

}  // namespace fouk
