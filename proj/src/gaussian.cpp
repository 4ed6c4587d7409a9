#include "fouk/gaussian.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "fouk/errors.hpp"
#include "fouk/structure.hpp"

namespace fouk {

void GaussianState::validate() const {
  const int dim = n();
  if (dim < 1) throw InvalidInputError("GaussianState: empty center");
  if (omega.size() != dim || Gam.rows() != dim || Gam.cols() != dim) {
    throw InvalidInputError("GaussianState: inconsistent field shapes");
  }
  if ((Gam - Gam.transpose()).norm() > 1e-10 * std::max(Gam.norm(), 1.0)) {
    throw NonSymmetricError("GaussianState: Gam must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Gam, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw NotPsdError("GaussianState: Gam must be positive definite");
  }
}

GaussianState GaussianState::standard(int n) {
  GaussianState u;
  u.amplitude = Complex(1.0, 0.0);
  u.mu = Eigen::VectorXd::Zero(n);
  u.omega = Eigen::VectorXd::Zero(n);
  u.Gam = Eigen::MatrixXd::Identity(n, n);
  return u;
}

Complex evaluate(const GaussianState& u, const Eigen::VectorXd& x) {
  const Eigen::VectorXd d = x - u.mu;
  const double phase = u.omega.dot(x);
  const double decay = d.dot(u.Gam * d);
  return u.amplitude * std::exp(Complex(0.0, phase)) * std::exp(-decay);
}

Complex fourier_gaussian(const GaussianState& u, const Eigen::VectorXd& xi) {
  const int n = u.n();
  const Eigen::VectorXd d = xi - u.omega;
  const Eigen::LLT<Eigen::MatrixXd> llt(u.Gam);
  const double quad = d.dot(llt.solve(d));
  double log_det = 0.0;
  for (int i = 0; i < n; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
  const double prefactor = std::exp(0.5 * (n * std::log(M_PI) - log_det));
  return u.amplitude * prefactor * std::exp(Complex(0.0, -u.mu.dot(d))) *
         std::exp(-0.25 * quad);
}

Eigen::VectorXcd fourier_gaussian_gradient(const GaussianState& u,
                                           const Eigen::VectorXd& xi) {
  const Eigen::VectorXd d = xi - u.omega;
  const Eigen::LLT<Eigen::MatrixXd> llt(u.Gam);
  const Eigen::VectorXd solve = llt.solve(d);
  const Complex value = fourier_gaussian(u, xi);
  Eigen::VectorXcd grad(u.n());
  for (int i = 0; i < u.n(); ++i) {
    grad(i) = value * (Complex(0.0, -u.mu(i)) - 0.5 * solve(i));
  }
  return grad;
}

double l2_norm(const GaussianState& u) {
  // ||u||^2 = |A|^2 ∫ e^{-2<Gam d,d>} dx = |A|^2 pi^{n/2} det(2 Gam)^{-1/2}.
  const int n = u.n();
  const Eigen::LLT<Eigen::MatrixXd> llt(u.Gam);
  double log_det = 0.0;
  for (int i = 0; i < n; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
  const double log_norm2 = 2.0 * std::log(std::abs(u.amplitude)) +
                           0.5 * n * std::log(M_PI) -
                           0.5 * (n * std::log(2.0) + log_det);
  return std::exp(0.5 * log_norm2);
}

GaussianState transport_apply(const GaussianState& u,
                              const Eigen::Ref<const Eigen::MatrixXd>& B,
                              double t) {
  const Eigen::MatrixXd forward = matrix_exp(B, t);    // e^{tB}
  const Eigen::MatrixXd backward = matrix_exp(B, -t);  // e^{-tB}
  GaussianState v;
  v.amplitude = u.amplitude;
  v.mu = forward * u.mu;
  v.omega = backward.transpose() * u.omega;
  v.Gam = backward.transpose() * u.Gam * backward;
  v.Gam = 0.5 * (v.Gam + v.Gam.transpose());
  return v;
}

GaussianState gaussian_from_json(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInputError(std::string("state JSON parse error: ") + e.what());
  }
  if (j.value("type", "") != "gaussian") {
    throw InvalidInputError("state JSON: expected \"type\": \"gaussian\"");
  }
  for (const char* field : {"mu", "omega", "Gamma"}) {
    if (!j.contains(field)) {
      throw InvalidInputError(std::string("state JSON missing field '") + field +
                              "'");
    }
  }
  GaussianState u;
  const auto& mu = j["mu"];
  const int n = static_cast<int>(mu.size());
  if (n < 1) throw InvalidInputError("state JSON: empty 'mu'");
  u.mu.resize(n);
  u.omega.resize(n);
  for (int i = 0; i < n; ++i) u.mu(i) = mu.at(i).get<double>();
  if (static_cast<int>(j["omega"].size()) != n) {
    throw InvalidInputError("state JSON: 'omega' length mismatch");
  }
  for (int i = 0; i < n; ++i) u.omega(i) = j["omega"].at(i).get<double>();
  const auto& gam = j["Gamma"];
  if (static_cast<int>(gam.size()) != n) {
    throw InvalidInputError("state JSON: 'Gamma' must be n x n");
  }
  u.Gam.resize(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(gam.at(i).size()) != n) {
      throw InvalidInputError("state JSON: 'Gamma' must be n x n");
    }
    for (int k = 0; k < n; ++k) u.Gam(i, k) = gam.at(i).at(k).get<double>();
  }
  if (j.contains("amplitude")) {
    const auto& amp = j["amplitude"];
    if (amp.is_number()) {
      u.amplitude = Complex(amp.get<double>(), 0.0);
    } else if (amp.is_array() && amp.size() == 2) {
      u.amplitude = Complex(amp.at(0).get<double>(), amp.at(1).get<double>());
    } else {
      throw InvalidInputError("state JSON: 'amplitude' must be a number or [re, im]");
    }
  }
  u.validate();
  return u;
}

std::string gaussian_to_json(const GaussianState& u) {
  using nlohmann::json;
  json j;
  j["type"] = "gaussian";
  j["amplitude"] = {u.amplitude.real(), u.amplitude.imag()};
  j["mu"] = std::vector<double>(u.mu.data(), u.mu.data() + u.mu.size());
  j["omega"] = std::vector<double>(u.omega.data(), u.omega.data() + u.omega.size());
  json rows = json::array();
  for (int i = 0; i < u.Gam.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < u.Gam.cols(); ++k) row.push_back(u.Gam(i, k));
    rows.push_back(row);
  }
  j["Gamma"] = rows;
  return j.dump(2);
}

}  // namespace fouk
