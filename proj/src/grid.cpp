#include "fouk/grid.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <limits>
#include <vector>

#include <nlohmann/json.hpp>
#include <unsupported/Eigen/FFT>

#include "fouk/errors.hpp"

namespace fouk {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// c_k = (-1)^k DFT(u)_[k mod N] / N, k in [-N/2, N/2), stored at k + N/2.
Eigen::VectorXcd line_to_coeffs(const Eigen::VectorXcd& line) {
  const int N = static_cast<int>(line.size());
  Eigen::FFT<double> fft;
  std::vector<Complex> in(line.data(), line.data() + N), out(N);
  fft.fwd(out, in);
  Eigen::VectorXcd coeffs(N);
  for (int idx = 0; idx < N; ++idx) {
    const int k = idx - N / 2;
    const int m = (k + N) % N;
    coeffs(idx) = ((k & 1) ? -1.0 : 1.0) * out[m] / static_cast<double>(N);
  }
  return coeffs;
}

Eigen::VectorXcd coeffs_to_line(const Eigen::VectorXcd& coeffs) {
  const int N = static_cast<int>(coeffs.size());
  std::vector<Complex> spectrum(N), out(N);
  for (int idx = 0; idx < N; ++idx) {
    const int k = idx - N / 2;
    const int m = (k + N) % N;
    spectrum[m] = ((k & 1) ? -1.0 : 1.0) * coeffs(idx) * static_cast<double>(N);
  }
  Eigen::FFT<double> fft;
  fft.inv(out, spectrum);
  return Eigen::Map<Eigen::VectorXcd>(out.data(), N);
}

// E(j, idx) = e^{i pi k(idx) p_j / L}: evaluates a coefficient line at
// arbitrary points through one matrix product.
Eigen::MatrixXcd eval_matrix(const Eigen::VectorXd& targets, int N, double L) {
  Eigen::MatrixXcd E(targets.size(), N);
  for (int j = 0; j < targets.size(); ++j) {
    const Complex base = std::exp(Complex(0.0, M_PI * targets(j) / L));
    Complex phase = std::exp(Complex(0.0, -M_PI * (N / 2) * targets(j) / L));
    for (int idx = 0; idx < N; ++idx) {
      E(j, idx) = phase;
      phase *= base;
    }
  }
  return E;
}

// Row-major (i1, i2) matrix view of a flattened grid.
Eigen::MatrixXcd as_matrix(const GridState& u) {
  return Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(u.values.data(), u.N,
                                                          u.N);
}

Eigen::VectorXcd flatten(const Eigen::MatrixXcd& M) {
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> R = M;
  return Eigen::Map<Eigen::VectorXcd>(R.data(), R.size());
}

void note_escape(const Eigen::VectorXd& targets, double L, bool* escape) {
  if (!escape) return;
  if (targets.cwiseAbs().maxCoeff() > L * (1.0 + 1e-9)) *escape = true;
}

// w(x, y) = u(a x + b y, y): axis-1 resample, dilation a, offset (b) * y.
Eigen::MatrixXcd shear_axis1(const Eigen::MatrixXcd& V, double a, double b,
                             const Eigen::VectorXd& x, double L, bool* escape) {
  const int N = static_cast<int>(V.rows());
  Eigen::MatrixXcd C(N, N);  // coefficients along axis 1, per column
  for (int i2 = 0; i2 < N; ++i2) C.col(i2) = line_to_coeffs(V.col(i2));
  // offset phases per column: e^{i pi k (b y_{i2}) / L}
  for (int i2 = 0; i2 < N; ++i2) {
    const double off = b * x(i2);
    note_escape((a * x.array() + off).matrix(), L, escape);
    for (int idx = 0; idx < N; ++idx) {
      const int k = idx - N / 2;
      C(idx, i2) *= std::exp(Complex(0.0, M_PI * k * off / L));
    }
  }
  const Eigen::MatrixXcd E = eval_matrix(a * x, N, L);
  return E * C;
}

// w(x, y) = u(x, a y + b x): axis-2 resample, dilation a, offset (b) * x.
Eigen::MatrixXcd shear_axis2(const Eigen::MatrixXcd& V, double a, double b,
                             const Eigen::VectorXd& x, double L, bool* escape) {
  const int N = static_cast<int>(V.rows());
  Eigen::MatrixXcd C(N, N);  // coefficients along axis 2, per row
  for (int i1 = 0; i1 < N; ++i1) {
    C.row(i1) = line_to_coeffs(V.row(i1).transpose()).transpose();
  }
  for (int i1 = 0; i1 < N; ++i1) {
    const double off = b * x(i1);
    note_escape((a * x.array() + off).matrix(), L, escape);
    for (int idx = 0; idx < N; ++idx) {
      const int k = idx - N / 2;
      C(i1, idx) *= std::exp(Complex(0.0, M_PI * k * off / L));
    }
  }
  const Eigen::MatrixXcd E = eval_matrix(a * x, N, L);
  return C * E.transpose();
}

// u(M x) on the grid for upper-triangular M: first the sheared axis-1 pass
// w(x,y) = u(a x + (b/d) y, y), then the pure dilation v(x,y) = w(x, d y).
Eigen::MatrixXcd upper_tri_transport(const Eigen::MatrixXcd& V,
                                     const Eigen::Matrix2d& M,
                                     const Eigen::VectorXd& x, double L,
                                     bool* escape) {
  const double a = M(0, 0), b = M(0, 1), d = M(1, 1);
  Eigen::MatrixXcd W = shear_axis1(V, a, b / d, x, L, escape);
  return shear_axis2(W, d, 0.0, x, L, escape);
}

Eigen::MatrixXcd lower_tri_transport(const Eigen::MatrixXcd& V,
                                     const Eigen::Matrix2d& M,
                                     const Eigen::VectorXd& x, double L,
                                     bool* escape) {
  const double a = M(0, 0), c = M(1, 0), d = M(1, 1);
  Eigen::MatrixXcd W = shear_axis2(V, d, c / a, x, L, escape);
  return shear_axis1(W, a, 0.0, x, L, escape);
}

Eigen::MatrixXcd transport_2d(const Eigen::MatrixXcd& V, const Eigen::Matrix2d& M,
                              const Eigen::VectorXd& x, double L, bool* escape) {
  const double scale = M.norm();
  const double eps = 1e-14 * std::max(scale, 1.0);
  if (std::abs(M(1, 0)) <= eps) return upper_tri_transport(V, M, x, L, escape);
  if (std::abs(M(0, 1)) <= eps) return lower_tri_transport(V, M, x, L, escape);
  if (std::abs(M(0, 0)) > eps) {
    // M = L U; u o M = (u o L) o U.
    Eigen::Matrix2d Lo = Eigen::Matrix2d::Identity();
    Lo(1, 0) = M(1, 0) / M(0, 0);
    Eigen::Matrix2d Up = M;
    Up(1, 0) = 0.0;
    Up(1, 1) = M(1, 1) - M(1, 0) * M(0, 1) / M(0, 0);
    Eigen::MatrixXcd W = lower_tri_transport(V, Lo, x, L, escape);
    return upper_tri_transport(W, Up, x, L, escape);
  }
  // M(0,0) = 0: swap columns (M' = M P) and coordinates of the result.
  Eigen::Matrix2d swapped;
  swapped.col(0) = M.col(1);
  swapped.col(1) = M.col(0);
  return transport_2d(V, swapped, x, L, escape).transpose();
}

}  // namespace

void GridState::validate() const {
  if (dim < 1 || dim > 2) throw InvalidInputError("GridState: dim must be 1 or 2");
  if (!power_of_two(N)) throw InvalidInputError("GridState: N must be a power of two");
  if (!(L > 0.0)) throw InvalidInputError("GridState: L must be positive");
  std::int64_t expected = 1;
  for (int d = 0; d < dim; ++d) expected *= N;
  if (values.size() != expected) {
    throw InvalidInputError("GridState: values size does not match N^dim");
  }
  if (!values.allFinite()) throw InvalidInputError("GridState: non-finite values");
}

double GridState::norm() const {
  const double cell = std::pow(2.0 * L / N, dim);
  return std::sqrt(cell * values.squaredNorm());
}

GridState sample_on_grid(const GaussianState& u, int N, double L) {
  u.validate();
  GridState g;
  g.N = N;
  g.L = L;
  g.dim = u.n();
  if (g.dim > 2) throw InvalidInputError("sample_on_grid: dim must be 1 or 2");
  if (g.dim == 1) {
    g.values.resize(N);
    Eigen::VectorXd x(1);
    for (int i = 0; i < N; ++i) {
      x(0) = g.grid_coord(i);
      g.values(i) = evaluate(u, x);
    }
  } else {
    g.values.resize(static_cast<std::int64_t>(N) * N);
    Eigen::VectorXd x(2);
    for (int i1 = 0; i1 < N; ++i1) {
      x(0) = g.grid_coord(i1);
      for (int i2 = 0; i2 < N; ++i2) {
        x(1) = g.grid_coord(i2);
        g.values(static_cast<std::int64_t>(i1) * N + i2) = evaluate(u, x);
      }
    }
  }
  g.validate();
  return g;
}

Eigen::VectorXcd grid_to_coeffs(const GridState& u) {
  u.validate();
  if (u.dim == 1) return line_to_coeffs(u.values);
  Eigen::MatrixXcd V = as_matrix(u);
  Eigen::MatrixXcd C1(u.N, u.N);
  for (int i2 = 0; i2 < u.N; ++i2) C1.col(i2) = line_to_coeffs(V.col(i2));
  Eigen::MatrixXcd C(u.N, u.N);
  for (int i1 = 0; i1 < u.N; ++i1) {
    C.row(i1) = line_to_coeffs(C1.row(i1).transpose()).transpose();
  }
  return flatten(C);
}

GridState coeffs_to_grid(const Eigen::VectorXcd& coeffs, int N, double L, int dim) {
  GridState g;
  g.N = N;
  g.L = L;
  g.dim = dim;
  if (dim == 1) {
    g.values = coeffs_to_line(coeffs);
  } else if (dim == 2) {
    Eigen::MatrixXcd C =
        Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>(coeffs.data(), N, N);
    Eigen::MatrixXcd V1(N, N);
    for (int i1 = 0; i1 < N; ++i1) {
      V1.row(i1) = coeffs_to_line(C.row(i1).transpose()).transpose();
    }
    Eigen::MatrixXcd V(N, N);
    for (int i2 = 0; i2 < N; ++i2) V.col(i2) = coeffs_to_line(V1.col(i2));
    g.values = flatten(V);
  } else {
    throw InvalidInputError("coeffs_to_grid: dim must be 1 or 2");
  }
  g.validate();
  return g;
}

GridState grid_transport(const GridState& u,
                         const Eigen::Ref<const Eigen::MatrixXd>& B, double t,
                         GridEvolveReport* report) {
  u.validate();
  if (B.rows() != u.dim || B.cols() != u.dim) {
    throw InvalidInputError("grid_transport: B must match the grid dimension");
  }
  bool escape = false;
  GridState out = u;
  if (t == 0.0 || B.isZero(0.0)) {
    if (report) report->box_escape = false;
    return out;
  }
  const Eigen::MatrixXd M = matrix_exp(B, -t);  // e^{-tB}

  if (u.dim == 1) {
    const Eigen::VectorXcd coeffs = line_to_coeffs(u.values);
    Eigen::VectorXd targets(u.N);
    for (int i = 0; i < u.N; ++i) targets(i) = M(0, 0) * u.grid_coord(i);
    note_escape(targets, u.L, &escape);
    out.values = eval_matrix(targets, u.N, u.L) * coeffs;
  } else {
    Eigen::VectorXd x(u.N);
    for (int i = 0; i < u.N; ++i) x(i) = u.grid_coord(i);
    const Eigen::MatrixXcd V = as_matrix(u);
    out.values = flatten(transport_2d(V, M, x, u.L, &escape));
  }
  if (report) report->box_escape = report->box_escape || escape;
  return out;
}

GridState grid_evolve(const SymbolContext& ctx, const GridState& u, double t,
                      GridEvolveReport* report) {
  u.validate();
  if (t < 0.0) throw InvalidInputError("grid_evolve requires t >= 0");
  if (ctx.op.n != u.dim) {
    throw InvalidInputError("grid_evolve: operator and grid dimensions differ");
  }
  GridEvolveReport local;
  local.t = t;
  local.norm_in = u.norm();
  local.similitude_bound = std::exp(0.5 * ctx.op.B.trace() * t) * local.norm_in;

  if (t == 0.0) {
    local.norm_out = local.norm_in;
    if (report) *report = local;
    return u;
  }

  GridState moved = grid_transport(u, ctx.op.B, t, &local);

  Eigen::VectorXcd coeffs = grid_to_coeffs(moved);
  const auto table = symbol_table(ctx, t);
  const double freq = M_PI / u.L;
  double top_shell = 0.0, total = 0.0;
  double min_boundary_decay = std::numeric_limits<double>::infinity();

  if (u.dim == 1) {
    for (int idx = 0; idx < u.N; ++idx) {
      const int k = idx - u.N / 2;
      Eigen::VectorXd xi = Eigen::VectorXd::Constant(1, freq * k);
      const double ta = t * table->a(xi);
      const double mass = std::norm(coeffs(idx));
      total += mass;
      if (std::abs(k) >= u.N / 2 - 1) {
        top_shell += mass;
        min_boundary_decay = std::min(min_boundary_decay, ta);
      }
      coeffs(idx) *= std::exp(-ta);
    }
  } else {
    Eigen::VectorXd xi(2);
    for (int i1 = 0; i1 < u.N; ++i1) {
      const int k1 = i1 - u.N / 2;
      xi(0) = freq * k1;
      for (int i2 = 0; i2 < u.N; ++i2) {
        const int k2 = i2 - u.N / 2;
        xi(1) = freq * k2;
        const double ta = t * table->a(xi);
        const std::int64_t idx = static_cast<std::int64_t>(i1) * u.N + i2;
        const double mass = std::norm(coeffs(idx));
        total += mass;
        if (std::max(std::abs(k1), std::abs(k2)) >= u.N / 2 - 1) {
          top_shell += mass;
          min_boundary_decay = std::min(min_boundary_decay, ta);
        }
        coeffs(idx) *= std::exp(-ta);
      }
    }
  }
  local.tail_fraction = total > 0.0 ? std::sqrt(top_shell / total) : 0.0;
  local.alias_warning = std::exp(-min_boundary_decay) > 1e-2;

  GridState out = coeffs_to_grid(coeffs, u.N, u.L, u.dim);
  local.norm_out = out.norm();
  if (report) *report = local;
  return out;
}

GridState read_grid(const std::string& sidecar_json_path) {
  std::ifstream in(sidecar_json_path);
  if (!in) throw InvalidInputError("cannot open grid sidecar: " + sidecar_json_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInputError(std::string("grid sidecar parse error: ") + e.what());
  }
  for (const char* field : {"N", "L", "n", "file"}) {
    if (!j.contains(field)) {
      throw InvalidInputError(std::string("grid sidecar missing field '") + field +
                              "'");
    }
  }
  GridState g;
  g.N = j["N"].get<int>();
  g.L = j["L"].get<double>();
  g.dim = j["n"].get<int>();
  std::filesystem::path raw = j["file"].get<std::string>();
  if (raw.is_relative()) {
    raw = std::filesystem::path(sidecar_json_path).parent_path() / raw;
  }
  std::ifstream data(raw, std::ios::binary);
  if (!data) throw InvalidInputError("cannot open grid data: " + raw.string());
  std::int64_t count = 1;
  for (int d = 0; d < g.dim; ++d) count *= g.N;
  g.values.resize(count);
  std::vector<float> buffer(2 * static_cast<std::size_t>(count));
  data.read(reinterpret_cast<char*>(buffer.data()),
            static_cast<std::streamsize>(buffer.size() * sizeof(float)));
  if (data.gcount() != static_cast<std::streamsize>(buffer.size() * sizeof(float))) {
    throw InvalidInputError("grid data file too short: " + raw.string());
  }
  for (std::int64_t i = 0; i < count; ++i) {
    g.values(i) = Complex(buffer[2 * i], buffer[2 * i + 1]);
  }
  g.validate();
  return g;
}

void write_grid(const GridState& u, const std::string& raw_path,
                const std::string& sidecar_json_path) {
  u.validate();
  namespace fs = std::filesystem;
  const fs::path target(raw_path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream data(tmp, std::ios::binary | std::ios::trunc);
    if (!data) throw InvalidInputError("cannot write grid data: " + tmp.string());
    std::vector<float> buffer(2 * static_cast<std::size_t>(u.values.size()));
    for (std::int64_t i = 0; i < u.values.size(); ++i) {
      buffer[2 * i] = static_cast<float>(u.values(i).real());
      buffer[2 * i + 1] = static_cast<float>(u.values(i).imag());
    }
    data.write(reinterpret_cast<const char*>(buffer.data()),
               static_cast<std::streamsize>(buffer.size() * sizeof(float)));
    if (!data.good()) throw InvalidInputError("grid write failed: " + tmp.string());
  }
  fs::rename(tmp, target);

  nlohmann::json j;
  j["type"] = "grid";
  j["N"] = u.N;
  j["L"] = u.L;
  j["n"] = u.dim;
  j["file"] = target.filename().string();
  std::ostringstream side;
  side << j.dump(2) << "\n";
  const fs::path side_tmp = sidecar_json_path + ".tmp";
  {
    std::ofstream out(side_tmp, std::ios::trunc);
    if (!out) {
      throw InvalidInputError("cannot write grid sidecar: " + side_tmp.string());
    }
    out << side.str();
  }
  fs::rename(side_tmp, fs::path(sidecar_json_path));
}

}  // namespace fouk
