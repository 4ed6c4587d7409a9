#include "fouk/report_io.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fouk/errors.hpp"

namespace fouk {

using nlohmann::json;

namespace {

json matrix_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

json basis_json(const Eigen::MatrixXd& W) {
  // Serialized as a list of column vectors.
  json cols = json::array();
  for (int c = 0; c < W.cols(); ++c) {
    json col = json::array();
    for (int r = 0; r < W.rows(); ++r) col.push_back(W(r, c));
    cols.push_back(col);
  }
  return cols;
}

std::string format_double(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%FT%TZ", std::gmtime(&tt));
  return buffer;
}

}  // namespace

std::string structure_report_to_json(const StructureReport& report) {
  json j;
  j["n"] = report.n();
  j["sqrtQ"] = matrix_json(report.sqrtQ);
  j["S_basis"] = basis_json(report.S_basis);
  j["dim_S"] = report.dim_S();
  j["r"] = report.r;
  json vb = json::array();
  for (const auto& W : report.V_bases) vb.push_back(basis_json(W));
  j["V_bases"] = vb;
  json pr = json::array();
  for (const auto& P : report.projectors) pr.push_back(matrix_json(P));
  j["projectors"] = pr;
  j["kalman"] = report.kalman;
  j["tol"] = report.tol;
  return j.dump(2);
}

std::string report_to_json(const VerificationReport& report, bool with_timestamp) {
  json j;
  j["experiment"] = report.experiment;
  if (!report.inputs.empty()) {
    j["inputs"] = json::parse(report.inputs, nullptr, false);
  }
  json series = json::array();
  for (const SeriesRow& row : report.series) {
    series.push_back({{"label", row.label},
                      {"parameter", row.parameter},
                      {"value", row.value}});
  }
  j["series"] = series;
  j["fitted"] = report.fitted;
  j["tolerance"] = report.tolerance;
  j["pass"] = report.pass;
  if (with_timestamp) j["timestamp"] = iso_timestamp();
  return j.dump(2);
}

std::string report_to_csv(const VerificationReport& report) {
  std::ostringstream out;
  out << "experiment,parameter,value,fitted,predicted,pass\n";
  const std::string pass = report.pass ? "true" : "false";
  for (const SeriesRow& row : report.series) {
    out << report.experiment << ',' << row.label << ':'
        << format_double(row.parameter) << ',' << format_double(row.value)
        << ",,," << pass << '\n';
  }
  for (const auto& [key, value] : report.fitted) {
    const bool predicted = key.find("predicted") != std::string::npos;
    out << report.experiment << ',' << key << ",,"
        << (predicted ? "" : format_double(value)) << ','
        << (predicted ? format_double(value) : "") << ',' << pass << '\n';
  }
  out << report.experiment << ",tolerance,," << format_double(report.tolerance)
      << ",," << pass << '\n';
  return out.str();
}

VerificationReport report_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      line != "experiment,parameter,value,fitted,predicted,pass") {
    throw InvalidInputError("csv report: bad header");
  }
  VerificationReport report;
  bool any = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (int c = 0; c < 5; ++c) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        throw InvalidInputError("csv report: short row");
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    fields.push_back(line.substr(start));
    report.experiment = fields[0];
    report.pass = fields[5] == "true";
    any = true;
    const std::string& param = fields[1];
    const std::size_t colon = param.find(':');
    if (colon != std::string::npos) {
      report.series.push_back({param.substr(0, colon),
                               std::stod(param.substr(colon + 1)),
                               std::stod(fields[2])});
    } else if (param == "tolerance") {
      report.tolerance = std::stod(fields[3]);
    } else if (!fields[3].empty()) {
      report.fitted[param] = std::stod(fields[3]);
    } else if (!fields[4].empty()) {
      report.fitted[param] = std::stod(fields[4]);
    }
  }
  if (!any) throw InvalidInputError("csv report: no rows");
  return report;
}

VerificationReport fit_as_report(const std::string& experiment,
                                 const ExponentFit& fit) {
  VerificationReport report;
  report.experiment = experiment;
  for (std::size_t i = 0; i < fit.t_grid.size(); ++i) {
    report.series.push_back(
        {"log_norm", fit.t_grid[i],
         i < fit.log_values.size() ? fit.log_values[i] : 0.0});
  }
  report.fitted["slope"] = fit.slope;
  report.fitted["intercept"] = fit.intercept;
  report.fitted["r_squared"] = fit.r_squared;
  report.fitted["predicted_slope"] = fit.predicted_slope;
  report.fitted["unbounded"] = fit.unbounded_hit ? 1.0 : 0.0;
  report.pass = fit.pass;
  return report;
}

void atomic_write(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInputError("cannot write: " + tmp.string());
    out << contents;
    if (!out.good()) throw InvalidInputError("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace fouk
