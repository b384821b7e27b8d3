#include "mvtc/model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mvtc/errors.hpp"

namespace mvtc {

namespace {

int index_of(const std::vector<std::string>& names, const std::string& name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw KeyError("unknown variable '" + name + "'");
  return static_cast<int>(it - names.begin());
}

void check_dimensions(const VarModel& m) {
  if (m.n_vars < 1) throw DimensionError("n_vars must be positive");
  if (m.order < 1) throw DimensionError("order must be positive");
  if (static_cast<int>(m.phi.size()) != m.order)
    throw DimensionError("phi must hold exactly `order` matrices");
  for (const auto& p : m.phi) {
    if (p.rows() != m.n_vars || p.cols() != m.n_vars)
      throw DimensionError("phi matrices must be n_vars x n_vars");
    if (!p.allFinite()) throw DimensionError("phi entries must be finite");
  }
  if (m.sigma.rows() != m.n_vars || m.sigma.cols() != m.n_vars)
    throw DimensionError("sigma must be n_vars x n_vars");
  if (!m.sigma.allFinite()) throw DimensionError("sigma entries must be finite");
  if (!m.var_names.empty() &&
      static_cast<int>(m.var_names.size()) != m.n_vars)
    throw DimensionError("var_names count must equal n_vars");
}

Eigen::MatrixXd companion_matrix(const VarModel& m) {
  const int n = m.n_vars, p = m.order;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n * p, n * p);
  for (int s = 0; s < p; ++s) comp.block(0, s * n, n, n) = m.phi[s];
  if (p > 1)
    comp.block(n, 0, n * (p - 1), n * (p - 1)) =
        Eigen::MatrixXd::Identity(n * (p - 1), n * (p - 1));
  return comp;
}

constexpr double kStationarityMargin = 1e-10;

}  // namespace

int VarModel::var_index(const std::string& name) const {
  return index_of(var_names, name);
}

int TimeSeriesData::var_index(const std::string& name) const {
  return index_of(var_names, name);
}

double spectral_radius(const VarModel& model) {
  check_dimensions(model);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion_matrix(model), false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

ValidationReport validate_model(const VarModel& model) {
  check_dimensions(model);
  ValidationReport report;
  report.spectral_radius = spectral_radius(model);
  report.stationary = report.spectral_radius < 1.0 - kStationarityMargin;
  if (report.stationary && report.spectral_radius > 0.999)
    report.warning = "spectral radius above 0.999; estimation is ill-conditioned";
  if ((model.sigma - model.sigma.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, model.sigma.cwiseAbs().maxCoeff())) {
    report.sigma_pd = false;
    return report;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(model.sigma);
  report.sigma_pd = llt.info() == Eigen::Success;
  return report;
}

int default_burn_in(const VarModel& model) {
  const double rho = spectral_radius(model);
  if (rho >= 1.0) return 10000;
  const double mix = std::ceil(1.0 / (1.0 - rho));
  const double burn = 10.0 * model.order * mix;
  return static_cast<int>(std::min(burn, 10000.0));
}

TimeSeriesData simulate(const VarModel& model, int length, std::uint64_t seed,
                        int burn_in) {
  const auto report = validate_model(model);
  if (!report.sigma_pd)
    throw CovarianceError("sigma is not symmetric positive definite");
  if (!report.stationary)
    throw StationarityError("model is not stationary (spectral radius " +
                            std::to_string(report.spectral_radius) + ")");
  if (length < 1) throw LengthError("length must be >= 1");
  if (burn_in < 0) burn_in = default_burn_in(model);

  const int n = model.n_vars, p = model.order;
  const Eigen::MatrixXd chol =
      Eigen::LLT<Eigen::MatrixXd>(model.sigma).matrixL();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const int total = length + burn_in;
  Eigen::MatrixXd values(total, n);
  Eigen::VectorXd z(n);
  for (int t = 0; t < total; ++t) {
    for (int i = 0; i < n; ++i) z[i] = normal(rng);
    Eigen::VectorXd x = chol * z;
    for (int s = 1; s <= p && s <= t; ++s)
      x.noalias() += model.phi[s - 1] * values.row(t - s).transpose();
    values.row(t) = x.transpose();
  }

  TimeSeriesData data;
  data.values = values.bottomRows(length);
  data.var_names = model.var_names;
  if (data.var_names.empty()) {
    for (int i = 0; i < n; ++i) data.var_names.push_back("V" + std::to_string(i));
  }
  return data;
}

// --- serialization --------------------------------------------------------

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, int n, const char* what) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != n)
    throw IoError(std::string(what) + ": expected " + std::to_string(n) + " rows");
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw IoError(std::string(what) + ": row " + std::to_string(i) +
                    " must have " + std::to_string(n) + " entries");
    for (int j = 0; j < n; ++j) m(i, j) = row[j].get<double>();
  }
  return m;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string model_to_json(const VarModel& model) {
  json j;
  j["n_vars"] = model.n_vars;
  j["order"] = model.order;
  json phis = json::array();
  for (const auto& p : model.phi) phis.push_back(matrix_to_json(p));
  j["phi"] = std::move(phis);
  j["sigma"] = matrix_to_json(model.sigma);
  j["var_names"] = model.var_names;
  return j.dump(2);
}

VarModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("invalid model JSON: ") + e.what());
  }
  VarModel m;
  try {
    m.n_vars = j.at("n_vars").get<int>();
    m.order = j.at("order").get<int>();
    const auto& phis = j.at("phi");
    if (!phis.is_array() || static_cast<int>(phis.size()) != m.order)
      throw IoError("phi must be an array of `order` matrices");
    for (int s = 0; s < m.order; ++s)
      m.phi.push_back(matrix_from_json(phis[s], m.n_vars, "phi"));
    m.sigma = matrix_from_json(j.at("sigma"), m.n_vars, "sigma");
    if (j.contains("var_names"))
      m.var_names = j.at("var_names").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw IoError(std::string("invalid model JSON: ") + e.what());
  }
  check_dimensions(m);
  return m;
}

VarModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

void save_model(const VarModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model file '" + path + "'");
  out << model_to_json(model) << '\n';
}

void write_data_csv(const TimeSeriesData& data, std::ostream& os) {
  for (std::size_t i = 0; i < data.var_names.size(); ++i) {
    if (i) os << ',';
    os << data.var_names[i];
  }
  os << '\n';
  for (Eigen::Index t = 0; t < data.values.rows(); ++t) {
    for (Eigen::Index j = 0; j < data.values.cols(); ++j) {
      if (j) os << ',';
      os << format_double(data.values(t, j));
    }
    os << '\n';
  }
}

TimeSeriesData read_data_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  TimeSeriesData data;
  {
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) data.var_names.push_back(cell);
  }
  const int n = static_cast<int>(data.var_names.size());
  if (n == 0) throw IoError("CSV header has no columns");
  std::vector<double> cells;
  int rows = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int count = 0;
    while (std::getline(ss, cell, ',')) {
      if (cell.empty())
        throw IoError("missing value at data row " + std::to_string(rows + 1));
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || ptr != cell.data() + cell.size())
        throw IoError("invalid numeric cell '" + cell + "' at data row " +
                      std::to_string(rows + 1));
      if (!std::isfinite(v))
        throw IoError("non-finite value at data row " + std::to_string(rows + 1));
      cells.push_back(v);
      ++count;
    }
    if (count != n)
      throw IoError("data row " + std::to_string(rows + 1) + " has " +
                    std::to_string(count) + " cells, expected " +
                    std::to_string(n));
    ++rows;
  }
  if (rows == 0) throw IoError("CSV has no data rows");
  data.values.resize(rows, n);
  for (int t = 0; t < rows; ++t)
    for (int j = 0; j < n; ++j) data.values(t, j) = cells[t * n + j];
  return data;
}

void save_data_csv(const TimeSeriesData& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write data file '" + path + "'");
  write_data_csv(data, out);
}

TimeSeriesData load_data_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file '" + path + "'");
  return read_data_csv(in);
}

}  // namespace mvtc
