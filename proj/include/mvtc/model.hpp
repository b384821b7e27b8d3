#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mvtc {

/// A stationary N-variate VAR(p) process with Gaussian innovations:
///   X_t = sum_{s=1}^p Phi(s) X_{t-s} + eps_t,   eps_t ~ N(0, Sigma).
///
/// phi[s-1] holds Phi(s); entry Phi(s)(target, source) couples
/// source_{t-s} into target_t.
struct VarModel {
  int n_vars = 0;
  int order = 0;
  std::vector<Eigen::MatrixXd> phi;
  Eigen::MatrixXd sigma;
  std::vector<std::string> var_names;

  /// Index of a named variable; throws KeyError for unknown names.
  int var_index(const std::string& name) const;
};

/// T x N observation matrix, row = time step, column = variable.
struct TimeSeriesData {
  Eigen::MatrixXd values;
  std::vector<std::string> var_names;

  int length() const { return static_cast<int>(values.rows()); }
  int n_vars() const { return static_cast<int>(values.cols()); }
  int var_index(const std::string& name) const;
};

struct ValidationReport {
  bool stationary = false;
  double spectral_radius = 0.0;
  bool sigma_pd = false;
  /// Set when the model is valid but close to the unit root.
  std::string warning;
};

/// Checks dimensions, Sigma positive definiteness (Cholesky) and
/// stationarity via the companion-matrix spectral radius.
/// Throws DimensionError on inconsistent dimensions or non-finite values.
ValidationReport validate_model(const VarModel& model);

/// Companion-matrix spectral radius (largest eigenvalue modulus).
double spectral_radius(const VarModel& model);

/// Default burn-in: 10 * p * ceil(1 / (1 - rho_spec)), capped at 1e4.
int default_burn_in(const VarModel& model);

/// Simulates the process from a zero initial state, discarding the first
/// burn_in samples. Deterministic given seed. Innovations are drawn as
/// L z with L the lower Cholesky factor of Sigma and z iid standard
/// normal. burn_in < 0 selects default_burn_in(model).
TimeSeriesData simulate(const VarModel& model, int length, std::uint64_t seed,
                        int burn_in = -1);

// --- serialization -------------------------------------------------------

/// Model JSON: keys n_vars, order, phi (array of p N x N row arrays),
/// sigma (N x N), var_names.
std::string model_to_json(const VarModel& model);
VarModel model_from_json(const std::string& text);
VarModel load_model(const std::string& path);
void save_model(const VarModel& model, const std::string& path);

/// Data CSV: header row of variable names, one row per time step,
/// decimals formatted with 17 significant digits (round-trippable).
void save_data_csv(const TimeSeriesData& data, const std::string& path);
TimeSeriesData load_data_csv(const std::string& path);
void write_data_csv(const TimeSeriesData& data, std::ostream& os);
TimeSeriesData read_data_csv(std::istream& is);

}  // namespace mvtc
