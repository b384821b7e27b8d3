#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mvtc/graph.hpp"
#include "mvtc/model.hpp"

namespace mvtc {

/// Path-coefficient matrices Psi(0..n_max):
///   Psi(0) = I,  Psi(n) = sum_{s=1}^{min(n,p)} Phi(s) Psi(n-s).
/// Entry (i,j) of Psi(n) aggregates the coefficient products over all
/// directed paths of total lag n from variable j to variable i.
struct PsiSequence {
  std::vector<Eigen::MatrixXd> matrices;
  int n_max() const { return static_cast<int>(matrices.size()) - 1; }
  const Eigen::MatrixXd& operator[](int n) const { return matrices.at(n); }
};

PsiSequence psi(const VarModel& model, int n_max);

/// Lagged covariances Gamma(0..tau_max) with Gamma_ij(tau) = E[X^i_{t+tau} X^j_t],
/// summed as Gamma(tau) = sum_n Psi(n+tau) Sigma Psi(n)^T.
struct CovarianceTable {
  std::vector<Eigen::MatrixXd> gammas;  // index = lag
  double truncation_error = 0.0;

  int tau_max() const { return static_cast<int>(gammas.size()) - 1; }
  /// Gamma entry at any signed lag; Gamma(-tau) = Gamma(tau)^T.
  double at(int i, int j, int tau) const;
  /// Second moment E[u v] of two lagged nodes relative to one time index:
  /// E[X^u_{t-u.lag} X^v_{t-v.lag}] = Gamma_{u.var,v.var}(v.lag - u.lag).
  double moment(LaggedNode u, LaggedNode v) const;
};

/// Sums the covariance series until the term norm stays below
/// tol * ||Sigma||_F for 3 consecutive terms (cap 1e5 terms). The
/// truncation error is bounded by a geometric tail in the squared
/// companion spectral radius. Throws StationarityError / ConvergenceError.
CovarianceTable lagged_covariance(const VarModel& model, int tau_max,
                                  double tol = 1e-14);

/// The sidepath covariance vector E[eps_X^T W] for a link source -> target:
/// entry i = sum_r Psi_{W_i r}(tau - g_i) Sigma_{rX}, Psi(m<0) = 0, where
/// (W_i, g_i) runs over the parents of the target other than the source.
struct SidepathCovariance {
  std::vector<LaggedNode> w_nodes;  // parents of target minus source
  Eigen::VectorXd values;
};

SidepathCovariance sidepath_covariance(const VarModel& model,
                                       const TimeSeriesGraph& graph,
                                       LaggedNode source, int target);

/// All quantities of the coupling-strength decomposition for one link:
/// the residual (co-)variances after projecting the source and target on
/// U = (W, Z), expressed through the Schur complement S_Z of the
/// Z-block in the Gram matrix of (W, Z).
struct TheoremQuantities {
  double c = 0.0;          // Phi_{target,source}(tau)
  double sigma_x2 = 0.0;   // innovation variance of the source
  double sigma_y2 = 0.0;   // innovation variance of the target
  Eigen::VectorXd sidepath_cov;  // E[eps_X^T W]
  Eigen::MatrixXd schur;         // S_Z
  double cov_xy = 0.0;     // E[Y_U^T X_U]
  double var_y = 0.0;      // E[Y_U^T Y_U]
  double var_x = 0.0;      // E[X_U^T X_U]
  std::vector<LaggedNode> w_nodes;  // parents of target minus source
  std::vector<LaggedNode> z_nodes;  // parents of source, shifted by tau

  double mit() const;      // cov_xy / sqrt(var_y * var_x)
};

TheoremQuantities theorem_quantities(const VarModel& model,
                                     const TimeSeriesGraph& graph,
                                     LaggedNode source, int target,
                                     double tol = 1e-14);

/// rho_YX(tau) = Gamma_XY(tau) / sqrt(Gamma_XX(0) Gamma_YY(0)); correlates
/// X at the later time t+tau with Y at t.
double analytic_cross_correlation(const VarModel& model, int x, int y,
                                  int tau, double tol = 1e-14);

/// Population partial correlation of two lagged nodes given a condition
/// set, assembled from the analytic covariance table.
double analytic_partial_correlation(const VarModel& model, LaggedNode x,
                                    LaggedNode y,
                                    const std::vector<LaggedNode>& conditions,
                                    double tol = 1e-14);

/// Population regression coefficients of target_t on the given lagged
/// regressors, solving E[U^T U] R = E[U^T Y] on analytic moments.
Eigen::VectorXd analytic_regression(const VarModel& model, int target,
                                    const std::vector<LaggedNode>& regressors,
                                    double tol = 1e-14);

}  // namespace mvtc
