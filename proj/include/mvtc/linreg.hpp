#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mvtc/graph.hpp"
#include "mvtc/model.hpp"

namespace mvtc {

/// Design matrix of lagged regressors, all aligned to one target time
/// index: row r corresponds to target time t = align_lag + r and column j
/// holds X^{columns[j].var}_{t - columns[j].lag}.
struct RegressorBlock {
  std::vector<LaggedNode> columns;
  Eigen::MatrixXd matrix;  // t_eff x q
  int t_eff = 0;
  int align_lag = 0;

  int q() const { return static_cast<int>(columns.size()); }
};

/// Builds the aligned design matrix. extra_lag is the largest additional
/// lag that must stay addressable under the same alignment (the source
/// lag of the eventual correlation); the alignment lag is
/// max(extra_lag, max column lag) and t_eff = T - align_lag.
/// Throws LengthError when no rows remain.
RegressorBlock build_block(const TimeSeriesData& data,
                           const std::vector<LaggedNode>& nodes,
                           int extra_lag = 0);

/// The series of node.var at lag node.lag under the block's alignment.
Eigen::VectorXd aligned_series(const TimeSeriesData& data, LaggedNode node,
                               int align_lag);

/// Least-squares coefficients of y on the block columns via
/// column-pivoted QR. Throws SingularityError when the implied Gram
/// matrix condition exceeds 1e12 (or the block is rank deficient).
Eigen::VectorXd ols(const RegressorBlock& block, const Eigen::VectorXd& y);

/// OLS residual of y on the block (y itself when q = 0).
Eigen::VectorXd residualize(const RegressorBlock& block,
                            const Eigen::VectorXd& y);

/// Sample partial correlation: Pearson correlation of the residuals of x
/// and y after each is regressed on the block columns. Means are
/// subtracted from x, y and every column first. Throws DegenerateError
/// when either residual variance vanishes.
double partial_correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                           const RegressorBlock& block);

/// As above, also exposing the two residual series (centered inputs).
struct PartialCorrelationResult {
  double estimate = 0.0;
  Eigen::VectorXd x_residual;
  Eigen::VectorXd y_residual;
};
PartialCorrelationResult partial_correlation_detail(const Eigen::VectorXd& x,
                                                    const Eigen::VectorXd& y,
                                                    const RegressorBlock& block);

}  // namespace mvtc
