#include "mvtc/linreg.hpp"

#include <algorithm>
#include <cmath>

#include "mvtc/errors.hpp"

namespace mvtc {

namespace {

constexpr double kMaxColumnCondition = 1e6;  // sqrt of the Gram bound 1e12

void check_node(const TimeSeriesData& data, LaggedNode node) {
  if (node.var < 0 || node.var >= data.n_vars())
    throw KeyError("variable index " + std::to_string(node.var) +
                   " out of range");
  if (node.lag < 0) throw ConditionError("lags must be >= 0");
}

}  // namespace

Eigen::VectorXd aligned_series(const TimeSeriesData& data, LaggedNode node,
                               int align_lag) {
  check_node(data, node);
  if (node.lag > align_lag)
    throw LengthError("node lag exceeds the alignment lag");
  const int t_eff = data.length() - align_lag;
  if (t_eff < 1) throw LengthError("insufficient series length for alignment");
  return data.values.col(node.var).segment(align_lag - node.lag, t_eff);
}

RegressorBlock build_block(const TimeSeriesData& data,
                           const std::vector<LaggedNode>& nodes,
                           int extra_lag) {
  if (extra_lag < 0) throw ConditionError("extra_lag must be >= 0");
  int align = extra_lag;
  for (const auto& n : nodes) {
    check_node(data, n);
    align = std::max(align, n.lag);
  }
  const int t_eff = data.length() - align;
  if (t_eff < 1)
    throw LengthError("series of length " + std::to_string(data.length()) +
                      " leaves no rows after lag alignment " +
                      std::to_string(align));

  RegressorBlock block;
  block.columns = nodes;
  block.align_lag = align;
  block.t_eff = t_eff;
  block.matrix.resize(t_eff, static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t j = 0; j < nodes.size(); ++j)
    block.matrix.col(static_cast<Eigen::Index>(j)) =
        aligned_series(data, nodes[j], align);
  return block;
}

Eigen::VectorXd ols(const RegressorBlock& block, const Eigen::VectorXd& y) {
  if (y.size() != block.t_eff)
    throw DimensionError("response length does not match the block");
  if (block.q() == 0) return Eigen::VectorXd();
  if (block.t_eff <= block.q())
    throw LengthError("need more rows than regressors");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(block.matrix);
  const auto& r = qr.matrixR();
  const int q = block.q();
  double rmax = 0.0, rmin = INFINITY;
  for (int j = 0; j < q; ++j) {
    const double d = std::abs(r(j, j));
    rmax = std::max(rmax, d);
    rmin = std::min(rmin, d);
  }
  if (qr.rank() < q || rmin == 0.0 || rmax / rmin > kMaxColumnCondition)
    throw SingularityError(
        "regressor block is rank deficient or ill-conditioned");
  return qr.solve(y);
}

Eigen::VectorXd residualize(const RegressorBlock& block,
                            const Eigen::VectorXd& y) {
  if (block.q() == 0) return y;
  return y - block.matrix * ols(block, y);
}

PartialCorrelationResult partial_correlation_detail(
    const Eigen::VectorXd& x, const Eigen::VectorXd& y,
    const RegressorBlock& block) {
  if (x.size() != block.t_eff || y.size() != block.t_eff)
    throw DimensionError("series are not aligned to the block");

  RegressorBlock centered = block;
  for (int j = 0; j < centered.q(); ++j)
    centered.matrix.col(j).array() -= centered.matrix.col(j).mean();
  Eigen::VectorXd xc = x.array() - x.mean();
  Eigen::VectorXd yc = y.array() - y.mean();

  const double x_ss = xc.squaredNorm(), y_ss = yc.squaredNorm();
  if (x_ss <= 0 || y_ss <= 0)
    throw DegenerateError("constant series has no correlation");

  PartialCorrelationResult out;
  out.x_residual = residualize(centered, xc);
  out.y_residual = residualize(centered, yc);

  const double rx = out.x_residual.squaredNorm();
  const double ry = out.y_residual.squaredNorm();
  if (rx <= 1e-20 * x_ss || ry <= 1e-20 * y_ss)
    throw DegenerateError("residual variance vanishes (series fully explained)");
  out.estimate = out.x_residual.dot(out.y_residual) / std::sqrt(rx * ry);
  out.estimate = std::clamp(out.estimate, -1.0, 1.0);
  return out;
}

double partial_correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                           const RegressorBlock& block) {
  return partial_correlation_detail(x, y, block).estimate;
}

}  // namespace mvtc
