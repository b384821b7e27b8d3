#include "mvtc/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "mvtc/errors.hpp"

namespace mvtc {

namespace {

constexpr double kMaxCondition = 1e12;
constexpr int kSeriesCap = 100000;

/// Gram matrix of lagged nodes from the covariance table.
Eigen::MatrixXd gram_matrix(const CovarianceTable& table,
                            const std::vector<LaggedNode>& nodes) {
  const int q = static_cast<int>(nodes.size());
  Eigen::MatrixXd m(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) m(i, j) = table.moment(nodes[i], nodes[j]);
  return m;
}

int required_tau_max(const std::vector<LaggedNode>& nodes) {
  int lo = 0, hi = 0;
  for (const auto& n : nodes) {
    lo = std::min(lo, n.lag);
    hi = std::max(hi, n.lag);
  }
  return hi - lo;
}

/// Solves G x = b for symmetric PSD G with a condition-number guard.
Eigen::MatrixXd guarded_solve(const Eigen::MatrixXd& g,
                              const Eigen::MatrixXd& b, const char* what) {
  if (g.rows() == 0) return Eigen::MatrixXd::Zero(0, b.cols());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  const auto& ev = eig.eigenvalues();
  const double lo = ev.minCoeff(), hi = ev.maxCoeff();
  if (lo <= 0.0 || hi / lo > kMaxCondition)
    throw SingularityError(std::string(what) +
                           " is singular or ill-conditioned (condition " +
                           std::to_string(lo > 0 ? hi / lo : INFINITY) + ")");
  Eigen::MatrixXd tmp = eig.eigenvectors().transpose() * b;
  tmp.array().colwise() /= ev.array();
  return eig.eigenvectors() * tmp;
}

}  // namespace

PsiSequence psi(const VarModel& model, int n_max) {
  if (n_max < 0) throw DimensionError("n_max must be >= 0");
  const int n = model.n_vars;
  PsiSequence seq;
  seq.matrices.reserve(n_max + 1);
  seq.matrices.push_back(Eigen::MatrixXd::Identity(n, n));
  for (int k = 1; k <= n_max; ++k) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int s = 1; s <= std::min(k, model.order); ++s)
      m.noalias() += model.phi[s - 1] * seq.matrices[k - s];
    seq.matrices.push_back(std::move(m));
  }
  return seq;
}

double CovarianceTable::at(int i, int j, int tau) const {
  if (tau < 0) return at(j, i, -tau);
  if (tau >= static_cast<int>(gammas.size()))
    throw DimensionError("covariance table does not hold lag " +
                         std::to_string(tau));
  return gammas[tau](i, j);
}

double CovarianceTable::moment(LaggedNode u, LaggedNode v) const {
  return at(u.var, v.var, v.lag - u.lag);
}

CovarianceTable lagged_covariance(const VarModel& model, int tau_max,
                                  double tol) {
  if (tau_max < 0) throw DimensionError("tau_max must be >= 0");
  if (tol <= 0) throw ConvergenceError("tol must be positive");
  const auto report = validate_model(model);
  if (!report.sigma_pd)
    throw CovarianceError("sigma is not symmetric positive definite");
  if (!report.stationary)
    throw StationarityError("lagged covariance requires a stationary model");

  const int n = model.n_vars;
  const double sigma_norm = model.sigma.norm();
  const double rho2 = std::min(report.spectral_radius * report.spectral_radius,
                               1.0 - 1e-12);

  CovarianceTable table;
  table.gammas.assign(tau_max + 1, Eigen::MatrixXd::Zero(n, n));

  // psi_window[k] = Psi(n + k) for k = 0..tau_max at the current n
  std::vector<Eigen::MatrixXd> history;  // Psi(0..n+tau_max), grown as needed
  history.push_back(Eigen::MatrixXd::Identity(n, n));
  auto psi_at = [&](int k) -> const Eigen::MatrixXd& {
    while (static_cast<int>(history.size()) <= k) {
      const int m = static_cast<int>(history.size());
      Eigen::MatrixXd next = Eigen::MatrixXd::Zero(n, n);
      for (int s = 1; s <= std::min(m, model.order); ++s)
        next.noalias() += model.phi[s - 1] * history[m - s];
      history.push_back(std::move(next));
    }
    return history[k];
  };

  int quiet_terms = 0;
  double last_term_norm = 0.0;
  for (int k = 0; k < kSeriesCap; ++k) {
    const Eigen::MatrixXd base = model.sigma * psi_at(k).transpose();
    double term_norm = 0.0;
    for (int tau = 0; tau <= tau_max; ++tau) {
      const Eigen::MatrixXd term = psi_at(k + tau) * base;
      table.gammas[tau] += term;
      term_norm = std::max(term_norm, term.norm());
    }
    last_term_norm = term_norm;
    if (term_norm < tol * sigma_norm) {
      if (++quiet_terms >= 3) {
        table.truncation_error = term_norm * rho2 / (1.0 - rho2);
        return table;
      }
    } else {
      quiet_terms = 0;
    }
  }
  const double bound = last_term_norm * rho2 / (1.0 - rho2);
  throw ConvergenceError(
      "covariance series did not meet tolerance within " +
      std::to_string(kSeriesCap) + " terms (tail bound " +
      std::to_string(bound) + ")");
}

SidepathCovariance sidepath_covariance(const VarModel& model,
                                       const TimeSeriesGraph& graph,
                                       LaggedNode source, int target) {
  SidepathCovariance out;
  for (const auto& w : parents(graph, target))
    if (!(w.var == source.var && w.lag == source.lag)) out.w_nodes.push_back(w);

  const int tau = source.lag;
  const auto psis = psi(model, std::max(0, tau));
  out.values.resize(static_cast<Eigen::Index>(out.w_nodes.size()));
  for (std::size_t i = 0; i < out.w_nodes.size(); ++i) {
    const int m = tau - out.w_nodes[i].lag;
    double v = 0.0;
    if (m >= 0) {
      for (int r = 0; r < model.n_vars; ++r)
        v += psis[m](out.w_nodes[i].var, r) * model.sigma(r, source.var);
    }
    out.values[static_cast<Eigen::Index>(i)] = v;
  }
  return out;
}

TheoremQuantities theorem_quantities(const VarModel& model,
                                     const TimeSeriesGraph& graph,
                                     LaggedNode source, int target,
                                     double tol) {
  if (source.lag < 1) throw ConditionError("source lag must be >= 1");
  const int tau = source.lag;

  TheoremQuantities q;
  q.c = tau <= model.order ? model.phi[tau - 1](target, source.var) : 0.0;
  q.sigma_x2 = model.sigma(source.var, source.var);
  q.sigma_y2 = model.sigma(target, target);

  auto side = sidepath_covariance(model, graph, source, target);
  q.w_nodes = side.w_nodes;
  q.sidepath_cov = side.values;
  for (const auto& z : parents(graph, source.var))
    q.z_nodes.push_back({z.var, z.lag + tau});

  double star = 0.0;
  const int nw = static_cast<int>(q.w_nodes.size());
  if (nw > 0) {
    std::vector<LaggedNode> all = q.w_nodes;
    all.insert(all.end(), q.z_nodes.begin(), q.z_nodes.end());
    const auto table = lagged_covariance(model, required_tau_max(all), tol);

    const Eigen::MatrixXd ww = gram_matrix(table, q.w_nodes);
    if (q.z_nodes.empty()) {
      q.schur = ww;
    } else {
      const int nz = static_cast<int>(q.z_nodes.size());
      Eigen::MatrixXd wz(nw, nz);
      for (int i = 0; i < nw; ++i)
        for (int j = 0; j < nz; ++j)
          wz(i, j) = table.moment(q.w_nodes[i], q.z_nodes[j]);
      const Eigen::MatrixXd zz = gram_matrix(table, q.z_nodes);
      q.schur = ww - wz * guarded_solve(zz, wz.transpose(), "E[Z^T Z]");
    }
    star = (q.sidepath_cov.transpose() *
            guarded_solve(q.schur, q.sidepath_cov, "Schur complement S_Z"))(0);
  } else {
    q.schur.resize(0, 0);
  }

  q.cov_xy = q.c * q.sigma_x2 - q.c * star;
  q.var_y = q.sigma_y2 + q.c * q.c * q.sigma_x2 - q.c * q.c * star;
  q.var_x = q.sigma_x2 - star;
  return q;
}

double TheoremQuantities::mit() const {
  if (var_x <= 0 || var_y <= 0)
    throw DegenerateError("residual variance is not positive");
  return cov_xy / std::sqrt(var_y * var_x);
}

double analytic_cross_correlation(const VarModel& model, int x, int y, int tau,
                                  double tol) {
  if (x < 0 || x >= model.n_vars || y < 0 || y >= model.n_vars)
    throw KeyError("variable index out of range");
  const auto table = lagged_covariance(model, std::abs(tau), tol);
  const double vx = table.at(x, x, 0), vy = table.at(y, y, 0);
  if (vx <= 0 || vy <= 0) throw DegenerateError("zero process variance");
  return table.at(x, y, tau) / std::sqrt(vx * vy);
}

double analytic_partial_correlation(const VarModel& model, LaggedNode x,
                                    LaggedNode y,
                                    const std::vector<LaggedNode>& conditions,
                                    double tol) {
  std::vector<LaggedNode> all{x, y};
  all.insert(all.end(), conditions.begin(), conditions.end());
  const auto table = lagged_covariance(model, required_tau_max(all), tol);

  Eigen::Matrix2d head;
  head << table.moment(x, x), table.moment(x, y), table.moment(y, x),
      table.moment(y, y);
  if (!conditions.empty()) {
    const int q = static_cast<int>(conditions.size());
    Eigen::MatrixXd cross(2, q);
    for (int j = 0; j < q; ++j) {
      cross(0, j) = table.moment(x, conditions[j]);
      cross(1, j) = table.moment(y, conditions[j]);
    }
    const Eigen::MatrixXd cc = gram_matrix(table, conditions);
    head -= cross * guarded_solve(cc, cross.transpose(), "condition Gram");
  }
  if (head(0, 0) <= 0 || head(1, 1) <= 0)
    throw DegenerateError("conditional variance is not positive");
  return head(0, 1) / std::sqrt(head(0, 0) * head(1, 1));
}

Eigen::VectorXd analytic_regression(const VarModel& model, int target,
                                    const std::vector<LaggedNode>& regressors,
                                    double tol) {
  if (regressors.empty()) return Eigen::VectorXd();
  const LaggedNode y{target, 0};
  std::vector<LaggedNode> all{y};
  all.insert(all.end(), regressors.begin(), regressors.end());
  const auto table = lagged_covariance(model, required_tau_max(all), tol);

  const Eigen::MatrixXd uu = gram_matrix(table, regressors);
  Eigen::VectorXd uy(regressors.size());
  for (std::size_t j = 0; j < regressors.size(); ++j)
    uy[static_cast<Eigen::Index>(j)] = table.moment(regressors[j], y);
  return guarded_solve(uu, uy, "E[U^T U]");
}

}  // namespace mvtc
