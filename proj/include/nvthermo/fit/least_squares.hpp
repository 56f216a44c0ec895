#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nvthermo/errors.hpp"
#include "nvthermo/spectrum.hpp"

namespace nvthermo::fit {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// A scalar curve y = f(x; p) with an analytic gradient with respect to p.
template <class M>
concept CurveModel = requires(const M& m, double x, const VectorXd& p, VectorXd& g) {
  { m.arity() } -> std::convertible_to<std::size_t>;
  { m.value(x, p) } -> std::convertible_to<double>;
  m.gradient(x, p, g);
};

struct FitResult {
  VectorXd params;
  MatrixXd covariance;
  double residual_norm = 0.0;  // sqrt(sum w (y - f)^2)
  int n_iterations = 0;
  bool converged = false;
  bool rank_deficient = false;
  std::size_t dof = 0;
  std::vector<double> residuals;  // y - f, unweighted

  double stderr_of(std::size_t i) const { return std::sqrt(std::max(0.0, covariance(i, i))); }
  double reduced_chi2() const { return dof > 0 ? residual_norm * residual_norm / double(dof) : 0.0; }
};

struct FitOptions {
  int max_iterations = 500;
  double lambda0 = 1e-3;
  double relative_tolerance = 1e-10;  // on the residual norm, per accepted step
  double gradient_tolerance = 1e-10;
  /// Scale (J^T W J)^-1 by the reduced chi-square.
  bool scale_covariance = true;
  /// Return a pseudo-inverse covariance instead of throwing RankDeficiency.
  bool allow_rank_deficient = false;
  /// Reciprocal condition number of the column-scaled normal matrix below
  /// which the problem is treated as rank deficient.
  double rank_tolerance = 1e-12;
};

namespace detail {

template <CurveModel M>
void evaluate(const M& model, std::span<const double> x, std::span<const double> y,
              std::span<const double> w, const VectorXd& p, VectorXd& r, MatrixXd& j) {
  const std::size_t n = x.size();
  VectorXd g(model.arity());
  for (std::size_t i = 0; i < n; ++i) {
    const double sw = std::sqrt(w[i]);
    r[i] = sw * (y[i] - model.value(x[i], p));
    model.gradient(x[i], p, g);
    j.row(i) = sw * g.transpose();
  }
}

template <CurveModel M>
double weighted_cost(const M& model, std::span<const double> x, std::span<const double> y,
                     std::span<const double> w, const VectorXd& p) {
  double c = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = y[i] - model.value(x[i], p);
    c += w[i] * d * d;
  }
  return c;
}

/// Inverse (or pseudo-inverse) of a normal matrix through its column-scaled
/// eigen-decomposition. Sets `deficient` when the scaled condition is too poor.
inline MatrixXd invert_normal_matrix(const MatrixXd& a, double rank_tolerance, bool& deficient) {
  const Eigen::Index p = a.rows();
  VectorXd scale(p);
  deficient = false;
  for (Eigen::Index i = 0; i < p; ++i) {
    scale[i] = std::sqrt(std::max(a(i, i), 0.0));
    if (scale[i] == 0.0) {
      deficient = true;
      scale[i] = 1.0;
    }
  }
  const MatrixXd scaled = scale.asDiagonal().inverse() * a * scale.asDiagonal().inverse();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(scaled);
  const VectorXd ev = es.eigenvalues();
  const double max_ev = ev.cwiseAbs().maxCoeff();
  if (!(max_ev > 0.0) || ev.minCoeff() <= rank_tolerance * max_ev) deficient = true;
  VectorXd inv_ev(p);
  for (Eigen::Index i = 0; i < p; ++i) inv_ev[i] = ev[i] > rank_tolerance * max_ev ? 1.0 / ev[i] : 0.0;
  const MatrixXd scaled_inv = es.eigenvectors() * inv_ev.asDiagonal() * es.eigenvectors().transpose();
  return scale.asDiagonal().inverse() * scaled_inv * scale.asDiagonal().inverse();
}

template <CurveModel M>
FitResult finish(const M& model, std::span<const double> x, std::span<const double> y, std::span<const double>,
                 const VectorXd& p, const MatrixXd& normal, double cost, const FitOptions& opt) {
  const std::size_t n = x.size();
  const std::size_t np = model.arity();
  FitResult res;
  res.params = p;
  res.residual_norm = std::sqrt(cost);
  res.dof = n > np ? n - np : 0;
  res.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.residuals[i] = y[i] - model.value(x[i], p);

  bool deficient = false;
  const MatrixXd inv = invert_normal_matrix(normal, opt.rank_tolerance, deficient);
  if (deficient && !opt.allow_rank_deficient) {
    throw RankDeficiency("normal equations are singular at the solution; parameters are not identifiable");
  }
  res.rank_deficient = deficient;
  const double sigma2 = opt.scale_covariance && res.dof > 0 ? cost / double(res.dof) : 1.0;
  res.covariance = sigma2 * inv;
  return res;
}

}  // namespace detail

/// Levenberg-Marquardt minimization of sum_i w_i (y_i - f(x_i; p))^2.
///
/// Damping uses Marquardt's diagonal scaling, starting at lambda0 and moving by a
/// factor of ten on each rejected or accepted step. Convergence is declared when
/// an accepted step reduces the residual norm by less than relative_tolerance,
/// when the gradient falls below gradient_tolerance, or when no step can reduce
/// the cost any further. Hitting max_iterations returns converged = false.
/// A singular normal matrix at the solution throws RankDeficiency unless
/// allow_rank_deficient is set.
template <CurveModel M>
FitResult fit_least_squares(const M& model, std::span<const double> x, std::span<const double> y,
                            const VectorXd& init, std::span<const double> weights = {},
                            const FitOptions& opt = {}) {
  const std::size_t n = x.size();
  const std::size_t np = model.arity();
  if (n == 0) throw InvalidInput("no data to fit");
  if (y.size() != n) throw InvalidInput("x and y differ in length");
  if (static_cast<std::size_t>(init.size()) != np) throw InvalidInput("initial parameter vector has wrong length");
  std::vector<double> unit;
  if (weights.empty()) {
    unit.assign(n, 1.0);
    weights = unit;
  }
  if (weights.size() != n) throw InvalidInput("weights and data differ in length");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidInput("weights must be finite and >= 0");

  VectorXd p = init;
  VectorXd r(n);
  MatrixXd j(n, np);
  detail::evaluate(model, x, y, weights, p, r, j);
  double cost = r.squaredNorm();
  if (!std::isfinite(cost)) throw NumericalError("initial residual is not finite");
  MatrixXd a = j.transpose() * j;
  VectorXd g = j.transpose() * r;

  double lambda = opt.lambda0;
  bool converged = g.cwiseAbs().maxCoeff() <= opt.gradient_tolerance || cost == 0.0;
  int it = 0;
  while (!converged && it < opt.max_iterations) {
    ++it;
    MatrixXd damped = a;
    for (std::size_t k = 0; k < np; ++k) damped(k, k) += lambda * std::max(a(k, k), 1e-300);
    const VectorXd step = damped.ldlt().solve(g);
    if (!step.allFinite()) {
      lambda *= 10.0;
      if (lambda > 1e20) converged = true;
      continue;
    }
    const VectorXd trial = p + step;
    const double trial_cost = detail::weighted_cost(model, x, y, weights, trial);
    if (std::isfinite(trial_cost) && trial_cost < cost) {
      const double old_norm = std::sqrt(cost);
      p = trial;
      detail::evaluate(model, x, y, weights, p, r, j);
      cost = r.squaredNorm();
      a = j.transpose() * j;
      g = j.transpose() * r;
      lambda = std::max(lambda / 10.0, 1e-15);
      const double new_norm = std::sqrt(cost);
      if ((old_norm - new_norm) <= opt.relative_tolerance * old_norm ||
          g.cwiseAbs().maxCoeff() <= opt.gradient_tolerance || cost == 0.0 ||
          step.norm() <= 1e-15 * (p.norm() + 1e-15)) {
        converged = true;
      }
    } else {
      lambda *= 10.0;
      // No damping level reduces the cost: the current point is stationary
      // to working precision.
      if (lambda > 1e20) converged = true;
    }
  }

  FitResult res = detail::finish(model, x, y, weights, p, a, cost, opt);
  res.n_iterations = it;
  res.converged = converged;
  return res;
}

/// Residuals and covariance of `model` at fixed parameters `p`, with no
/// iterations. Used to report a fit found in another parameterization.
template <CurveModel M>
FitResult evaluate_at(const M& model, std::span<const double> x, std::span<const double> y, const VectorXd& p,
                      std::span<const double> weights, const FitOptions& opt = {}) {
  const std::size_t n = x.size();
  if (y.size() != n || weights.size() != n) throw InvalidInput("data and weights differ in length");
  VectorXd r(n);
  MatrixXd j(n, model.arity());
  detail::evaluate(model, x, y, weights, p, r, j);
  FitResult res = detail::finish(model, x, y, weights, p, MatrixXd(j.transpose() * j), r.squaredNorm(), opt);
  res.converged = true;
  return res;
}

template <CurveModel M>
FitResult fit_least_squares(const M& model, const Spectrum& data, const VectorXd& init,
                            std::span<const double> weights = {}, const FitOptions& opt = {}) {
  data.validate();
  return fit_least_squares(model, std::span<const double>(data.axis), std::span<const double>(data.counts),
                           init, weights, opt);
}

/// Poisson weights 1 / max(counts, 1).
inline std::vector<double> poisson_weights(std::span<const double> counts) {
  std::vector<double> w(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) w[i] = 1.0 / std::max(counts[i], 1.0);
  return w;
}

struct LinearFit {
  VectorXd coef;
  MatrixXd covariance;
  double rss = 0.0;  // weighted
  std::size_t dof = 0;

  double stderr_of(std::size_t i) const { return std::sqrt(std::max(0.0, covariance(i, i))); }
};

/// Weighted ordinary least squares for y ~ X b via column-pivoted QR on a
/// column-scaled design. Covariance is s^2 (X^T W X)^-1 with s^2 = RSS / dof
/// (zero when dof = 0).
inline LinearFit linear_least_squares(const MatrixXd& design, const VectorXd& y,
                                      const VectorXd& weights = VectorXd()) {
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  if (y.size() != n) throw InvalidInput("design and response differ in length");
  if (n < p) throw RankDeficiency("fewer observations than coefficients");
  VectorXd sw = weights.size() == 0 ? VectorXd::Ones(n) : VectorXd(weights.cwiseSqrt());
  if (sw.size() != n) throw InvalidInput("weights and response differ in length");

  MatrixXd xw = sw.asDiagonal() * design;
  const VectorXd yw = sw.cwiseProduct(y);
  VectorXd scale(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    scale[k] = xw.col(k).norm();
    if (scale[k] == 0.0) throw RankDeficiency("design column " + std::to_string(k) + " is identically zero");
    xw.col(k) /= scale[k];
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(xw);
  qr.setThreshold(1e-12);
  if (qr.rank() < p) throw RankDeficiency("design matrix is rank deficient");

  LinearFit out;
  const VectorXd b_scaled = qr.solve(yw);
  out.coef = b_scaled.cwiseQuotient(scale);
  const VectorXd resid = yw - xw * b_scaled;
  out.rss = resid.squaredNorm();
  out.dof = static_cast<std::size_t>(n - p);

  const MatrixXd r = qr.matrixR().topLeftCorner(p, p).template triangularView<Eigen::Upper>();
  const MatrixXd r_inv = r.template triangularView<Eigen::Upper>().solve(MatrixXd::Identity(p, p));
  const MatrixXd perm = qr.colsPermutation();
  const MatrixXd cov_scaled = perm * (r_inv * r_inv.transpose()) * perm.transpose();
  const double s2 = out.dof > 0 ? out.rss / double(out.dof) : 0.0;
  out.covariance = s2 * scale.asDiagonal().inverse() * cov_scaled * scale.asDiagonal().inverse();
  return out;
}

}  // namespace nvthermo::fit
