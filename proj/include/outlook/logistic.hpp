#ifndef OUTLOOK_LOGISTIC_HPP_
#define OUTLOOK_LOGISTIC_HPP_

#include "outlook/common.hpp"
#include "outlook/optim.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace outlook
{

template <typename Scalar>
Scalar sigmoid(Scalar z)
{
  if (z >= 0) return Scalar(1) / (Scalar(1) + std::exp(-z));
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

/// log(1 + exp(z)) without overflow.
template <typename Scalar>
Scalar softplus(Scalar z)
{
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

enum class Penalty { l2, l1 };
enum class Solver { automatic, newton, lbfgs };

struct ConvergenceRecord
{
  int iterations = 0;
  double loss = 0;
  double gradient_norm = 0;
  double relative_change = 0;
  std::string solver;
};

struct LogisticOptions
{
  double lambda = 1.0;
  Penalty penalty = Penalty::l2;
  Solver solver = Solver::automatic;
  /// Newton is used up to this many parameters under Solver::automatic, L-BFGS beyond.
  Eigen::Index newton_max_parameters = 2500;
  StopCriteria stop{};
  std::uint64_t seed = 0;
};

/// Binary logistic classifier, Pr(y=1 | x) = sigmoid(w.x + b).
template <typename Scalar>
struct LogisticModel
{
  VectorX<Scalar> weights;
  Scalar bias = 0;
  Scalar lambda = 0;
  Penalty penalty = Penalty::l2;
  ConvergenceRecord convergence;
  bool trained = false;

  Eigen::Index dimension() const { return weights.size(); }

  template <typename Derived>
  Scalar logit(const Eigen::MatrixBase<Derived>& x) const
  {
    check_dimension(x.size());
    return x.dot(weights) + bias;
  }

  template <typename Derived>
  Scalar probability(const Eigen::MatrixBase<Derived>& x) const
  {
    return sigmoid(logit(x));
  }

  /// One probability per row of X.
  template <typename Derived>
  VectorX<Scalar> probabilities(const Eigen::MatrixBase<Derived>& X) const
  {
    check_dimension(X.cols());
    VectorX<Scalar> z = X * weights;
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = sigmoid(z(i) + bias);
    return z;
  }

  void check_dimension(Eigen::Index d) const
  {
    if (d != weights.size())
      throw DimensionError("model dimension " + std::to_string(weights.size()) + " vs input " + std::to_string(d));
  }
};

/// Penalized negative log-likelihood over parameters theta = [w; b]:
///   sum_i softplus(z_i) - y_i z_i + lambda/2 |w|^2,  z_i = x_i.w + b.
/// The intercept is not penalized. Gradient and Hessian are filled when requested.
template <typename Scalar, typename DerivedX>
Scalar logistic_objective(const Eigen::MatrixBase<DerivedX>& X, const Eigen::VectorXi& y, const VectorX<Scalar>& theta,
                          Scalar lambda, VectorX<Scalar>* grad = nullptr, MatrixX<Scalar>* hess = nullptr)
{
  const Eigen::Index n = X.rows(), d = X.cols();
  const auto w = theta.head(d);
  const Scalar b = theta(d);
  const VectorX<Scalar> z = (X * w).array() + b;
  Scalar loss = Scalar(0.5) * lambda * w.squaredNorm();
  VectorX<Scalar> resid(n), curv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    loss += softplus(z(i)) - (y(i) ? z(i) : Scalar(0));
    const Scalar p = sigmoid(z(i));
    resid(i) = p - Scalar(y(i));
    curv(i) = p * (Scalar(1) - p);
  }
  if (grad) {
    grad->resize(d + 1);
    grad->head(d) = X.transpose() * resid + lambda * w;
    (*grad)(d) = resid.sum();
  }
  if (hess) {
    hess->resize(d + 1, d + 1);
    MatrixX<Scalar> Xa(n, d + 1);
    Xa.leftCols(d) = X;
    Xa.col(d).setOnes();
    *hess = Xa.transpose() * (Xa.array().colwise() * curv.array()).matrix();
    hess->diagonal().head(d).array() += lambda;
  }
  return loss;
}

namespace detail
{

template <typename Scalar>
Scalar soft_threshold(Scalar v, Scalar t)
{
  return v > t ? v - t : (v < -t ? v + t : Scalar(0));
}

/// Proximal gradient (FISTA) for the L1-penalized logistic loss; intercept unpenalized.
template <typename Scalar, typename DerivedX>
OptimResult<Scalar> fit_logistic_l1(const Eigen::MatrixBase<DerivedX>& X, const Eigen::VectorXi& y, Scalar lambda,
                                    const StopCriteria& stop)
{
  const Eigen::Index d = X.cols();
  auto smooth = [&](const VectorX<Scalar>& th, VectorX<Scalar>* g) { return logistic_objective<Scalar>(X, y, th, Scalar(0), g); };
  auto penalty = [&](const VectorX<Scalar>& th) { return lambda * th.head(d).template lpNorm<1>(); };
  VectorX<Scalar> x = VectorX<Scalar>::Zero(d + 1), v = x, g(d + 1);
  Scalar t = 1, step = 1;
  OptimResult<Scalar> r;
  Scalar f_prev = smooth(x, nullptr) + penalty(x);
  const int max_it = std::max(stop.max_iterations, 5000);
  for (int it = 0; it < max_it; ++it) {
    const Scalar fv = smooth(v, &g);
    VectorX<Scalar> next;
    for (int ls = 0; ls < 60; ++ls) {
      next = v - step * g;
      for (Eigen::Index k = 0; k < d; ++k) next(k) = soft_threshold(next(k), step * lambda);
      const VectorX<Scalar> diff = next - v;
      if (smooth(next, nullptr) <= fv + g.dot(diff) + diff.squaredNorm() / (2 * step)) break;
      step /= 2;
    }
    const Scalar t_next = (1 + std::sqrt(1 + 4 * t * t)) / 2;
    v = next + ((t - 1) / t_next) * (next - x);
    x = std::move(next);
    t = t_next;
    const Scalar f = smooth(x, nullptr) + penalty(x);
    check_finite_loss(f, it + 1);
    r.iterations = it + 1;
    r.relative_change = relative_change(f_prev, f);
    f_prev = f;
    if (r.relative_change <= stop.relative_tolerance) {
      r.converged = true;
      break;
    }
  }
  // Optimality gap: smooth gradient plus the closest subgradient of the penalty.
  smooth(x, &g);
  for (Eigen::Index k = 0; k < d; ++k)
    g(k) = x(k) != 0 ? g(k) + lambda * (x(k) > 0 ? 1 : -1) : soft_threshold(g(k), lambda);
  r.gradient_norm = g.norm();
  r.loss = f_prev;
  r.x = std::move(x);
  return r;
}

}  // namespace detail

/// Fits the regularized logistic regression on rows of X with labels y in {0,1}.
/// Throws on a missing class, on lambda = 0 with fewer rows than columns, or when the
/// optimizer fails to converge.
template <typename Scalar = double, typename DerivedX>
LogisticModel<Scalar> train_logistic(const Eigen::MatrixBase<DerivedX>& X, const Eigen::VectorXi& y,
                                     const LogisticOptions& opts = {})
{
  const Eigen::Index n = X.rows(), d = X.cols();
  if (y.size() != n) throw DimensionError("labels/rows mismatch");
  if (d == 0) throw DimensionError("zero-dimensional features");
  if (!X.allFinite()) throw Error("non-finite feature value");
  Eigen::Index positives = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y(i) != 0 && y(i) != 1) throw Error("labels must be 0 or 1");
    positives += y(i);
  }
  if (positives == 0 || positives == n) throw Error("training data needs at least one example per class");
  if (opts.lambda < 0) throw Error("lambda must be non-negative");
  if (opts.lambda == 0 && n < d) throw Error("ill-posed without regularization: " + std::to_string(n) + " rows, " +
                                             std::to_string(d) + " features");

  const Scalar lambda = static_cast<Scalar>(opts.lambda);
  OptimResult<Scalar> res;
  std::string solver;
  if (opts.penalty == Penalty::l1) {
    res = detail::fit_logistic_l1<Scalar>(X, y, lambda, opts.stop);
    solver = "fista";
  } else {
    const bool newton = opts.solver == Solver::newton ||
                        (opts.solver == Solver::automatic && d + 1 <= opts.newton_max_parameters);
    VectorX<Scalar> theta0 = VectorX<Scalar>::Zero(d + 1);
    if (newton) {
      res = minimize_newton<Scalar>(
          [&](const VectorX<Scalar>& th, VectorX<Scalar>* g, MatrixX<Scalar>* H) {
            return logistic_objective<Scalar>(X, y, th, lambda, g, H);
          },
          theta0, opts.stop);
      solver = "newton";
    } else {
      res = minimize_lbfgs<Scalar>(
          [&](const VectorX<Scalar>& th, VectorX<Scalar>* g) { return logistic_objective<Scalar>(X, y, th, lambda, g); },
          theta0, opts.stop);
      solver = "lbfgs";
    }
  }
  if (!res.converged)
    throw NonConvergence("logistic regression did not converge after " + std::to_string(res.iterations) +
                         " iterations (gradient norm " + format_sci(static_cast<double>(res.gradient_norm)) +
                         ", relative loss change " + format_sci(static_cast<double>(res.relative_change)) + ")");

  LogisticModel<Scalar> m;
  m.weights = res.x.head(d);
  m.bias = res.x(d);
  m.lambda = lambda;
  m.penalty = opts.penalty;
  m.convergence = {res.iterations, static_cast<double>(res.loss), static_cast<double>(res.gradient_norm),
                   static_cast<double>(res.relative_change), solver};
  m.trained = true;
  return m;
}

struct LambdaSelection
{
  double lambda = 1.0;
  std::vector<double> grid;
  std::vector<double> mean_log_loss;  // held-out, one per grid entry
};

/// Seeded stratified k-fold cross-validation of lambda by mean held-out log loss. Ties keep
/// the earlier grid entry. Each fold must leave both classes in the training part.
template <typename Scalar = double, typename DerivedX>
LambdaSelection select_lambda_cv(const Eigen::MatrixBase<DerivedX>& X, const Eigen::VectorXi& y,
                                 std::vector<double> grid = {1e-3, 1e-2, 1e-1, 1, 1e1, 1e2, 1e3}, int folds = 5,
                                 std::uint64_t seed = 0, const LogisticOptions& base = {})
{
  const Eigen::Index n = X.rows();
  if (y.size() != n) throw DimensionError("labels/rows mismatch");
  if (grid.empty()) throw Error("empty lambda grid");
  if (folds < 2 || folds > n) throw Error("fold count must lie in [2, rows]");
  std::vector<int> fold_of(static_cast<std::size_t>(n), 0);
  Rng rng(mix_seed(seed, 0xcf));
  for (int cls : {0, 1}) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index i = 0; i < n; ++i)
      if (y(i) == cls) members.push_back(i);
    if (static_cast<int>(members.size()) < folds) throw Error("each class needs at least one example per fold");
    seeded_shuffle(members, rng);
    for (std::size_t k = 0; k < members.size(); ++k) fold_of[static_cast<std::size_t>(members[k])] = static_cast<int>(k % folds);
  }

  LambdaSelection out;
  out.grid = grid;
  double best = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    double loss = 0;
    for (int f = 0; f < folds; ++f) {
      std::vector<Eigen::Index> train, test;
      for (Eigen::Index i = 0; i < n; ++i) (fold_of[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
      MatrixX<Scalar> Xtr(static_cast<Eigen::Index>(train.size()), X.cols());
      Eigen::VectorXi ytr(static_cast<Eigen::Index>(train.size()));
      for (std::size_t k = 0; k < train.size(); ++k) {
        Xtr.row(static_cast<Eigen::Index>(k)) = X.row(train[k]).template cast<Scalar>();
        ytr(static_cast<Eigen::Index>(k)) = y(train[k]);
      }
      LogisticOptions opts = base;
      opts.lambda = lambda;
      const auto m = train_logistic<Scalar>(Xtr, ytr, opts);
      for (auto i : test) {
        const Scalar z = m.logit(X.row(i).transpose().template cast<Scalar>());
        loss += static_cast<double>(softplus(z) - (y(i) == 1 ? z : Scalar(0)));
      }
    }
    loss /= static_cast<double>(n);
    out.mean_log_loss.push_back(loss);
    if (loss < best) {
      best = loss;
      out.lambda = lambda;
    }
  }
  return out;
}

/// Softmax classifier over T classes. Class 0 is the reference class: its weight column and
/// bias are fixed at zero, which makes T = 2 coincide with the binary model at equal lambda.
template <typename Scalar>
struct MultinomialModel
{
  std::vector<std::string> classes;
  MatrixX<Scalar> weights;  // D x T, column 0 zero
  VectorX<Scalar> biases;   // T, entry 0 zero
  Scalar lambda = 0;
  ConvergenceRecord convergence;

  Eigen::Index dimension() const { return weights.rows(); }
  Eigen::Index num_classes() const { return weights.cols(); }

  template <typename Derived>
  VectorX<Scalar> probabilities(const Eigen::MatrixBase<Derived>& x) const
  {
    if (x.size() != weights.rows())
      throw DimensionError("model dimension " + std::to_string(weights.rows()) + " vs input " + std::to_string(x.size()));
    VectorX<Scalar> z = weights.transpose() * x + biases;
    z.array() -= z.maxCoeff();
    z = z.array().exp();
    return z / z.sum();
  }

  /// N x T matrix of class probabilities.
  template <typename Derived>
  MatrixX<Scalar> probabilities_rows(const Eigen::MatrixBase<Derived>& X) const
  {
    if (X.cols() != weights.rows())
      throw DimensionError("model dimension " + std::to_string(weights.rows()) + " vs input " + std::to_string(X.cols()));
    MatrixX<Scalar> Z = (X * weights).rowwise() + biases.transpose();
    for (Eigen::Index i = 0; i < Z.rows(); ++i) {
      Z.row(i).array() -= Z.row(i).maxCoeff();
      Z.row(i) = Z.row(i).array().exp();
      Z.row(i) /= Z.row(i).sum();
    }
    return Z;
  }
};

/// Multinomial objective over theta holding one [w_k; b_k] block (size D+1) per
/// non-reference class k = 1..T-1. Labels are class indices 0..T-1.
template <typename Scalar, typename DerivedX>
Scalar multinomial_objective(const Eigen::MatrixBase<DerivedX>& X, const Eigen::VectorXi& y, Eigen::Index T,
                             const VectorX<Scalar>& theta, Scalar lambda, VectorX<Scalar>* grad = nullptr,
                             MatrixX<Scalar>* hess = nullptr)
{
  const Eigen::Index n = X.rows(), d = X.cols(), b = d + 1, K = T - 1;
  MatrixX<Scalar> Z(n, T);
  Z.col(0).setZero();
  Scalar loss = 0;
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto blk = theta.segment(k * b, b);
    Z.col(k + 1) = (X * blk.head(d)).array() + blk(d);
    loss += Scalar(0.5) * lambda * blk.head(d).squaredNorm();
  }
  MatrixX<Scalar> P(n, T);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar m = Z.row(i).maxCoeff();
    const auto e = (Z.row(i).array() - m).exp();
    const Scalar s = e.sum();
    loss += m + std::log(s) - Z(i, y(i));
    P.row(i) = e / s;
  }
  if (grad || hess) {
    MatrixX<Scalar> Xa(n, b);
    Xa.leftCols(d) = X;
    Xa.col(d).setOnes();
    if (grad) {
      grad->resize(K * b);
      for (Eigen::Index k = 0; k < K; ++k) {
        VectorX<Scalar> r = P.col(k + 1);
        for (Eigen::Index i = 0; i < n; ++i)
          if (y(i) == k + 1) r(i) -= 1;
        grad->segment(k * b, b) = Xa.transpose() * r;
        grad->segment(k * b, d) += lambda * theta.segment(k * b, d);
      }
    }
    if (hess) {
      hess->resize(K * b, K * b);
      for (Eigen::Index j = 0; j < K; ++j) {
        for (Eigen::Index k = j; k < K; ++k) {
          VectorX<Scalar> c = -(P.col(j + 1).array() * P.col(k + 1).array()).matrix();
          if (j == k) c += P.col(j + 1);
          MatrixX<Scalar> block = Xa.transpose() * (Xa.array().colwise() * c.array()).matrix();
          if (j == k) block.diagonal().head(d).array() += lambda;
          hess->block(j * b, k * b, b, b) = block;
          if (j != k) hess->block(k * b, j * b, b, b) = block.transpose();
        }
      }
    }
  }
  return loss;
}

/// Fits the L2-regularized multinomial logistic regression. Every class needs at least one
/// example; T = class_names.size() >= 2.
template <typename Scalar = double, typename DerivedX>
MultinomialModel<Scalar> train_multinomial(const Eigen::MatrixBase<DerivedX>& X, const Eigen::VectorXi& y,
                                           std::vector<std::string> class_names, const LogisticOptions& opts = {})
{
  const Eigen::Index n = X.rows(), d = X.cols();
  const auto T = static_cast<Eigen::Index>(class_names.size());
  if (T < 2) throw Error("multinomial model needs at least two classes");
  if (y.size() != n) throw DimensionError("labels/rows mismatch");
  if (!X.allFinite()) throw Error("non-finite feature value");
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(T), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y(i) < 0 || y(i) >= T) throw Error("class label out of range");
    ++counts[static_cast<std::size_t>(y(i))];
  }
  for (Eigen::Index k = 0; k < T; ++k)
    if (counts[static_cast<std::size_t>(k)] == 0) throw Error("empty class '" + class_names[static_cast<std::size_t>(k)] + "'");
  if (opts.lambda == 0 && n < d) throw Error("ill-posed without regularization");

  const Scalar lambda = static_cast<Scalar>(opts.lambda);
  const Eigen::Index P = (T - 1) * (d + 1);
  const bool newton =
      opts.solver == Solver::newton || (opts.solver == Solver::automatic && P <= opts.newton_max_parameters);
  VectorX<Scalar> theta0 = VectorX<Scalar>::Zero(P);
  OptimResult<Scalar> res;
  if (newton) {
    res = minimize_newton<Scalar>(
        [&](const VectorX<Scalar>& th, VectorX<Scalar>* g, MatrixX<Scalar>* H) {
          return multinomial_objective<Scalar>(X, y, T, th, lambda, g, H);
        },
        theta0, opts.stop);
  } else {
    StopCriteria stop = opts.stop;
    stop.max_iterations = std::max(stop.max_iterations, 2000);
    res = minimize_lbfgs<Scalar>(
        [&](const VectorX<Scalar>& th, VectorX<Scalar>* g) { return multinomial_objective<Scalar>(X, y, T, th, lambda, g); },
        theta0, stop);
  }
  if (!res.converged)
    throw NonConvergence("multinomial regression did not converge after " + std::to_string(res.iterations) +
                         " iterations (gradient norm " + format_sci(static_cast<double>(res.gradient_norm)) + ")");

  MultinomialModel<Scalar> m;
  m.classes = std::move(class_names);
  m.weights = MatrixX<Scalar>::Zero(d, T);
  m.biases = VectorX<Scalar>::Zero(T);
  for (Eigen::Index k = 0; k + 1 < T; ++k) {
    m.weights.col(k + 1) = res.x.segment(k * (d + 1), d);
    m.biases(k + 1) = res.x(k * (d + 1) + d);
  }
  m.lambda = lambda;
  m.convergence = {res.iterations, static_cast<double>(res.loss), static_cast<double>(res.gradient_norm),
                   static_cast<double>(res.relative_change), newton ? "newton" : "lbfgs"};
  return m;
}

}  // namespace outlook

#endif  // OUTLOOK_LOGISTIC_HPP_
