#ifndef OUTLOOK_OPTIM_HPP_
#define OUTLOOK_OPTIM_HPP_

#include "outlook/common.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <string>

namespace outlook
{

struct StopCriteria
{
  int max_iterations = 200;
  double gradient_tolerance = 1e-7;
  double relative_tolerance = 1e-10;
};

template <typename Scalar>
struct OptimResult
{
  VectorX<Scalar> x;
  Scalar loss = 0;
  Scalar gradient_norm = 0;
  Scalar relative_change = 0;
  int iterations = 0;
  bool converged = false;
};

class NonConvergence : public Error
{
 public:
  using Error::Error;
};

/// Scientific notation for diagnostics.
inline std::string format_sci(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

namespace detail
{

template <typename Scalar>
void check_finite_loss(Scalar f, int iteration)
{
  if (!std::isfinite(static_cast<double>(f)))
    throw Error("non-finite loss at iteration " + std::to_string(iteration));
}

template <typename Scalar>
Scalar relative_change(Scalar before, Scalar after)
{
  using std::abs;
  using std::max;
  return abs(before - after) / max(abs(before), Scalar(1));
}

/// Armijo sufficient decrease, relaxed by the rounding resolution of the loss: once the
/// predicted decrease is below it, steps that do not measurably increase the loss pass.
template <typename Scalar>
bool sufficient_decrease(Scalar f_new, Scalar f, Scalar step, Scalar slope)
{
  using std::abs;
  using std::max;
  if (!std::isfinite(static_cast<double>(f_new))) return false;
  const Scalar noise = 16 * std::numeric_limits<Scalar>::epsilon() * max(abs(f), Scalar(1));
  return f_new <= f + Scalar(1e-4) * step * slope || (-step * slope <= noise && f_new <= f + noise);
}

}  // namespace detail

/// Damped Newton with Armijo backtracking. `f(x, grad, hess)` returns the loss and fills
/// gradient and Hessian when the pointers are non-null. Deterministic for fixed input.
template <typename Scalar, typename Objective>
OptimResult<Scalar> minimize_newton(Objective&& f, VectorX<Scalar> x, const StopCriteria& stop)
{
  const Eigen::Index n = x.size();
  VectorX<Scalar> g(n);
  MatrixX<Scalar> H(n, n);
  OptimResult<Scalar> r;
  r.relative_change = std::numeric_limits<Scalar>::infinity();
  Scalar fx = f(x, &g, &H);
  detail::check_finite_loss(fx, 0);
  for (int it = 0;; ++it) {
    r.iterations = it;
    r.gradient_norm = g.norm();
    if (r.gradient_norm <= stop.gradient_tolerance) {
      r.converged = true;
      break;
    }
    if (it >= stop.max_iterations) break;

    VectorX<Scalar> d;
    Scalar damping = 0;
    for (int attempt = 0; attempt < 30; ++attempt) {
      MatrixX<Scalar> Hd = H;
      if (damping > 0) Hd.diagonal().array() += damping;
      Eigen::LDLT<MatrixX<Scalar>> ldlt(Hd);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        d = ldlt.solve(-g);
        if (d.allFinite() && d.dot(g) < 0) break;
      }
      damping = damping == 0 ? Scalar(1e-8) * std::max(Scalar(1), H.diagonal().cwiseAbs().maxCoeff()) : damping * 10;
      d.resize(0);
    }
    if (d.size() == 0) d = -g;

    const Scalar slope = g.dot(d);
    Scalar step = 1;
    Scalar f_new = 0;
    bool accepted = false;
    VectorX<Scalar> x_new;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + step * d;
      f_new = f(x_new, nullptr, nullptr);
      if (detail::sufficient_decrease(f_new, fx, step, slope)) {
        accepted = true;
        break;
      }
      step /= 2;
    }
    if (!accepted) {
      // no representable decrease left
      r.converged = r.relative_change <= stop.relative_tolerance;
      break;
    }
    r.relative_change = detail::relative_change(fx, f_new);
    x = std::move(x_new);
    fx = f(x, &g, &H);
    detail::check_finite_loss(fx, it + 1);
  }
  r.x = std::move(x);
  r.loss = fx;
  return r;
}

/// Limited-memory BFGS with Armijo backtracking. `f(x, grad)` returns the loss and fills the
/// gradient when non-null. Like the Newton solver it stops on the gradient tolerance; the
/// relative loss change only decides convergence once no representable decrease is left.
template <typename Scalar, typename Objective>
OptimResult<Scalar> minimize_lbfgs(Objective&& f, VectorX<Scalar> x, const StopCriteria& stop, int history = 10)
{
  const Eigen::Index n = x.size();
  VectorX<Scalar> g(n);
  OptimResult<Scalar> r;
  r.relative_change = std::numeric_limits<Scalar>::infinity();
  Scalar fx = f(x, &g);
  detail::check_finite_loss(fx, 0);
  std::deque<VectorX<Scalar>> S, Y;
  std::deque<Scalar> rho;
  for (int it = 0;; ++it) {
    r.iterations = it;
    r.gradient_norm = g.norm();
    if (r.gradient_norm <= stop.gradient_tolerance) {
      r.converged = true;
      break;
    }
    if (it >= stop.max_iterations) break;

    // two-loop recursion
    VectorX<Scalar> q = g;
    std::vector<Scalar> alpha(S.size());
    for (int k = static_cast<int>(S.size()) - 1; k >= 0; --k) {
      alpha[k] = rho[k] * S[k].dot(q);
      q -= alpha[k] * Y[k];
    }
    Scalar gamma = S.empty() ? Scalar(1) / std::max(r.gradient_norm, Scalar(1)) : S.back().dot(Y.back()) / Y.back().squaredNorm();
    VectorX<Scalar> d = gamma * q;
    for (std::size_t k = 0; k < S.size(); ++k) {
      const Scalar beta = rho[k] * Y[k].dot(d);
      d += (alpha[k] - beta) * S[k];
    }
    d = -d;
    Scalar slope = g.dot(d);
    if (!(slope < 0)) {
      S.clear();
      Y.clear();
      rho.clear();
      d = -g / std::max(r.gradient_norm, Scalar(1));
      slope = g.dot(d);
    }

    Scalar step = 1;
    VectorX<Scalar> x_new, g_new(n);
    Scalar f_new = 0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + step * d;
      f_new = f(x_new, &g_new);
      if (detail::sufficient_decrease(f_new, fx, step, slope)) {
        accepted = true;
        break;
      }
      step /= 2;
    }
    if (!accepted) {
      r.converged = r.relative_change <= stop.relative_tolerance;
      break;
    }
    r.relative_change = detail::relative_change(fx, f_new);
    VectorX<Scalar> s = x_new - x;
    VectorX<Scalar> y = g_new - g;
    const Scalar sy = s.dot(y);
    if (sy > std::numeric_limits<Scalar>::epsilon() * y.squaredNorm()) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(Scalar(1) / sy);
      if (static_cast<int>(S.size()) > history) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    }
    x = std::move(x_new);
    g = g_new;
    fx = f_new;
    detail::check_finite_loss(fx, it + 1);
  }
  r.x = std::move(x);
  r.loss = fx;
  return r;
}

}  // namespace outlook

#endif  // OUTLOOK_OPTIM_HPP_
