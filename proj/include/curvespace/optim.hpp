/// Small dense solvers shared by the geodesic and matching code:
/// limited-memory BFGS with backtracking line search, and preconditioned
/// conjugate gradients for SPD operator solves.
#pragma once

#include <Eigen/Dense>

#include <deque>
#include <functional>
#include <vector>

#include "curvespace/fourier.hpp"

namespace curvespace {

template <typename Scalar>
struct LbfgsOptions {
  int max_iterations = 200;
  int history = 8;
  int max_line_search = 40;
  Scalar gradient_tolerance = Scalar(1e-9);
  Scalar relative_decrease_tolerance = Scalar(1e-12);
  Scalar armijo = Scalar(1e-4);
};

template <typename Scalar>
struct LbfgsResult {
  VectorX<Scalar> x;
  Scalar value = Scalar(0);
  Scalar gradient_norm = Scalar(0);
  bool converged = false;
  int iterations = 0;
  std::vector<Scalar> history;  // accepted objective values, nonincreasing
};

/// Minimize f via L-BFGS. `fg(x, grad)` returns the value and fills the
/// gradient. The accepted-value history is strictly nonincreasing because
/// steps are only taken under the Armijo condition.
template <typename Scalar, typename FG>
LbfgsResult<Scalar> minimize_lbfgs(FG&& fg, VectorX<Scalar> x0,
                                   const LbfgsOptions<Scalar>& opts = {}) {
  LbfgsResult<Scalar> result;
  const Index n = x0.size();
  VectorX<Scalar> x = std::move(x0), grad(n), grad_new(n);
  Scalar f = fg(x, grad);
  result.history.push_back(f);

  std::deque<VectorX<Scalar>> s_hist, y_hist;
  std::deque<Scalar> rho_hist;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    result.iterations = iter;
    const Scalar gnorm = grad.norm();
    if (gnorm <= opts.gradient_tolerance * (Scalar(1) + std::abs(f))) {
      result.converged = true;
      break;
    }

    // Two-loop recursion.
    VectorX<Scalar> direction = -grad;
    std::vector<Scalar> alpha(s_hist.size());
    for (Index i = static_cast<Index>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(direction);
      direction -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      const Scalar gamma =
          s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      direction *= gamma;
    }
    for (size_t i = 0; i < s_hist.size(); ++i) {
      const Scalar beta = rho_hist[i] * y_hist[i].dot(direction);
      direction += (alpha[i] - beta) * s_hist[i];
    }

    Scalar slope = grad.dot(direction);
    if (!(slope < Scalar(0))) {
      direction = -grad;
      slope = -grad.squaredNorm();
    }

    Scalar step = Scalar(1);
    Scalar f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < opts.max_line_search; ++ls) {
      const VectorX<Scalar> x_new = x + step * direction;
      f_new = fg(x_new, grad_new);
      if (std::isfinite(f_new) && f_new <= f + opts.armijo * step * slope) {
        const VectorX<Scalar> s = x_new - x;
        const VectorX<Scalar> y = grad_new - grad;
        const Scalar sy = s.dot(y);
        if (sy > Scalar(1e-12) * s.norm() * y.norm()) {
          s_hist.push_back(s);
          y_hist.push_back(y);
          rho_hist.push_back(Scalar(1) / sy);
          if (static_cast<int>(s_hist.size()) > opts.history) {
            s_hist.pop_front();
            y_hist.pop_front();
            rho_hist.pop_front();
          }
        }
        x = x_new;
        grad = grad_new;
        accepted = true;
        break;
      }
      step /= 2;
    }
    if (!accepted) break;  // line search exhausted

    result.history.push_back(f_new);
    const Scalar decrease = f - f_new;
    f = f_new;
    if (decrease <= opts.relative_decrease_tolerance * (std::abs(f) + Scalar(1e-30))) {
      result.converged = true;
      break;
    }
  }
  result.x = std::move(x);
  result.value = f;
  result.gradient_norm = grad.norm();
  return result;
}

/// Preconditioned conjugate gradients for an SPD operator given as a functor.
/// Solves A x = b to a relative residual, starting from x0 (warm starts).
template <typename Scalar, typename ApplyA, typename ApplyPrec>
MatrixX<Scalar> pcg_solve(ApplyA&& apply_a, ApplyPrec&& apply_prec, const MatrixX<Scalar>& b,
                          MatrixX<Scalar> x, Scalar rel_tol = Scalar(1e-12), int max_iter = 200) {
  if (x.rows() != b.rows() || x.cols() != b.cols()) x = MatrixX<Scalar>::Zero(b.rows(), b.cols());
  auto dot = [](const MatrixX<Scalar>& u, const MatrixX<Scalar>& v) {
    return (u.array() * v.array()).sum();
  };
  MatrixX<Scalar> r = b - apply_a(x);
  const Scalar bnorm = std::sqrt(dot(b, b));
  if (bnorm == Scalar(0)) return MatrixX<Scalar>::Zero(b.rows(), b.cols());
  MatrixX<Scalar> z = apply_prec(r);
  MatrixX<Scalar> p = z;
  Scalar rz = dot(r, z);
  for (int it = 0; it < max_iter; ++it) {
    if (std::sqrt(dot(r, r)) <= rel_tol * bnorm) break;
    const MatrixX<Scalar> Ap = apply_a(p);
    const Scalar pAp = dot(p, Ap);
    if (!(pAp > Scalar(0))) break;
    const Scalar alpha = rz / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    z = apply_prec(r);
    const Scalar rz_new = dot(r, z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  return x;
}

}  // namespace curvespace
