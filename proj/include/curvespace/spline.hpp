/// Not-a-knot cubic splines on a uniform grid, acting column-wise on
/// N x d sample matrices. Used for all open-curve interpolation,
/// differentiation and cumulative integration.
#pragma once

#include <Eigen/Dense>

#include <stdexcept>

#include "curvespace/fourier.hpp"

namespace curvespace {
namespace spline {

/// Second derivatives M_i of the not-a-knot cubic spline through `values`
/// with uniform spacing h. Exact for cubic data.
template <typename Scalar>
MatrixX<Scalar> second_derivatives(const MatrixX<Scalar>& values, Scalar h) {
  const Index n = values.rows(), d = values.cols();
  if (n < 4) throw std::invalid_argument("spline: need at least 4 samples");
  MatrixX<Scalar> m(n, d);
  const Scalar h2 = h * h;
  // Not-a-knot pins the second derivative at the inner-most knots directly:
  // M_1 = d2 y_1, M_{n-2} = d2 y_{n-2}.
  m.row(1) = (values.row(0) - 2 * values.row(1) + values.row(2)) / h2;
  m.row(n - 2) = (values.row(n - 3) - 2 * values.row(n - 2) + values.row(n - 1)) / h2;
  const Index k = n - 4;  // unknowns M_2 .. M_{n-3}
  if (k > 0) {
    MatrixX<Scalar> rhs(k, d);
    for (Index i = 0; i < k; ++i)
      rhs.row(i) = Scalar(6) / h2 *
                   (values.row(i + 1) - 2 * values.row(i + 2) + values.row(i + 3));
    rhs.row(0) -= m.row(1);
    rhs.row(k - 1) -= m.row(n - 2);
    // Thomas solve of the tridiagonal [1 4 1] system.
    VectorX<Scalar> diag = VectorX<Scalar>::Constant(k, Scalar(4));
    for (Index i = 1; i < k; ++i) {
      const Scalar w = Scalar(1) / diag[i - 1];
      diag[i] -= w;
      rhs.row(i) -= w * rhs.row(i - 1);
    }
    m.row(n - 3) = rhs.row(k - 1) / diag[k - 1];
    for (Index i = k - 2; i >= 0; --i)
      m.row(i + 2) = (rhs.row(i) - m.row(i + 3)) / diag[i];
  }
  m.row(0) = 2 * m.row(1) - m.row(2);
  m.row(n - 1) = 2 * m.row(n - 2) - m.row(n - 3);
  return m;
}

/// Spline derivative evaluated at the grid nodes.
template <typename Scalar>
MatrixX<Scalar> derivative_at_nodes(const MatrixX<Scalar>& values, Scalar h) {
  const Index n = values.rows(), d = values.cols();
  MatrixX<Scalar> m = second_derivatives(values, h);
  MatrixX<Scalar> out(n, d);
  for (Index i = 0; i + 1 < n; ++i)
    out.row(i) = (values.row(i + 1) - values.row(i)) / h - h / Scalar(6) * (2 * m.row(i) + m.row(i + 1));
  out.row(n - 1) =
      (values.row(n - 1) - values.row(n - 2)) / h + h / Scalar(6) * (m.row(n - 2) + 2 * m.row(n - 1));
  return out;
}

/// Evaluate the spline at arbitrary abscissae x in [0, (n-1) h] (clamped).
template <typename Scalar>
MatrixX<Scalar> evaluate(const MatrixX<Scalar>& values, Scalar h, const VectorX<Scalar>& x) {
  const Index n = values.rows(), d = values.cols(), m = x.size();
  MatrixX<Scalar> m2 = second_derivatives(values, h);
  MatrixX<Scalar> out(m, d);
  for (Index j = 0; j < m; ++j) {
    Scalar t = x[j] / h;
    Index i = static_cast<Index>(std::floor(t));
    i = std::max<Index>(0, std::min<Index>(i, n - 2));
    const Scalar a = x[j] - Scalar(i) * h;      // offset into piece i
    const Scalar b = h - a;
    for (Index c = 0; c < d; ++c) {
      out(j, c) = (m2(i, c) * b * b * b + m2(i + 1, c) * a * a * a) / (6 * h) +
                  (values(i, c) / h - m2(i, c) * h / 6) * b +
                  (values(i + 1, c) / h - m2(i + 1, c) * h / 6) * a;
    }
  }
  return out;
}

/// Cumulative integral of the spline from node 0, evaluated at the nodes.
template <typename Scalar>
MatrixX<Scalar> cumulative_integral(const MatrixX<Scalar>& values, Scalar h) {
  const Index n = values.rows(), d = values.cols();
  MatrixX<Scalar> m2 = second_derivatives(values, h);
  MatrixX<Scalar> out(n, d);
  out.row(0).setZero();
  for (Index i = 0; i + 1 < n; ++i)
    out.row(i + 1) = out.row(i) + h / Scalar(2) * (values.row(i) + values.row(i + 1)) -
                     h * h * h / Scalar(24) * (m2.row(i) + m2.row(i + 1));
  return out;
}

}  // namespace spline
}  // namespace curvespace
