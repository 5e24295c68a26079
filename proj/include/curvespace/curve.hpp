/// Discrete regular curves on a uniform parameter grid and the arc-length
/// calculus they carry: speed, unit tangent, curvature, length, D_s and
/// arc-length integration.
///
/// Closed curves sample [0, 2*pi) at N points and use spectral calculus;
/// open curves sample [0, 2*pi] inclusively and use cubic-spline calculus.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvespace/fourier.hpp"
#include "curvespace/spline.hpp"

namespace curvespace {

enum class Topology { closed, open };

template <typename Scalar>
using TangentField = MatrixX<Scalar>;  // N x d samples on the curve's grid

template <typename Scalar>
struct DiscreteCurve {
  MatrixX<Scalar> points;  // N x d
  Topology topology = Topology::closed;

  Index samples() const { return points.rows(); }
  Index dim() const { return points.cols(); }
  Scalar spacing() const {
    const Index n = samples();
    return topology == Topology::closed ? two_pi_v<Scalar> / Scalar(n)
                                        : two_pi_v<Scalar> / Scalar(n - 1);
  }
  VectorX<Scalar> thetas() const {
    VectorX<Scalar> t(samples());
    const Scalar h = spacing();
    for (Index i = 0; i < samples(); ++i) t[i] = Scalar(i) * h;
    return t;
  }
};

using DiscreteCurved = DiscreteCurve<double>;

template <typename Scalar>
struct ArcData {
  VectorX<Scalar> speed;         // |c'|
  MatrixX<Scalar> unit_tangent;  // v = c'/|c'|
  VectorX<Scalar> curvature;     // signed for d=2, magnitude for d=3
  Scalar length = Scalar(0);
};

struct RegularityReport {
  bool ok = true;
  double min_speed = 0;
  double threshold = 0;
  std::vector<Index> violations;
};

template <typename Scalar>
struct PathOfCurves {
  std::vector<MatrixX<Scalar>> curves;  // (T+1) frames, shared N x d grid
  Topology topology = Topology::closed;
  Scalar t0 = Scalar(0);
  Scalar dt = Scalar(0);

  Index frames() const { return static_cast<Index>(curves.size()); }
  DiscreteCurve<Scalar> curve(Index k) const { return {curves[static_cast<size_t>(k)], topology}; }
};

namespace detail {

template <typename Scalar>
void check_curve(const DiscreteCurve<Scalar>& c) {
  if (c.samples() < 8) throw std::invalid_argument("curve: need at least 8 samples");
  if (c.dim() != 2 && c.dim() != 3) throw std::invalid_argument("curve: dimension must be 2 or 3");
}

template <typename Scalar>
void check_field(const DiscreteCurve<Scalar>& c, const MatrixX<Scalar>& h) {
  if (h.rows() != c.samples() || h.cols() != c.dim())
    throw std::invalid_argument("tangent field does not match the curve grid");
}

}  // namespace detail

/// d/dtheta of grid samples, honoring the topology.
template <typename Scalar>
MatrixX<Scalar> theta_derivative(const MatrixX<Scalar>& values, Topology topology, int order = 1) {
  if (order == 0) return values;
  if (topology == Topology::closed) return fourier::derivative(values, order);
  const Scalar h = two_pi_v<Scalar> / Scalar(values.rows() - 1);
  MatrixX<Scalar> out = values;
  for (int j = 0; j < order; ++j) out = spline::derivative_at_nodes(out, h);
  return out;
}

/// Quadrature weights in theta (periodic rectangle / trapezoid).
template <typename Scalar>
VectorX<Scalar> theta_weights(Index n, Topology topology) {
  if (topology == Topology::closed)
    return VectorX<Scalar>::Constant(n, two_pi_v<Scalar> / Scalar(n));
  const Scalar h = two_pi_v<Scalar> / Scalar(n - 1);
  VectorX<Scalar> w = VectorX<Scalar>::Constant(n, h);
  w[0] = h / 2;
  w[n - 1] = h / 2;
  return w;
}

template <typename Scalar>
VectorX<Scalar> speed_of(const DiscreteCurve<Scalar>& c) {
  return theta_derivative(c.points, c.topology).rowwise().norm();
}

/// Scale-aware regularity threshold: 1e-6 * length / (2*pi).
template <typename Scalar>
Scalar default_regularity_threshold(const DiscreteCurve<Scalar>& c) {
  const VectorX<Scalar> speed = speed_of(c);
  const Scalar length = theta_weights<Scalar>(c.samples(), c.topology).dot(speed);
  return Scalar(1e-6) * length / two_pi_v<Scalar>;
}

template <typename Scalar>
RegularityReport validate_regular(const DiscreteCurve<Scalar>& c, Scalar eps) {
  detail::check_curve(c);
  const VectorX<Scalar> speed = speed_of(c);
  RegularityReport report;
  report.threshold = static_cast<double>(eps);
  report.min_speed = static_cast<double>(speed.minCoeff());
  for (Index i = 0; i < speed.size(); ++i)
    if (!(speed[i] > eps)) report.violations.push_back(i);
  report.ok = report.violations.empty();
  return report;
}

template <typename Scalar>
RegularityReport validate_regular(const DiscreteCurve<Scalar>& c) {
  return validate_regular(c, default_regularity_threshold(c));
}

template <typename Scalar>
void require_regular(const DiscreteCurve<Scalar>& c) {
  const RegularityReport report = validate_regular(c);
  if (!report.ok)
    throw std::domain_error("curve is not regular: min speed " + std::to_string(report.min_speed) +
                            " below " + std::to_string(report.threshold));
}

template <typename Scalar>
ArcData<Scalar> arc_calculus(const DiscreteCurve<Scalar>& c) {
  require_regular(c);
  ArcData<Scalar> arc;
  const MatrixX<Scalar> cp = theta_derivative(c.points, c.topology);
  const MatrixX<Scalar> cpp = theta_derivative(c.points, c.topology, 2);
  arc.speed = cp.rowwise().norm();
  arc.unit_tangent = cp.array().colwise() / arc.speed.array();
  const Index n = c.samples();
  arc.curvature.resize(n);
  if (c.dim() == 2) {
    for (Index i = 0; i < n; ++i) {
      const Scalar det = cp(i, 0) * cpp(i, 1) - cp(i, 1) * cpp(i, 0);
      arc.curvature[i] = det / (arc.speed[i] * arc.speed[i] * arc.speed[i]);
    }
  } else {
    // |D_s v| with v the unit tangent.
    const MatrixX<Scalar> vp = theta_derivative(arc.unit_tangent, c.topology);
    for (Index i = 0; i < n; ++i) arc.curvature[i] = vp.row(i).norm() / arc.speed[i];
  }
  arc.length = theta_weights<Scalar>(n, c.topology).dot(arc.speed);
  return arc;
}

/// Arc-length integral of a scalar field sampled on the curve's grid.
template <typename Scalar>
Scalar integrate_ds(const DiscreteCurve<Scalar>& c, const VectorX<Scalar>& f) {
  detail::check_curve(c);
  if (f.size() != c.samples()) throw std::invalid_argument("integrate_ds: field size mismatch");
  require_regular(c);
  const VectorX<Scalar> speed = speed_of(c);
  return theta_weights<Scalar>(c.samples(), c.topology).dot(
      (f.array() * speed.array()).matrix());
}

/// Iterated arc-length derivative D_s^j h with D_s h = h' / |c'|.
template <typename Scalar>
TangentField<Scalar> ds_derivative(const DiscreteCurve<Scalar>& c, const TangentField<Scalar>& h,
                                   int order = 1) {
  detail::check_field(c, h);
  if (order == 0) return h;
  require_regular(c);
  const VectorX<Scalar> speed = speed_of(c);
  TangentField<Scalar> out = h;
  for (int j = 0; j < order; ++j)
    out = theta_derivative(out, c.topology).array().colwise() / speed.array();
  return out;
}

/// Resample to m points: trigonometric interpolation for closed curves,
/// not-a-knot cubic spline for open ones.
template <typename Scalar>
DiscreteCurve<Scalar> resample(const DiscreteCurve<Scalar>& c, Index m) {
  detail::check_curve(c);
  if (m < 8) throw std::invalid_argument("resample: need at least 8 samples");
  require_regular(c);
  if (c.topology == Topology::closed) return {fourier::resample(c.points, m), c.topology};
  const Scalar h = c.spacing();
  VectorX<Scalar> x(m);
  const Scalar hm = two_pi_v<Scalar> / Scalar(m - 1);
  for (Index i = 0; i < m; ++i) x[i] = Scalar(i) * hm;
  return {spline::evaluate(c.points, h, x), c.topology};
}

}  // namespace curvespace
