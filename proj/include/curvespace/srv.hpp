/// Square root velocity transform, its inverse, the closed-curve image
/// constraint, SRV geodesics/distances, and the elastic metric family.
#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "curvespace/curve.hpp"

namespace curvespace {

template <typename Scalar>
struct SrvCurve {
  MatrixX<Scalar> q;  // N x d SRV samples
  RowVectorX<Scalar> basepoint;
  Topology topology = Topology::closed;

  Index samples() const { return q.rows(); }
  Index dim() const { return q.cols(); }
};

using SrvCurved = SrvCurve<double>;

template <typename Scalar>
struct ElasticCoefficients {
  Scalar a = Scalar(1);        // normal weight
  Scalar b = Scalar(0.5);      // tangential weight

  static ElasticCoefficients srv() { return {Scalar(1), Scalar(0.5)}; }
};

/// L2(dtheta) inner product of two sample fields over the given topology.
template <typename Scalar>
Scalar l2_theta_inner(const MatrixX<Scalar>& u, const MatrixX<Scalar>& v, Topology topology) {
  const VectorX<Scalar> w = theta_weights<Scalar>(u.rows(), topology);
  Scalar acc = Scalar(0);
  for (Index c = 0; c < u.cols(); ++c)
    acc += w.dot((u.col(c).array() * v.col(c).array()).matrix());
  return acc;
}

template <typename Scalar>
Scalar l2_theta_norm(const MatrixX<Scalar>& u, Topology topology) {
  return std::sqrt(l2_theta_inner(u, u, topology));
}

template <typename Scalar>
SrvCurve<Scalar> srvt(const DiscreteCurve<Scalar>& c) {
  require_regular(c);
  const MatrixX<Scalar> cp = theta_derivative(c.points, c.topology);
  const VectorX<Scalar> speed = cp.rowwise().norm();
  SrvCurve<Scalar> out;
  out.q = cp.array().colwise() / speed.array().sqrt();
  out.basepoint = c.points.row(0);
  out.topology = c.topology;
  return out;
}

namespace detail {

/// Reconstruction integral; tolerates zero q samples (limit curves).
template <typename Scalar>
DiscreteCurve<Scalar> srvt_inverse_unchecked(const SrvCurve<Scalar>& s) {
  const MatrixX<Scalar> integrand = s.q.array().colwise() * s.q.rowwise().norm().array();
  MatrixX<Scalar> primitive;
  if (s.topology == Topology::closed) {
    primitive = fourier::antiderivative(integrand);
  } else {
    const Scalar h = two_pi_v<Scalar> / Scalar(s.samples() - 1);
    primitive = spline::cumulative_integral(integrand, h);
  }
  primitive.rowwise() += s.basepoint;
  return {primitive, s.topology};
}

}  // namespace detail

template <typename Scalar>
DiscreteCurve<Scalar> srvt_inverse(const SrvCurve<Scalar>& s) {
  if ((s.q.rowwise().norm().array() == Scalar(0)).any())
    throw std::domain_error("srvt_inverse: q vanishes at a sample");
  return detail::srvt_inverse_unchecked(s);
}

/// Integral of q|q| over the parameter domain; equals the endpoint gap
/// c(2*pi) - c(0) of the reconstructed curve.
template <typename Scalar>
RowVectorX<Scalar> closure_defect(const SrvCurve<Scalar>& s) {
  const VectorX<Scalar> w = theta_weights<Scalar>(s.samples(), s.topology);
  const MatrixX<Scalar> integrand = s.q.array().colwise() * s.q.rowwise().norm().array();
  return w.transpose() * integrand;
}

template <typename Scalar>
Scalar srv_curve_length(const SrvCurve<Scalar>& s) {
  const VectorX<Scalar> w = theta_weights<Scalar>(s.samples(), s.topology);
  return w.dot(s.q.rowwise().squaredNorm());
}

template <typename Scalar>
Scalar default_closure_tolerance(const SrvCurve<Scalar>& s) {
  return Scalar(1e-9) * std::sqrt(std::max(srv_curve_length(s), Scalar(0)));
}

template <typename Scalar>
struct ProjectionResult {
  SrvCurve<Scalar> q;
  bool converged = false;
  int iterations = 0;
  Scalar residual = Scalar(0);
};

/// Nearest-in-L2(dtheta) projection onto the closure constraint
/// int q|q| dtheta = 0, by damped Newton steps on the d Lagrange
/// multipliers of the constraint gradients.
template <typename Scalar>
ProjectionResult<Scalar> project_closed(const SrvCurve<Scalar>& s, Scalar tol, int max_iter = 100) {
  const Index n = s.samples(), d = s.dim();
  const VectorX<Scalar> w = theta_weights<Scalar>(n, s.topology);
  ProjectionResult<Scalar> result;
  result.q = s;
  MatrixX<Scalar>& q = result.q.q;

  auto defect = [&](const MatrixX<Scalar>& qq) -> RowVectorX<Scalar> {
    return w.transpose() * (qq.array().colwise() * qq.rowwise().norm().array()).matrix();
  };

  RowVectorX<Scalar> F = defect(q);
  for (int iter = 0; iter < max_iter; ++iter) {
    result.iterations = iter;
    result.residual = F.norm();
    if (result.residual < tol) {
      result.converged = true;
      return result;
    }
    const VectorX<Scalar> norm = q.rowwise().norm();
    // Gram matrix of the constraint gradients grad F_a = |q| e_a + (q_a/|q|) q:
    // <grad F_a, grad F_b> = int |q|^2 delta_ab + 3 q_a q_b dtheta.
    MatrixX<Scalar> gram = MatrixX<Scalar>::Zero(d, d);
    const Scalar qq = w.dot(norm.array().square().matrix());
    for (Index a = 0; a < d; ++a) {
      gram(a, a) += qq;
      for (Index b = 0; b < d; ++b)
        gram(a, b) += Scalar(3) * w.dot((q.col(a).array() * q.col(b).array()).matrix());
    }
    const VectorX<Scalar> beta = gram.ldlt().solve(-F.transpose());
    MatrixX<Scalar> step(n, d);
    for (Index i = 0; i < n; ++i) {
      const Scalar ni = norm[i];
      const Scalar radial = ni > Scalar(0) ? q.row(i).dot(beta) / ni : Scalar(0);
      step.row(i) = ni * beta.transpose() + radial * q.row(i);
    }
    Scalar alpha = Scalar(1);
    const Scalar f0 = F.norm();
    for (int ls = 0; ls < 30; ++ls) {
      const RowVectorX<Scalar> Ftrial = defect(q + alpha * step);
      if (Ftrial.norm() < (Scalar(1) - alpha / 2) * f0) {
        q += alpha * step;
        F = Ftrial;
        break;
      }
      alpha /= 2;
      if (ls == 29) {
        q += alpha * step;
        F = defect(q);
      }
    }
  }
  result.iterations = max_iter;
  result.residual = F.norm();
  result.converged = result.residual < tol;
  return result;
}

template <typename Scalar>
ProjectionResult<Scalar> project_closed(const SrvCurve<Scalar>& s) {
  return project_closed(s, default_closure_tolerance(s));
}

struct PathGridFailure {
  Index time_index = 0;
  Index theta_index = 0;
  double speed = 0;
};

/// Grid points of a path where the intermediate curve speed drops to eps
/// or below (where the q-space line passes near the origin).
template <typename Scalar>
std::vector<PathGridFailure> singularity_scan(const PathOfCurves<Scalar>& path, Scalar eps) {
  std::vector<PathGridFailure> failures;
  for (Index k = 0; k < path.frames(); ++k) {
    const VectorX<Scalar> speed =
        theta_derivative(path.curves[static_cast<size_t>(k)], path.topology).rowwise().norm();
    for (Index i = 0; i < speed.size(); ++i)
      if (speed[i] <= eps) failures.push_back({k, i, static_cast<double>(speed[i])});
  }
  return failures;
}

template <typename Scalar>
struct SrvGeodesicResult {
  PathOfCurves<Scalar> path;
  Scalar length = Scalar(0);
  std::vector<PathGridFailure> singularities;
  bool projections_converged = true;
};

/// Minimizing SRV geodesic. Open curves: the exact straight line in q-space.
/// Closed curves: the straight line projected onto the closure constraint at
/// every time sample. Limit paths through singular curves are returned with
/// the singularity report filled in rather than rejected.
template <typename Scalar>
SrvGeodesicResult<Scalar> srv_geodesic(const DiscreteCurve<Scalar>& c0,
                                       const DiscreteCurve<Scalar>& c1, Index time_steps) {
  if (c0.topology != c1.topology || c0.samples() != c1.samples() || c0.dim() != c1.dim())
    throw std::invalid_argument("srv_geodesic: curves must share grid and topology");
  if (time_steps < 1) throw std::invalid_argument("srv_geodesic: need at least one time step");
  const SrvCurve<Scalar> s0 = srvt(c0), s1 = srvt(c1);

  SrvGeodesicResult<Scalar> result;
  result.path.topology = c0.topology;
  result.path.t0 = Scalar(0);
  result.path.dt = Scalar(1) / Scalar(time_steps);

  std::vector<MatrixX<Scalar>> qs;
  qs.reserve(static_cast<size_t>(time_steps + 1));
  for (Index k = 0; k <= time_steps; ++k) {
    const Scalar t = Scalar(k) / Scalar(time_steps);
    SrvCurve<Scalar> st;
    st.q = (Scalar(1) - t) * s0.q + t * s1.q;
    st.basepoint = (Scalar(1) - t) * s0.basepoint + t * s1.basepoint;
    st.topology = c0.topology;
    if (c0.topology == Topology::closed && k > 0 && k < time_steps) {
      const ProjectionResult<Scalar> proj = project_closed(st);
      result.projections_converged = result.projections_converged && proj.converged;
      st = proj.q;
    }
    qs.push_back(st.q);
    result.path.curves.push_back(detail::srvt_inverse_unchecked(st).points);
  }
  for (Index k = 0; k < time_steps; ++k)
    result.length += l2_theta_norm<Scalar>(qs[static_cast<size_t>(k + 1)] - qs[static_cast<size_t>(k)],
                                           c0.topology);
  const Scalar eps = std::max(default_regularity_threshold(c0), default_regularity_threshold(c1));
  result.singularities = singularity_scan(result.path, eps);
  return result;
}

/// SRV geodesic distance: the flat L2(dtheta) distance for open curves,
/// the projected-path length for closed ones.
template <typename Scalar>
Scalar srv_distance(const DiscreteCurve<Scalar>& c0, const DiscreteCurve<Scalar>& c1,
                    Index time_steps = 32) {
  if (c0.topology != c1.topology || c0.samples() != c1.samples() || c0.dim() != c1.dim())
    throw std::invalid_argument("srv_distance: curves must share grid and topology");
  if (c0.topology == Topology::open) {
    const SrvCurve<Scalar> s0 = srvt(c0), s1 = srvt(c1);
    return l2_theta_norm<Scalar>(s1.q - s0.q, Topology::open);
  }
  return srv_geodesic(c0, c1, time_steps).length;
}

/// Elastic metric with weights a (normal) and b (tangential),
/// G(h,k) = int a^2 <D_s h_perp, D_s k_perp> + b^2 <D_s h, v><D_s k, v> ds.
/// The SRV metric is (a, b) = (1, 1/2).
template <typename Scalar>
Scalar elastic_metric(const DiscreteCurve<Scalar>& c, const TangentField<Scalar>& h,
                      const TangentField<Scalar>& k, const ElasticCoefficients<Scalar>& coeff) {
  if (!(coeff.a > Scalar(0)) || !(coeff.b > Scalar(0)))
    throw std::invalid_argument("elastic_metric: weights must be positive");
  detail::check_field(c, h);
  detail::check_field(c, k);
  const ArcData<Scalar> arc = arc_calculus(c);
  const TangentField<Scalar> dh = ds_derivative(c, h);
  const TangentField<Scalar> dk = ds_derivative(c, k);
  const Index n = c.samples();
  VectorX<Scalar> integrand(n);
  for (Index i = 0; i < n; ++i) {
    const Scalar ht = dh.row(i).dot(arc.unit_tangent.row(i));
    const Scalar kt = dk.row(i).dot(arc.unit_tangent.row(i));
    const Scalar full = dh.row(i).dot(dk.row(i));
    integrand[i] = coeff.a * coeff.a * (full - ht * kt) + coeff.b * coeff.b * ht * kt;
  }
  const VectorX<Scalar> w = theta_weights<Scalar>(n, c.topology);
  return w.dot((integrand.array() * arc.speed.array()).matrix());
}

}  // namespace curvespace
