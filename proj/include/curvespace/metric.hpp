/// Uniform evaluation interface for the Riemannian metrics on curve space:
/// L2, almost-local (conformal / curvature-weighted / scale-invariant),
/// elastic, and constant-coefficient Sobolev. Path energy/length functionals
/// and the vanishing-distance sawtooth construction live here too.
#pragma once

#include <Eigen/Dense>

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "curvespace/curve.hpp"
#include "curvespace/srv.hpp"

namespace curvespace {

enum class MetricKind { l2, almost_local, elastic, sobolev };
enum class AlmostLocalKind { conformal, curvature_weighted, scale_invariant };

template <typename Scalar>
struct MetricSpec {
  MetricKind kind = MetricKind::l2;
  AlmostLocalKind almost_kind = AlmostLocalKind::conformal;
  Scalar conformal_power = Scalar(-3);  // Phi = length^p
  Scalar curvature_weight = Scalar(1);  // Phi = 1 + A kappa^2
  ElasticCoefficients<Scalar> elastic_coeff;
  std::vector<Scalar> sobolev_coeffs;  // a_0 .. a_n

  static MetricSpec l2() { return {}; }
  static MetricSpec conformal(Scalar power) {
    MetricSpec m;
    m.kind = MetricKind::almost_local;
    m.almost_kind = AlmostLocalKind::conformal;
    m.conformal_power = power;
    return m;
  }
  static MetricSpec curvature_weighted(Scalar weight) {
    if (!(weight > Scalar(0)))
      throw std::invalid_argument("curvature-weighted metric needs A > 0");
    MetricSpec m;
    m.kind = MetricKind::almost_local;
    m.almost_kind = AlmostLocalKind::curvature_weighted;
    m.curvature_weight = weight;
    return m;
  }
  static MetricSpec scale_invariant() {
    MetricSpec m;
    m.kind = MetricKind::almost_local;
    m.almost_kind = AlmostLocalKind::scale_invariant;
    return m;
  }
  static MetricSpec elastic(Scalar a, Scalar b) {
    if (!(a > Scalar(0)) || !(b > Scalar(0)))
      throw std::invalid_argument("elastic metric needs a, b > 0");
    MetricSpec m;
    m.kind = MetricKind::elastic;
    m.elastic_coeff = {a, b};
    return m;
  }
  static MetricSpec sobolev(std::vector<Scalar> coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("sobolev metric needs coefficients");
    for (const Scalar a : coeffs)
      if (a < Scalar(0)) throw std::invalid_argument("sobolev coefficients must be nonnegative");
    if (!(coeffs.back() > Scalar(0)))
      throw std::invalid_argument("leading sobolev coefficient must be positive");
    MetricSpec m;
    m.kind = MetricKind::sobolev;
    m.sobolev_coeffs = std::move(coeffs);
    return m;
  }

  /// Order of the highest arc-length derivative entering the metric.
  int order() const {
    switch (kind) {
      case MetricKind::l2:
      case MetricKind::almost_local:
        return 0;
      case MetricKind::elastic:
        return 1;
      case MetricKind::sobolev:
        return static_cast<int>(sobolev_coeffs.size()) - 1;
    }
    return 0;
  }

  /// True when constant fields lie in the kernel (metric on Imm/Tra only).
  bool is_degenerate() const {
    if (kind == MetricKind::elastic) return true;
    if (kind == MetricKind::sobolev) return sobolev_coeffs.front() == Scalar(0);
    return false;
  }

  std::string to_string() const {
    char buffer[64];
    switch (kind) {
      case MetricKind::l2:
        return "l2";
      case MetricKind::almost_local:
        switch (almost_kind) {
          case AlmostLocalKind::conformal:
            std::snprintf(buffer, sizeof buffer, "almost:conf:p=%g", double(conformal_power));
            return buffer;
          case AlmostLocalKind::curvature_weighted:
            std::snprintf(buffer, sizeof buffer, "almost:curv:A=%g", double(curvature_weight));
            return buffer;
          case AlmostLocalKind::scale_invariant:
            return "almost:scaleinv";
        }
        break;
      case MetricKind::elastic:
        std::snprintf(buffer, sizeof buffer, "elastic:a=%g,b=%g", double(elastic_coeff.a),
                      double(elastic_coeff.b));
        return buffer;
      case MetricKind::sobolev: {
        std::string out = "sobolev:";
        for (size_t j = 0; j < sobolev_coeffs.size(); ++j) {
          std::snprintf(buffer, sizeof buffer, "%g", double(sobolev_coeffs[j]));
          out += buffer;
          if (j + 1 < sobolev_coeffs.size()) out += ',';
        }
        return out;
      }
    }
    return "l2";
  }

  static MetricSpec parse(const std::string& text) {
    auto bad = [&] { return std::invalid_argument("unknown metric spec: " + text); };
    if (text == "l2") return l2();
    if (text.rfind("almost:", 0) == 0) {
      const std::string rest = text.substr(7);
      if (rest == "scaleinv") return scale_invariant();
      if (rest.rfind("conf:p=", 0) == 0) return conformal(Scalar(std::stod(rest.substr(7))));
      if (rest.rfind("curv:A=", 0) == 0) return curvature_weighted(Scalar(std::stod(rest.substr(7))));
      throw bad();
    }
    if (text.rfind("elastic:", 0) == 0) {
      Scalar a, b;
      double av = 0, bv = 0;
      if (std::sscanf(text.c_str(), "elastic:a=%lf,b=%lf", &av, &bv) != 2) throw bad();
      a = Scalar(av);
      b = Scalar(bv);
      return elastic(a, b);
    }
    if (text.rfind("sobolev:", 0) == 0) {
      std::vector<Scalar> coeffs;
      std::stringstream stream(text.substr(8));
      std::string item;
      while (std::getline(stream, item, ',')) coeffs.push_back(Scalar(std::stod(item)));
      return sobolev(std::move(coeffs));
    }
    throw bad();
  }
};

using MetricSpecd = MetricSpec<double>;

/// True when h lies in the declared kernel of a degenerate spec
/// (a constant field under a translation-quotient metric).
template <typename Scalar>
bool kernel_diagnostic(const MetricSpec<Scalar>& spec, const TangentField<Scalar>& h,
                       Scalar tol = Scalar(1e-12)) {
  if (!spec.is_degenerate()) return false;
  const RowVectorX<Scalar> mean = h.colwise().mean();
  return (h.rowwise() - mean).cwiseAbs().maxCoeff() <= tol * (Scalar(1) + h.cwiseAbs().maxCoeff());
}

template <typename Scalar>
struct NormalProjection {
  TangentField<Scalar> perpendicular;  // h - <h,v> v
  VectorX<Scalar> tangential;          // <h,v>
};

template <typename Scalar>
NormalProjection<Scalar> normal_projection(const DiscreteCurve<Scalar>& c,
                                           const TangentField<Scalar>& h) {
  detail::check_field(c, h);
  const ArcData<Scalar> arc = arc_calculus(c);
  NormalProjection<Scalar> out;
  out.tangential.resize(c.samples());
  out.perpendicular.resize(c.samples(), c.dim());
  for (Index i = 0; i < c.samples(); ++i) {
    out.tangential[i] = h.row(i).dot(arc.unit_tangent.row(i));
    out.perpendicular.row(i) = h.row(i) - out.tangential[i] * arc.unit_tangent.row(i);
  }
  return out;
}

namespace detail {

template <typename Scalar>
VectorX<Scalar> almost_local_weight(const MetricSpec<Scalar>& spec, const ArcData<Scalar>& arc) {
  const Index n = arc.speed.size();
  switch (spec.almost_kind) {
    case AlmostLocalKind::conformal:
      return VectorX<Scalar>::Constant(n, std::pow(arc.length, spec.conformal_power));
    case AlmostLocalKind::curvature_weighted:
      return (Scalar(1) + spec.curvature_weight * arc.curvature.array().square()).matrix();
    case AlmostLocalKind::scale_invariant: {
      const Scalar l = arc.length;
      return (Scalar(1) / (l * l * l) + arc.curvature.array().square() * l).matrix();
    }
  }
  return VectorX<Scalar>::Ones(n);
}

}  // namespace detail

/// G_c(h, k) for any metric spec. Symmetric and bilinear in (h, k).
template <typename Scalar>
Scalar metric_eval(const MetricSpec<Scalar>& spec, const DiscreteCurve<Scalar>& c,
                   const TangentField<Scalar>& h, const TangentField<Scalar>& k) {
  detail::check_field(c, h);
  detail::check_field(c, k);
  switch (spec.kind) {
    case MetricKind::l2: {
      require_regular(c);
      const VectorX<Scalar> speed = speed_of(c);
      const VectorX<Scalar> w = theta_weights<Scalar>(c.samples(), c.topology);
      Scalar acc = Scalar(0);
      for (Index i = 0; i < c.samples(); ++i) acc += w[i] * speed[i] * h.row(i).dot(k.row(i));
      return acc;
    }
    case MetricKind::almost_local: {
      const ArcData<Scalar> arc = arc_calculus(c);
      const VectorX<Scalar> phi = detail::almost_local_weight(spec, arc);
      const VectorX<Scalar> w = theta_weights<Scalar>(c.samples(), c.topology);
      Scalar acc = Scalar(0);
      for (Index i = 0; i < c.samples(); ++i)
        acc += w[i] * arc.speed[i] * phi[i] * h.row(i).dot(k.row(i));
      return acc;
    }
    case MetricKind::elastic:
      return elastic_metric(c, h, k, spec.elastic_coeff);
    case MetricKind::sobolev: {
      require_regular(c);
      const VectorX<Scalar> speed = speed_of(c);
      const VectorX<Scalar> w = theta_weights<Scalar>(c.samples(), c.topology);
      const VectorX<Scalar> ds = (w.array() * speed.array()).matrix();
      TangentField<Scalar> uh = h, uk = k;
      Scalar acc = Scalar(0);
      for (size_t j = 0; j < spec.sobolev_coeffs.size(); ++j) {
        if (j > 0) {
          uh = theta_derivative(uh, c.topology).array().colwise() / speed.array();
          uk = theta_derivative(uk, c.topology).array().colwise() / speed.array();
        }
        const Scalar aj = spec.sobolev_coeffs[j];
        if (aj == Scalar(0)) continue;
        Scalar term = Scalar(0);
        for (Index i = 0; i < c.samples(); ++i) term += ds[i] * uh.row(i).dot(uk.row(i));
        acc += aj * term;
      }
      return acc;
    }
  }
  return Scalar(0);
}

namespace detail {

template <typename Scalar>
MatrixX<Scalar> open_theta_derivative_matrix(Index n) {
  const Scalar h = two_pi_v<Scalar> / Scalar(n - 1);
  MatrixX<Scalar> id = MatrixX<Scalar>::Identity(n, n);
  return spline::derivative_at_nodes(id, h);
}

}  // namespace detail

/// The operator L_c = sum_j (-1)^j a_j D_s^(2j) realized so that
/// integrate_ds(<L_c h, k>) = metric_eval(sobolev, c, h, k) holds exactly
/// in the discretization (self-adjoint weak form on open curves).
template <typename Scalar>
TangentField<Scalar> apply_operator_L(const DiscreteCurve<Scalar>& c,
                                      const std::vector<Scalar>& coeffs,
                                      const TangentField<Scalar>& h) {
  detail::check_field(c, h);
  require_regular(c);
  if (coeffs.empty()) throw std::invalid_argument("apply_operator_L: empty coefficients");
  const VectorX<Scalar> speed = speed_of(c);
  if (c.topology == Topology::closed) {
    // Spectral d/dtheta is exactly skew, so the ds-adjoint of D_s is -D_s and
    // the weak form collapses to the pointwise operator.
    TangentField<Scalar> out = coeffs[0] * h;
    TangentField<Scalar> u = h;
    Scalar sign = Scalar(1);
    for (size_t j = 1; j < coeffs.size(); ++j) {
      u = theta_derivative(u, c.topology).array().colwise() / speed.array();
      u = theta_derivative(u, c.topology).array().colwise() / speed.array();
      sign = -sign;
      if (coeffs[j] != Scalar(0)) out += sign * coeffs[j] * u;
    }
    return out;
  }
  const Index n = c.samples();
  const MatrixX<Scalar> D = detail::open_theta_derivative_matrix<Scalar>(n);
  const VectorX<Scalar> w = theta_weights<Scalar>(n, c.topology);
  const VectorX<Scalar> ds = (w.array() * speed.array()).matrix();
  TangentField<Scalar> acc = coeffs[0] * (h.array().colwise() * ds.array()).matrix();
  TangentField<Scalar> u = h;
  for (size_t j = 1; j < coeffs.size(); ++j) {
    u = (D * u).array().colwise() / speed.array();
    if (coeffs[j] == Scalar(0)) continue;
    TangentField<Scalar> z = (u.array().colwise() * ds.array()).matrix();
    for (size_t m = 0; m < j; ++m) z = D.transpose() * (z.array().colwise() / speed.array()).matrix();
    acc += coeffs[j] * z;
  }
  return (acc.array().colwise() / ds.array()).matrix();
}

enum class PathMode { full, normal_only };

template <typename Scalar>
struct PathFunctionals {
  Scalar energy = Scalar(0);
  Scalar length = Scalar(0);
};

/// Discrete energy and length of a path of curves under the given metric,
/// with central-difference velocities in t. In normal-only mode the velocity
/// is projected off the tangent direction first (shape-space length).
template <typename Scalar>
PathFunctionals<Scalar> path_functionals(const MetricSpec<Scalar>& spec,
                                         const PathOfCurves<Scalar>& path,
                                         PathMode mode = PathMode::full) {
  const Index frames = path.frames();
  if (frames < 2) throw std::invalid_argument("path_functionals: need at least two frames");
  const Scalar dt = path.dt;
  PathFunctionals<Scalar> out;
  for (Index k = 0; k < frames; ++k) {
    MatrixX<Scalar> velocity;
    if (k == 0)
      velocity = (path.curves[1] - path.curves[0]) / dt;
    else if (k == frames - 1)
      velocity = (path.curves[frames - 1] - path.curves[frames - 2]) / dt;
    else
      velocity = (path.curves[k + 1] - path.curves[k - 1]) / (2 * dt);
    const DiscreteCurve<Scalar> frame = path.curve(k);
    if (mode == PathMode::normal_only)
      velocity = normal_projection(frame, velocity).perpendicular;
    const Scalar g = metric_eval(spec, frame, velocity, velocity);
    const Scalar wt = (k == 0 || k == frames - 1) ? dt / 2 : dt;
    out.energy += wt * g;
    out.length += wt * std::sqrt(std::max(g, Scalar(0)));
  }
  return out;
}

/// Zigzag path between concentric circles of radii r0 < r1: the teeth grow
/// out of the inner circle, slide by half a period, and flatten onto the
/// outer circle. The radial profile is piecewise linear in theta with
/// `samples_per_tooth` grid points per tooth (implementation constant).
template <typename Scalar>
PathOfCurves<Scalar> sawtooth_path(Scalar r0, Scalar r1, Index teeth, Index time_steps,
                                   Index min_samples = 256, Index samples_per_tooth = 32) {
  if (!(r1 > r0) || !(r0 > Scalar(0))) throw std::invalid_argument("sawtooth_path: need r1 > r0 > 0");
  if (teeth < 1) throw std::invalid_argument("sawtooth_path: need at least one tooth");
  Index n = std::max(min_samples, samples_per_tooth * teeth);
  if (n % 2 == 1) ++n;
  const Scalar amplitude = r1 - r0;

  // Triangle wave with period 2*pi, range [0, 1], tri(0) = 0.
  auto tri = [](Scalar u) {
    const Scalar p = two_pi_v<Scalar>;
    u = u - p * std::floor(u / p);
    return u <= std::numbers::pi_v<Scalar> ? u / std::numbers::pi_v<Scalar>
                                           : Scalar(2) - u / std::numbers::pi_v<Scalar>;
  };
  auto profile = [&](Scalar t, Scalar theta) {
    const Scalar u = Scalar(teeth) * theta;
    if (t <= Scalar(1) / 3) {
      const Scalar s = 3 * t;
      return r0 + s * amplitude * tri(u);
    }
    if (t <= Scalar(2) / 3) {
      const Scalar s = 3 * t - 1;
      return r0 + amplitude * tri(u - std::numbers::pi_v<Scalar> * s);
    }
    const Scalar s = 3 * t - 2;
    return r1 - (Scalar(1) - s) * amplitude * (Scalar(1) - tri(u - std::numbers::pi_v<Scalar>));
  };

  PathOfCurves<Scalar> path;
  path.topology = Topology::closed;
  path.t0 = Scalar(0);
  path.dt = Scalar(1) / Scalar(time_steps);
  for (Index k = 0; k <= time_steps; ++k) {
    const Scalar t = Scalar(k) / Scalar(time_steps);
    MatrixX<Scalar> pts(n, 2);
    for (Index i = 0; i < n; ++i) {
      const Scalar theta = two_pi_v<Scalar> * Scalar(i) / Scalar(n);
      const Scalar rho = profile(t, theta);
      pts(i, 0) = rho * std::cos(theta);
      pts(i, 1) = rho * std::sin(theta);
    }
    path.curves.push_back(std::move(pts));
  }
  return path;
}

}  // namespace curvespace
