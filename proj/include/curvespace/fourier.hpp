/// Spectral calculus on uniformly sampled periodic data: derivatives,
/// antiderivatives, band-limited resampling and Fourier-symbol solves.
/// All routines act column-wise on N x d sample matrices over the grid
/// theta_i = 2*pi*i/N.
#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <complex>
#include <numbers>
#include <stdexcept>

namespace curvespace {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using Index = Eigen::Index;

template <typename Scalar>
inline constexpr Scalar two_pi_v = Scalar(2) * std::numbers::pi_v<Scalar>;

namespace fourier {

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

/// Signed wave number of FFT bin m for transform length n.
inline Index wave_number(Index m, Index n) { return (2 * m <= n) ? m : m - n; }

template <typename Scalar>
ComplexMatrix<Scalar> forward(const MatrixX<Scalar>& values) {
  const Index n = values.rows(), d = values.cols();
  Eigen::FFT<Scalar> fft;
  ComplexMatrix<Scalar> spectrum(n, d);
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> in(n), out(n);
  for (Index c = 0; c < d; ++c) {
    for (Index i = 0; i < n; ++i) in[i] = std::complex<Scalar>(values(i, c), Scalar(0));
    fft.fwd(out, in);
    spectrum.col(c) = out;
  }
  return spectrum;
}

template <typename Scalar>
MatrixX<Scalar> inverse_real(const ComplexMatrix<Scalar>& spectrum) {
  const Index n = spectrum.rows(), d = spectrum.cols();
  Eigen::FFT<Scalar> fft;
  MatrixX<Scalar> values(n, d);
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> in(n), out(n);
  for (Index c = 0; c < d; ++c) {
    in = spectrum.col(c);
    fft.inv(out, in);
    for (Index i = 0; i < n; ++i) values(i, c) = out[i].real();
  }
  return values;
}

/// d^order/dtheta^order of the trigonometric interpolant, evaluated on the
/// grid. Odd orders zero the Nyquist bin (the standard real-data convention).
template <typename Scalar>
MatrixX<Scalar> derivative(const MatrixX<Scalar>& values, int order = 1) {
  if (order == 0) return values;
  const Index n = values.rows();
  ComplexMatrix<Scalar> spectrum = forward(values);
  const std::complex<Scalar> iu(Scalar(0), Scalar(1));
  for (Index m = 0; m < n; ++m) {
    const bool nyquist = (n % 2 == 0) && (m == n / 2);
    std::complex<Scalar> factor;
    if (nyquist) {
      if (order % 2 == 1) {
        factor = std::complex<Scalar>(0, 0);
      } else {
        const Scalar k = Scalar(n / 2);
        factor = std::complex<Scalar>(((order / 2) % 2 == 0 ? 1 : -1) * std::pow(k, Scalar(order)), 0);
      }
    } else {
      const Scalar k = Scalar(wave_number(m, n));
      factor = std::pow(iu * k, Scalar(order));
    }
    spectrum.row(m) *= factor;
  }
  return inverse_real(spectrum);
}

/// Antiderivative F with F(theta_0) = 0: mean * theta plus the periodic part
/// integrated mode-by-mode. Spectrally accurate partial integrals.
template <typename Scalar>
MatrixX<Scalar> antiderivative(const MatrixX<Scalar>& values) {
  const Index n = values.rows(), d = values.cols();
  ComplexMatrix<Scalar> spectrum = forward(values);
  RowVectorX<Scalar> mean(d);
  for (Index c = 0; c < d; ++c) mean[c] = spectrum(0, c).real() / Scalar(n);
  const std::complex<Scalar> iu(Scalar(0), Scalar(1));
  spectrum.row(0).setZero();
  for (Index m = 1; m < n; ++m) {
    const bool nyquist = (n % 2 == 0) && (m == n / 2);
    if (nyquist) {
      // The Nyquist cosine integrates to a sine that vanishes on the grid.
      spectrum.row(m).setZero();
      continue;
    }
    spectrum.row(m) /= iu * Scalar(wave_number(m, n));
  }
  MatrixX<Scalar> periodic = inverse_real(spectrum);
  const Scalar dtheta = two_pi_v<Scalar> / Scalar(n);
  MatrixX<Scalar> out(n, d);
  for (Index i = 0; i < n; ++i)
    out.row(i) = periodic.row(i) - periodic.row(0) + mean * (Scalar(i) * dtheta);
  return out;
}

/// Band-limited resampling from n to m grid points.
template <typename Scalar>
MatrixX<Scalar> resample(const MatrixX<Scalar>& values, Index m) {
  const Index n = values.rows(), d = values.cols();
  if (m == n) return values;
  ComplexMatrix<Scalar> src = forward(values);
  ComplexMatrix<Scalar> dst = ComplexMatrix<Scalar>::Zero(m, d);
  const Scalar scale = Scalar(m) / Scalar(n);
  const Index half = std::min(n, m) / 2;
  auto bin = [](Index k, Index len) { return k >= 0 ? k : len + k; };
  for (Index k = -(half - 1); k <= half - 1; ++k)
    dst.row(bin(k, m)) = src.row(bin(k, n)) * scale;
  if (std::min(n, m) % 2 == 0) {
    // Nyquist of the shorter transform; split or fold to keep data real.
    if (m > n) {
      dst.row(n / 2) += src.row(n / 2) * (scale / Scalar(2));
      dst.row(m - n / 2) += src.row(n / 2) * (scale / Scalar(2));
    } else if (m < n) {
      dst.row(m / 2) = (src.row(m / 2) + src.row(n - m / 2)) * scale;
    }
  } else if (std::min(n, m) > 1 && std::min(n, m) % 2 == 1) {
    const Index k = std::min(n, m) / 2;
    dst.row(bin(k, m)) = src.row(bin(k, n)) * scale;
    dst.row(bin(-k, m)) = src.row(bin(-k, n)) * scale;
  }
  return inverse_real(dst);
}

/// Evaluate the trigonometric interpolant at arbitrary angles.
template <typename Scalar>
MatrixX<Scalar> evaluate(const MatrixX<Scalar>& values, const VectorX<Scalar>& thetas) {
  const Index n = values.rows(), d = values.cols(), m = thetas.size();
  ComplexMatrix<Scalar> spectrum = forward(values);
  spectrum /= Scalar(n);
  MatrixX<Scalar> out = MatrixX<Scalar>::Zero(m, d);
  const Index half = (n - 1) / 2;
  for (Index i = 0; i < m; ++i) {
    const Scalar t = thetas[i];
    for (Index c = 0; c < d; ++c) out(i, c) = spectrum(0, c).real();
    for (Index k = 1; k <= half; ++k) {
      const Scalar ck = std::cos(Scalar(k) * t), sk = std::sin(Scalar(k) * t);
      for (Index c = 0; c < d; ++c) {
        const auto a = spectrum(k, c);
        out(i, c) += Scalar(2) * (a.real() * ck - a.imag() * sk);
      }
    }
    if (n % 2 == 0) {
      const Scalar cn = std::cos(Scalar(n / 2) * t);
      for (Index c = 0; c < d; ++c) out(i, c) += spectrum(n / 2, c).real() * cn;
    }
  }
  return out;
}

/// Per-column solve diag(symbol) * x_hat = rhs_hat in Fourier space.
/// `symbol` is indexed by FFT bin and must be nonzero.
template <typename Scalar>
MatrixX<Scalar> solve_symbol(const MatrixX<Scalar>& rhs, const VectorX<Scalar>& symbol) {
  const Index n = rhs.rows();
  if (symbol.size() != n) throw std::invalid_argument("solve_symbol: symbol size mismatch");
  ComplexMatrix<Scalar> spectrum = forward(rhs);
  for (Index m = 0; m < n; ++m) spectrum.row(m) /= symbol[m];
  return inverse_real(spectrum);
}

}  // namespace fourier
}  // namespace curvespace
