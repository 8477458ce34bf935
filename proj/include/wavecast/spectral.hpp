#pragma once

#include "wavecast/error.hpp"
#include "wavecast/types.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <vector>

namespace wavecast {

namespace detail {

inline std::size_t smallest_factor(std::size_t n) {
  for (std::size_t p = 2; p * p <= n; ++p)
    if (n % p == 0) return p;
  return n;
}

// Largest prime handled by the direct O(n*p) butterfly; bigger prime lengths
// go through Bluestein's chirp-z convolution.
inline constexpr std::size_t kDirectPrimeLimit = 13;

template <typename Scalar>
std::complex<Scalar> twiddle(std::size_t index, std::size_t n, Scalar sign) {
  const Scalar angle = sign * Scalar(2) * std::numbers::pi_v<Scalar> *
                       static_cast<Scalar>(index % n) / static_cast<Scalar>(n);
  return {std::cos(angle), std::sin(angle)};
}

template <typename Scalar>
void fft_recursive(std::vector<std::complex<Scalar>>& data, Scalar sign);

template <typename Scalar>
void bluestein(std::vector<std::complex<Scalar>>& data, Scalar sign) {
  using Complex = std::complex<Scalar>;
  const std::size_t n = data.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  std::vector<Complex> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // exp(sign * i * pi * k^2 / n); k^2 reduced mod 2n to keep the angle small
    const std::size_t k2 = (k * k) % (2 * n);
    const Scalar angle = sign * std::numbers::pi_v<Scalar> * static_cast<Scalar>(k2) /
                         static_cast<Scalar>(n);
    chirp[k] = {std::cos(angle), std::sin(angle)};
  }
  std::vector<Complex> a(m), b(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = data[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);
  fft_recursive(a, Scalar(-1));
  fft_recursive(b, Scalar(-1));
  for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
  fft_recursive(a, Scalar(1));
  const Scalar inv_m = Scalar(1) / static_cast<Scalar>(m);
  for (std::size_t k = 0; k < n; ++k) data[k] = chirp[k] * a[k] * inv_m;
}

// Decimation-in-time mixed-radix transform: X[k] = sum_t x[t] exp(sign*2*pi*i*k*t/n).
template <typename Scalar>
void fft_recursive(std::vector<std::complex<Scalar>>& data, Scalar sign) {
  using Complex = std::complex<Scalar>;
  const std::size_t n = data.size();
  if (n <= 1) return;
  const std::size_t p = smallest_factor(n);
  if (p == n && p > kDirectPrimeLimit) {
    bluestein(data, sign);
    return;
  }
  const std::size_t m = n / p;
  std::vector<std::vector<Complex>> subs(p, std::vector<Complex>(m));
  for (std::size_t q = 0; q < m; ++q)
    for (std::size_t r = 0; r < p; ++r) subs[r][q] = data[q * p + r];
  if (m > 1)
    for (auto& sub : subs) fft_recursive(sub, sign);
  for (std::size_t s = 0; s < p; ++s) {
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t out = k + m * s;
      Complex acc = subs[0][k];
      for (std::size_t r = 1; r < p; ++r) acc += twiddle<Scalar>(r * out, n, sign) * subs[r][k];
      data[out] = acc;
    }
  }
}

}  // namespace detail

/// Fourier coefficients F(k) = sum_t x_t exp(-2*pi*i*k*t/T) and their moduli.
template <typename Scalar>
struct Spectrum {
  Vector<std::complex<Scalar>> coefficients;
  Vector<Scalar> amplitudes;

  std::size_t length() const { return static_cast<std::size_t>(coefficients.size()); }
};

template <typename Derived>
Spectrum<typename Derived::Scalar> dft(const Eigen::MatrixBase<Derived>& signal) {
  using Scalar = typename Derived::Scalar;
  const auto n = static_cast<std::size_t>(signal.size());
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "dft needs at least 2 samples");
  std::vector<std::complex<Scalar>> data(n);
  for (std::size_t t = 0; t < n; ++t) data[t] = signal(static_cast<Eigen::Index>(t));
  detail::fft_recursive(data, Scalar(-1));
  Spectrum<Scalar> out;
  out.coefficients = Eigen::Map<Vector<std::complex<Scalar>>>(data.data(),
                                                              static_cast<Eigen::Index>(n));
  out.amplitudes = out.coefficients.cwiseAbs();
  return out;
}

/// Inverse transform with the 1/T factor.
template <typename Derived>
Vector<typename Derived::Scalar::value_type> idft_real(const Eigen::MatrixBase<Derived>& coefficients) {
  using Scalar = typename Derived::Scalar::value_type;
  const auto n = static_cast<std::size_t>(coefficients.size());
  std::vector<std::complex<Scalar>> data(coefficients.derived().data(),
                                         coefficients.derived().data() + n);
  detail::fft_recursive(data, Scalar(1));
  Vector<Scalar> out(static_cast<Eigen::Index>(n));
  for (std::size_t t = 0; t < n; ++t)
    out(static_cast<Eigen::Index>(t)) = data[t].real() / static_cast<Scalar>(n);
  return out;
}

struct PeriodChoice {
  std::size_t frequency_index = 0;
  std::size_t period = 0;

  bool operator==(const PeriodChoice&) const = default;
};

/// The k strongest bins among 1..floor(T/2); period = floor(T / index).
/// Ties go to the lower index; repeated periods are dropped.
template <typename Scalar>
std::vector<PeriodChoice> topk_periods(const Spectrum<Scalar>& spectrum, std::size_t k) {
  const std::size_t T = spectrum.length();
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  if (T < 4) throw Error(ErrorKind::InvalidArgument, "period search needs T >= 4");
  std::vector<std::size_t> bins(T / 2);
  std::iota(bins.begin(), bins.end(), std::size_t{1});
  std::stable_sort(bins.begin(), bins.end(), [&](std::size_t a, std::size_t b) {
    return spectrum.amplitudes(static_cast<Eigen::Index>(a)) >
           spectrum.amplitudes(static_cast<Eigen::Index>(b));
  });
  std::vector<PeriodChoice> out;
  for (std::size_t i = 0; i < std::min(k, bins.size()); ++i) {
    const PeriodChoice choice{bins[i], T / bins[i]};
    const bool seen = std::any_of(out.begin(), out.end(), [&](const PeriodChoice& c) {
      return c.period == choice.period;
    });
    if (!seen) out.push_back(choice);
  }
  return out;
}

template <typename Scalar>
struct PeriodMap {
  std::size_t frequency_index = 0;
  std::size_t period = 0;
  Matrix<Scalar> map;  // [period x ceil(T/period)], row-major fill
  std::size_t pad_count = 0;
};

/// Zero-pads to a multiple of the period and folds row by row into a
/// period x ceil(T/period) matrix.
template <typename Derived>
PeriodMap<typename Derived::Scalar> frequency_reshape(const Eigen::MatrixBase<Derived>& values,
                                                      std::size_t period) {
  using Scalar = typename Derived::Scalar;
  const auto T = static_cast<std::size_t>(values.size());
  if (period < 2 || period > T)
    throw Error(ErrorKind::InvalidArgument, "period must lie in [2, T]");
  const std::size_t cols = (T + period - 1) / period;
  PeriodMap<Scalar> out;
  out.period = period;
  out.pad_count = cols * period - T;
  out.map = Matrix<Scalar>::Zero(static_cast<Eigen::Index>(period), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < T; ++i)
    out.map(static_cast<Eigen::Index>(i / cols), static_cast<Eigen::Index>(i % cols)) =
        values(static_cast<Eigen::Index>(i));
  return out;
}

/// Row-major flatten with the padding removed.
template <typename Scalar>
Vector<Scalar> flatten(const PeriodMap<Scalar>& pm) {
  const auto cols = static_cast<std::size_t>(pm.map.cols());
  const std::size_t T = static_cast<std::size_t>(pm.map.size()) - pm.pad_count;
  Vector<Scalar> out(static_cast<Eigen::Index>(T));
  for (std::size_t i = 0; i < T; ++i)
    out(static_cast<Eigen::Index>(i)) =
        pm.map(static_cast<Eigen::Index>(i / cols), static_cast<Eigen::Index>(i % cols));
  return out;
}

inline constexpr double kMorletOmega0 = 6.0;
inline constexpr std::size_t kDefaultScaleCount = 32;
inline constexpr double kMinScale = 0.5;
inline constexpr double kMaxScale = 32.0;

template <typename Scalar = double>
Vector<Scalar> log_scales(std::size_t count = kDefaultScaleCount, Scalar lo = Scalar(kMinScale),
                          Scalar hi = Scalar(kMaxScale)) {
  if (count < 1 || !(lo > 0) || !(hi >= lo))
    throw Error(ErrorKind::InvalidArgument, "scale grid needs count >= 1 and 0 < lo <= hi");
  Vector<Scalar> out(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    const Scalar frac = count == 1 ? Scalar(0) : Scalar(i) / Scalar(count - 1);
    out(static_cast<Eigen::Index>(i)) = lo * std::pow(hi / lo, frac);
  }
  return out;
}

/// Complex Morlet transform by direct summation over the window, zero outside
/// [0, T). Row s holds translations b = 0..T-1 at scale a_s, normalized by 1/sqrt(a).
template <typename DerivedX, typename DerivedS>
Matrix<std::complex<typename DerivedX::Scalar>> cwt_morlet_complex(
    const Eigen::MatrixBase<DerivedX>& values, const Eigen::MatrixBase<DerivedS>& scales,
    typename DerivedX::Scalar omega0 = typename DerivedX::Scalar(kMorletOmega0)) {
  using Scalar = typename DerivedX::Scalar;
  using Complex = std::complex<Scalar>;
  const Eigen::Index T = values.size();
  if (T < 8) throw Error(ErrorKind::InvalidArgument, "cwt needs T >= 8");
  if ((scales.array() <= Scalar(0)).any())
    throw Error(ErrorKind::InvalidArgument, "cwt scales must be positive");
  const Scalar norm = Scalar(1) / std::pow(std::numbers::pi_v<Scalar>, Scalar(0.25));
  Matrix<Complex> out(scales.size(), T);
  for (Eigen::Index s = 0; s < scales.size(); ++s) {
    const Scalar a = scales(s);
    const Scalar inv_sqrt_a = Scalar(1) / std::sqrt(a);
    // conj(psi(u)) depends only on t - b, so tabulate it once per scale.
    std::vector<Complex> kernel(static_cast<std::size_t>(2 * T - 1));
    for (Eigen::Index d = -(T - 1); d <= T - 1; ++d) {
      const Scalar u = Scalar(d) / a;
      const Scalar envelope = norm * std::exp(-u * u / Scalar(2));
      kernel[static_cast<std::size_t>(d + T - 1)] =
          Complex(envelope * std::cos(omega0 * u), -envelope * std::sin(omega0 * u));
    }
    for (Eigen::Index b = 0; b < T; ++b) {
      Complex acc(0, 0);
      for (Eigen::Index t = 0; t < T; ++t)
        acc += values(t) * kernel[static_cast<std::size_t>(t - b + T - 1)];
      out(s, b) = acc * inv_sqrt_a;
    }
  }
  return out;
}

template <typename Scalar>
struct Scalogram {
  Vector<Scalar> scales;
  Matrix<Scalar> map;  // [n_scales x T], |CWT(a, b)|
};

template <typename DerivedX, typename DerivedS>
Scalogram<typename DerivedX::Scalar> cwt_morlet(const Eigen::MatrixBase<DerivedX>& values,
                                                const Eigen::MatrixBase<DerivedS>& scales) {
  Scalogram<typename DerivedX::Scalar> out;
  out.scales = scales;
  out.map = cwt_morlet_complex(values, scales).cwiseAbs();
  return out;
}

}  // namespace wavecast
