#pragma once

#include "wavecast/spectral.hpp"
#include "wavecast/tensor.hpp"

#include <span>
#include <string>
#include <vector>

namespace wavecast {

inline constexpr std::size_t kDefaultHarmonics = 5;

struct HarmonicEnergy {
  std::size_t fundamental_index = 0;
  std::vector<std::size_t> harmonic_indices;
  double harmonic_energy = 0.0;  // E_h
  double total_energy = 0.0;     // E_f
  std::size_t n_harmonics = kDefaultHarmonics;
};

/// Which bins enter the total energy E_f.
enum class EnergySpectrum {
  OneSided,  // bins 1..floor(T/2)
  Full,      // bins 0..T-1, the literal two-sided sum
};

/// Fundamental k = strongest bin in 1..floor(T/2) (lowest index on ties);
/// E_h sums |F(ik)|^2 for i = 1..n while ik <= floor(T/2).
/// Throws ZeroSpectrum when E_f is zero.
template <typename Derived>
HarmonicEnergy harmonic_energy(const Eigen::MatrixBase<Derived>& signal,
                               std::size_t n_harmonics = kDefaultHarmonics,
                               EnergySpectrum mode = EnergySpectrum::OneSided) {
  const auto T = static_cast<std::size_t>(signal.size());
  if (T < 4) throw Error(ErrorKind::InvalidArgument, "harmonic energy needs T >= 4");
  if (n_harmonics < 1) throw Error(ErrorKind::InvalidArgument, "need at least one harmonic");
  const auto spectrum = dft(signal.template cast<double>());
  const std::size_t nyquist = T / 2;
  auto power = [&](std::size_t i) {
    const double a = spectrum.amplitudes(static_cast<Eigen::Index>(i));
    return a * a;
  };
  HarmonicEnergy out;
  out.n_harmonics = n_harmonics;
  out.fundamental_index = 1;
  for (std::size_t i = 2; i <= nyquist; ++i)
    if (spectrum.amplitudes(static_cast<Eigen::Index>(i)) >
        spectrum.amplitudes(static_cast<Eigen::Index>(out.fundamental_index)))
      out.fundamental_index = i;
  for (std::size_t i = 1; i <= n_harmonics && i * out.fundamental_index <= nyquist; ++i) {
    out.harmonic_indices.push_back(i * out.fundamental_index);
    out.harmonic_energy += power(i * out.fundamental_index);
  }
  const std::size_t first = mode == EnergySpectrum::Full ? 0 : 1;
  const std::size_t last = mode == EnergySpectrum::Full ? T - 1 : nyquist;
  double varying = 0.0;
  for (std::size_t i = 1; i < T; ++i) varying += power(i);
  for (std::size_t i = first; i <= last; ++i) out.total_energy += power(i);
  // Rounding leaves ~1e-32 relative energy in the non-DC bins of a constant signal.
  const double parseval = static_cast<double>(T) * signal.template cast<double>().squaredNorm();
  if (!(varying > 1e-20 * parseval) || !(out.total_energy > 0.0))
    throw Error(ErrorKind::ZeroSpectrum, "signal has no spectral energy");
  return out;
}

struct FusionWeights {
  double frequency = 0.0;  // w_f
  double time = 1.0;       // w_t = 1 - w_f

  static FusionWeights from_frequency(double w_f) { return {w_f, 1.0 - w_f}; }
};

/// w_f = E_h / E_f.
FusionWeights dhsew_weights(const HarmonicEnergy& energy);

struct FusionMode {
  enum class Kind { Dhsew, DhsewStrict, Fixed, Off };
  Kind kind = Kind::Dhsew;
  double fixed_frequency_weight = 0.5;

  static FusionMode parse(const std::string& text);
  std::string to_string() const;
};

/// Weights for one window from its H_s column; constant signals get w_f = 0.
template <typename Derived>
FusionWeights weights_for(const Eigen::MatrixBase<Derived>& wave_height, const FusionMode& mode,
                          std::size_t n_harmonics = kDefaultHarmonics) {
  switch (mode.kind) {
    case FusionMode::Kind::Off:
      return FusionWeights::from_frequency(0.0);
    case FusionMode::Kind::Fixed:
      return FusionWeights::from_frequency(mode.fixed_frequency_weight);
    case FusionMode::Kind::Dhsew:
    case FusionMode::Kind::DhsewStrict:
      try {
        return dhsew_weights(harmonic_energy(wave_height, n_harmonics,
                                             mode.kind == FusionMode::Kind::Dhsew
                                                 ? EnergySpectrum::OneSided
                                                 : EnergySpectrum::Full));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ZeroSpectrum) throw;
        return FusionWeights::from_frequency(0.0);
      }
  }
  return FusionWeights::from_frequency(0.0);
}

/// X_fused = w_f * x_fre + w_t * x, per sample along the leading axis. The
/// weights are constants: no gradient flows into them.
nn::Tensor fuse(const nn::Tensor& frequency_features, const nn::Tensor& time_features,
                std::span<const FusionWeights> weights);

}  // namespace wavecast
