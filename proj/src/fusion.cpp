#include "wavecast/fusion.hpp"

#include <charconv>

namespace wavecast {

FusionWeights dhsew_weights(const HarmonicEnergy& energy) {
  return FusionWeights::from_frequency(energy.harmonic_energy / energy.total_energy);
}

FusionMode FusionMode::parse(const std::string& text) {
  FusionMode mode;
  if (text == "dhsew") {
    mode.kind = Kind::Dhsew;
  } else if (text == "dhsew-strict") {
    mode.kind = Kind::DhsewStrict;
  } else if (text == "off") {
    mode.kind = Kind::Off;
  } else if (text.rfind("fixed:", 0) == 0) {
    mode.kind = Kind::Fixed;
    const std::string_view value = std::string_view(text).substr(6);
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), mode.fixed_frequency_weight);
    if (ec != std::errc{} || ptr != value.data() + value.size() || mode.fixed_frequency_weight < 0.0 ||
        mode.fixed_frequency_weight > 1.0)
      throw Error(ErrorKind::InvalidArgument, "fixed fusion weight must be a number in [0, 1]");
  } else {
    throw Error(ErrorKind::InvalidArgument,
                "fusion must be dhsew, dhsew-strict, fixed:<w_f> or off, got '" + text + "'");
  }
  return mode;
}

std::string FusionMode::to_string() const {
  switch (kind) {
    case Kind::Dhsew: return "dhsew";
    case Kind::DhsewStrict: return "dhsew-strict";
    case Kind::Off: return "off";
    case Kind::Fixed: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "fixed:%g", fixed_frequency_weight);
      return buf;
    }
  }
  return "dhsew";
}

nn::Tensor fuse(const nn::Tensor& frequency_features, const nn::Tensor& time_features,
                std::span<const FusionWeights> weights) {
  if (frequency_features.shape() != time_features.shape())
    throw Error(ErrorKind::ShapeMismatch, "fuse: " + nn::shape_string(frequency_features.shape()) +
                                              " vs " + nn::shape_string(time_features.shape()));
  std::vector<double> wf, wt;
  for (const auto& w : weights) {
    wf.push_back(w.frequency);
    wt.push_back(w.time);
  }
  return nn::add(nn::scale_rows(frequency_features, wf), nn::scale_rows(time_features, wt));
}

}  // namespace wavecast
