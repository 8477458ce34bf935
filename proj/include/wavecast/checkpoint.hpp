#pragma once

#include "wavecast/tensor.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace wavecast {

struct NamedParameter {
  std::string name;
  nn::Tensor tensor;
};

using ParameterList = std::vector<NamedParameter>;

inline constexpr char kCheckpointMagic[4] = {'W', 'V', 'C', 'K'};
inline constexpr std::uint16_t kCheckpointVersion = 1;

/// WVCK layout, all integers little-endian:
///   "WVCK" | u16 version | repeated until EOF:
///   u32 name_len | name bytes | u32 rank | u64 dims[rank] | f64 payload[prod(dims)]
std::string serialize_checkpoint(const ParameterList& params);

struct CheckpointEntry {
  std::string name;
  nn::Shape shape;
  std::vector<double> data;
};

std::vector<CheckpointEntry> parse_checkpoint(std::string_view bytes);

/// Copies entries into params by name; shapes must agree and every parameter
/// must be present.
void load_parameters(ParameterList& params, const std::vector<CheckpointEntry>& entries);

void save_checkpoint(const std::filesystem::path& path, const ParameterList& params);
std::vector<CheckpointEntry> load_checkpoint(const std::filesystem::path& path);

}  // namespace wavecast
