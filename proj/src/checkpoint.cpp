#include "wavecast/checkpoint.hpp"

#include "wavecast/csv_io.hpp"
#include "wavecast/error.hpp"

#include <bit>
#include <cstring>
#include <unordered_map>

namespace wavecast {

namespace {

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out += static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  bool done() const { return pos_ == bytes_.size(); }

  template <typename T>
  T get() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorKind::BadCheckpoint, "truncated checkpoint");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const ParameterList& params) {
  std::string out(kCheckpointMagic, 4);
  put_le<std::uint16_t>(out, kCheckpointVersion);
  for (const auto& p : params) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
    out += p.name;
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.tensor.rank()));
    for (std::size_t d : p.tensor.shape()) put_le<std::uint64_t>(out, d);
    for (double v : p.tensor.data()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

std::vector<CheckpointEntry> parse_checkpoint(std::string_view bytes) {
  Reader in(bytes);
  if (in.take(4) != std::string_view(kCheckpointMagic, 4))
    throw Error(ErrorKind::BadCheckpoint, "missing WVCK magic");
  const auto version = in.get<std::uint16_t>();
  if (version != kCheckpointVersion)
    throw Error(ErrorKind::BadCheckpoint, "unsupported checkpoint version " + std::to_string(version));
  std::vector<CheckpointEntry> entries;
  while (!in.done()) {
    CheckpointEntry e;
    e.name = std::string(in.take(in.get<std::uint32_t>()));
    const auto rank = in.get<std::uint32_t>();
    if (rank > 8) throw Error(ErrorKind::BadCheckpoint, "implausible rank for " + e.name);
    for (std::uint32_t i = 0; i < rank; ++i) e.shape.push_back(static_cast<std::size_t>(in.get<std::uint64_t>()));
    const std::size_t n = nn::numel(e.shape);
    if (n > bytes.size()) throw Error(ErrorKind::BadCheckpoint, "payload larger than file for " + e.name);
    e.data.resize(n);
    for (double& v : e.data) v = std::bit_cast<double>(in.get<std::uint64_t>());
    entries.push_back(std::move(e));
  }
  return entries;
}

void load_parameters(ParameterList& params, const std::vector<CheckpointEntry>& entries) {
  std::unordered_map<std::string, const CheckpointEntry*> by_name;
  for (const auto& e : entries) by_name[e.name] = &e;
  for (auto& p : params) {
    auto it = by_name.find(p.name);
    if (it == by_name.end()) throw Error(ErrorKind::BadCheckpoint, "checkpoint lacks " + p.name);
    if (it->second->shape != p.tensor.shape())
      throw Error(ErrorKind::BadCheckpoint, p.name + " has shape " + nn::shape_string(it->second->shape) +
                                                ", model expects " + nn::shape_string(p.tensor.shape()));
    std::copy(it->second->data.begin(), it->second->data.end(), p.tensor.mutable_data().begin());
  }
}

void save_checkpoint(const std::filesystem::path& path, const ParameterList& params) {
  write_file_atomic(path, serialize_checkpoint(params));
}

std::vector<CheckpointEntry> load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path));
}

}  // namespace wavecast
