#include "jdst/checkpoint.hpp"

#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace jdst {

namespace {

constexpr char kMagic[8] = {'J', 'D', 'S', 'T', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const ParameterStore& params,
                     const std::string& meta_json) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("checkpoint: cannot open for writing: " + path);
  os.write(kMagic, sizeof(kMagic));
  write_pod<uint32_t>(os, kVersion);
  write_pod<uint64_t>(os, meta_json.size());
  os.write(meta_json.data(), static_cast<std::streamsize>(meta_json.size()));
  auto all = params.all();  // sorted by id
  write_pod<uint64_t>(os, all.size());
  for (const Parameter* p : all) {
    write_pod<uint32_t>(os, static_cast<uint32_t>(p->id.size()));
    os.write(p->id.data(), static_cast<std::streamsize>(p->id.size()));
    write_pod<uint32_t>(os, static_cast<uint32_t>(p->value.shape.size()));
    for (int d : p->value.shape) write_pod<uint32_t>(os, static_cast<uint32_t>(d));
    os.write(reinterpret_cast<const char*>(p->value.data.data()),
             static_cast<std::streamsize>(p->value.data.size() * sizeof(Real)));
  }
  if (!os) throw std::runtime_error("checkpoint: write failed: " + path);
}

std::vector<CheckpointEntry> read_checkpoint(const std::string& path, std::string* meta_json) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open: " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::string(magic, 8) != std::string(kMagic, 8))
    throw std::runtime_error("checkpoint: bad magic in " + path);
  uint32_t version = read_pod<uint32_t>(is);
  if (version != kVersion)
    throw std::runtime_error("checkpoint: unsupported format version " +
                             std::to_string(version));
  uint64_t meta_len = read_pod<uint64_t>(is);
  std::string meta(meta_len, '\0');
  is.read(meta.data(), static_cast<std::streamsize>(meta_len));
  if (!is) throw std::runtime_error("checkpoint: truncated metadata");
  if (meta_json) *meta_json = meta;

  uint64_t n = read_pod<uint64_t>(is);
  std::vector<CheckpointEntry> out;
  out.reserve(n);
  for (uint64_t i = 0; i < n; ++i) {
    uint32_t id_len = read_pod<uint32_t>(is);
    std::string id(id_len, '\0');
    is.read(id.data(), id_len);
    uint32_t ndim = read_pod<uint32_t>(is);
    std::vector<int> shape(ndim);
    for (uint32_t d = 0; d < ndim; ++d) shape[d] = static_cast<int>(read_pod<uint32_t>(is));
    Tensor t = Tensor::zeros(shape);
    is.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(Real)));
    if (!is) throw std::runtime_error("checkpoint: truncated data for parameter " + id);
    out.push_back({std::move(id), std::move(t)});
  }
  return out;
}

void load_checkpoint(const std::string& path, ParameterStore& params, std::string* meta_json) {
  auto entries = read_checkpoint(path, meta_json);
  if (entries.size() != params.count())
    throw std::runtime_error("checkpoint: parameter count mismatch: file has " +
                             std::to_string(entries.size()) + ", model has " +
                             std::to_string(params.count()));
  for (auto& e : entries) {
    Parameter* p = params.find(e.id);
    if (!p) throw std::runtime_error("checkpoint: unknown parameter id: " + e.id);
    if (p->value.shape != e.value.shape)
      throw std::runtime_error("checkpoint: shape mismatch for " + e.id + ": file " +
                               e.value.shape_str() + " vs model " + p->value.shape_str());
    p->value = std::move(e.value);
  }
}

}  // namespace jdst
