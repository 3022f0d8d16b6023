#pragma once

#include <string>
#include <vector>

#include "jdst/params.hpp"

namespace jdst {

// Checkpoint container: format-versioned binary file holding a JSON metadata
// blob (model config + vocabulary) plus every parameter as id -> shape +
// flat float64 array, sorted by id. Layout (little endian):
//
//   byte[8]  magic "JDSTCKPT"
//   u32      format version (currently 1)
//   u64      metadata length, followed by that many JSON bytes
//   u64      parameter count
//   repeated: u32 id length, id bytes, u32 ndim, u32 dims[ndim], f64 data[]
//
// Writing is deterministic, so save -> load -> save is byte identical.
struct CheckpointEntry {
  std::string id;
  Tensor value;
};

void save_checkpoint(const std::string& path, const ParameterStore& params,
                     const std::string& meta_json);

// Reads all entries without needing a model (used by inspect-checkpoint).
std::vector<CheckpointEntry> read_checkpoint(const std::string& path, std::string* meta_json);

// Loads values into an already-built store; every id and shape must match.
void load_checkpoint(const std::string& path, ParameterStore& params, std::string* meta_json);

}  // namespace jdst
