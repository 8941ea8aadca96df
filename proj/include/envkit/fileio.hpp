#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "envkit/params.hpp"

namespace envkit::io {

// Writes to a temp file in the same directory, then renames over the target.
void atomic_write(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

// Flat `key=value` config format, one entry per line; '#' starts a comment.
Params parse_config(const std::string& text);
Params load_config(const std::string& path);

// Versioned binary checkpoint for dense-net parameters: magic, version,
// flags, layer dims, then row-major weights as little-endian 64-bit floats.
struct Checkpoint {
    std::uint32_t version = 1;
    std::uint32_t shared_torso = 0;
    std::vector<std::uint32_t> layer_dims; // sizes of every tensor, flattened spec below
    std::vector<double> data;
};

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::string& bytes);

} // namespace envkit::io

namespace envkit::nn {
struct MlpParams;
}

namespace envkit::io {

// Dense-net parameters round-trip losslessly through the checkpoint format;
// the net structure is rebuilt from the stored layer dims.
Checkpoint checkpoint_from_mlp(const nn::MlpParams& params);
nn::MlpParams mlp_from_checkpoint(const Checkpoint& ckpt);

} // namespace envkit::io
