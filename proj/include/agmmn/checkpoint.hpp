#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "agmmn/nn.hpp"

namespace agmmn {

struct CheckpointMeta {
    std::vector<double> final_bandwidths;
    int epochs = 0;
    std::string stop_reason;
    std::uint64_t seed = 0;
    std::map<std::string, std::uint64_t> seeds;  ///< named substream seeds
};

struct Checkpoint {
    static constexpr int kFormatVersion = 1;

    MlpModel model;
    CheckpointMeta meta;
};

/// JSON text: format tag and version, architecture, per-layer weight rows and
/// biases (shortest round-trip decimals), metadata. Deterministic byte for
/// byte for a given checkpoint.
std::string checkpoint_to_text(const Checkpoint& checkpoint);

/// Throws std::invalid_argument on unknown formats or versions, shape
/// mismatches or non-finite parameters.
Checkpoint checkpoint_from_text(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace agmmn
