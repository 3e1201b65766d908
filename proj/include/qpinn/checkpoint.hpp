#pragma once

// Versioned text checkpoint. Doubles are stored as hex floats, so a
// save/load round trip is bit-exact.

#include <filesystem>
#include <stdexcept>
#include <string>

#include "qpinn/training.hpp"

namespace qpinn {

inline constexpr const char* kCheckpointTag = "QPINN-CHECKPOINT v1";

struct Checkpoint {
    std::string config_text;  // resolved run configuration
    TrainState state;
};

class CheckpointError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace qpinn
