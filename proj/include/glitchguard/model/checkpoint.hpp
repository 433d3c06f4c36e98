#pragma once

#include <filesystem>
#include <string>

#include "glitchguard/error.hpp"
#include "glitchguard/model/autoencoder.hpp"

namespace glitchguard {

// Layout, all integers little-endian:
//   "GBLD" | u32 version | u32 text length | text (config + metadata, key=value lines)
//   then per parameter, in parameter_layout order:
//   u32 name length | name | u64 element count | f32 values
class CheckpointError : public FormatError {
 public:
  using FormatError::FormatError;
};

class BadMagicError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class TruncatedCheckpointError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class VersionMismatchError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

std::string serialize_checkpoint(const ModelCheckpoint& checkpoint);
ModelCheckpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const ModelCheckpoint& checkpoint, const std::filesystem::path& path);
ModelCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace glitchguard
