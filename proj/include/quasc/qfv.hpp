#pragma once

// QFV1 feature blobs: "QFV1", u32 row count, u32 dimension (both little-endian),
// then rows * dimension little-endian IEEE-754 float32 values in row-major order.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace quasc {

struct FeatureBlob {
  std::uint32_t rows = 0;
  std::uint32_t dimension = 0;
  std::vector<float> values;

  std::span<const float> row(std::size_t i) const {
    return {values.data() + i * dimension, dimension};
  }
};

FeatureBlob read_qfv(const std::filesystem::path& path);
void write_qfv(const std::filesystem::path& path, const FeatureBlob& blob);

}  // namespace quasc
