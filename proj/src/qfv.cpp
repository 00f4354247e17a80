#include "quasc/qfv.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "quasc/error.hpp"

namespace quasc {
namespace {

constexpr std::array<char, 4> kMagic = {'Q', 'F', 'V', '1'};

std::uint32_t load_le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_le32(std::uint32_t v, unsigned char* p) {
  p[0] = static_cast<unsigned char>(v & 0xffu);
  p[1] = static_cast<unsigned char>((v >> 8) & 0xffu);
  p[2] = static_cast<unsigned char>((v >> 16) & 0xffu);
  p[3] = static_cast<unsigned char>((v >> 24) & 0xffu);
}

}  // namespace

FeatureBlob read_qfv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open feature blob '" + path.string() + "'");

  std::array<unsigned char, 12> header{};
  if (!in.read(reinterpret_cast<char*>(header.data()), header.size()))
    throw DataError("feature blob '" + path.string() + "' is truncated (no header)");
  if (std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0)
    throw DataError("feature blob '" + path.string() + "' has bad magic (expected QFV1)");

  FeatureBlob blob;
  blob.rows = load_le32(header.data() + 4);
  blob.dimension = load_le32(header.data() + 8);
  const std::size_t count = static_cast<std::size_t>(blob.rows) * blob.dimension;

  std::vector<unsigned char> raw(count * 4);
  if (count > 0 && !in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
    throw DataError("feature blob '" + path.string() + "' is truncated: expected " +
                    std::to_string(blob.rows) + " x " + std::to_string(blob.dimension) + " floats");
  if (in.peek() != std::char_traits<char>::eof())
    throw DataError("feature blob '" + path.string() + "' has trailing bytes");

  blob.values.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    blob.values[i] = std::bit_cast<float>(load_le32(raw.data() + 4 * i));
  return blob;
}

void write_qfv(const std::filesystem::path& path, const FeatureBlob& blob) {
  if (blob.values.size() != static_cast<std::size_t>(blob.rows) * blob.dimension)
    throw DataError("feature blob for '" + path.string() + "' has inconsistent size");

  std::vector<unsigned char> bytes(12 + 4 * blob.values.size());
  std::memcpy(bytes.data(), kMagic.data(), kMagic.size());
  store_le32(blob.rows, bytes.data() + 4);
  store_le32(blob.dimension, bytes.data() + 8);
  for (std::size_t i = 0; i < blob.values.size(); ++i)
    store_le32(std::bit_cast<std::uint32_t>(blob.values[i]), bytes.data() + 12 + 4 * i);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write feature blob '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for feature blob '" + path.string() + "'");
}

}  // namespace quasc
