#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace cuboidkit {

/// Bit-packed n^3 occupancy grid. Linear index is x-fastest, then z, then y:
/// index = x + n * (z + n * y).
class VoxelGrid {
 public:
  /// Throws PreconditionError when n < 2.
  explicit VoxelGrid(int n);

  int n() const { return n_; }
  std::size_t size() const { return size_; }

  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(n_) * (static_cast<std::size_t>(z) +
                                           static_cast<std::size_t>(n_) * static_cast<std::size_t>(y));
  }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  bool test(int x, int y, int z) const { return test(index(x, y, z)); }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void set(int x, int y, int z) { set(index(x, y, z)); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  /// Sets every voxel of the half-open box [lo, hi).
  void fill_box(int x0, int y0, int z0, int x1, int y1, int z1);

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  friend bool operator==(const VoxelGrid&, const VoxelGrid&) = default;

 private:
  int n_;
  std::size_t size_;
  std::vector<std::uint64_t> words_;
};

/// CVOX: "CVOX", version 0x01, u32 little-endian n, then ceil(n^3/8) bytes.
/// Voxel i is bit (i % 8) of byte (i / 8), least significant bit first.
void write_cvox(std::ostream& out, const VoxelGrid& grid);
VoxelGrid read_cvox(std::istream& in);
void save_cvox(const std::filesystem::path& path, const VoxelGrid& grid);
VoxelGrid load_cvox(const std::filesystem::path& path);

}  // namespace cuboidkit
