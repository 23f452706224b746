#include "cuboidkit/voxel_grid.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "cuboidkit/errors.hpp"

namespace cuboidkit {
namespace {
constexpr std::array<char, 4> kMagic{'C', 'V', 'O', 'X'};
constexpr unsigned char kVersion = 0x01;
}  // namespace

VoxelGrid::VoxelGrid(int n) : n_(n), size_(0) {
  if (n < 2) throw PreconditionError("voxel resolution must be >= 2, got " + std::to_string(n));
  size_ = static_cast<std::size_t>(n) * static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  words_.assign((size_ + 63) / 64, 0);
}

void VoxelGrid::fill_box(int x0, int y0, int z0, int x1, int y1, int z1) {
  for (int y = y0; y < y1; ++y)
    for (int z = z0; z < z1; ++z)
      for (int x = x0; x < x1; ++x) set(x, y, z);
}

void write_cvox(std::ostream& out, const VoxelGrid& grid) {
  out.write(kMagic.data(), kMagic.size());
  out.put(static_cast<char>(kVersion));
  const auto n = static_cast<std::uint32_t>(grid.n());
  for (int b = 0; b < 4; ++b) out.put(static_cast<char>((n >> (8 * b)) & 0xFF));
  const std::size_t nbytes = (grid.size() + 7) / 8;
  const auto words = grid.words();
  for (std::size_t i = 0; i < nbytes; ++i) {
    out.put(static_cast<char>((words[i / 8] >> (8 * (i % 8))) & 0xFF));
  }
  if (!out) throw Error("failed to write CVOX stream");
}

VoxelGrid read_cvox(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw FormatError("not a CVOX stream (bad magic)");
  const int version = in.get();
  if (version != kVersion) throw FormatError("unsupported CVOX version " + std::to_string(version));
  std::uint32_t n = 0;
  for (int b = 0; b < 4; ++b) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw FormatError("truncated CVOX header");
    n |= static_cast<std::uint32_t>(c) << (8 * b);
  }
  if (n < 2 || n > 4096) throw FormatError("CVOX resolution out of range: " + std::to_string(n));
  VoxelGrid grid(static_cast<int>(n));
  const std::size_t nbytes = (grid.size() + 7) / 8;
  auto words = grid.words();
  for (std::size_t i = 0; i < nbytes; ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw FormatError("truncated CVOX payload");
    words[i / 8] |= static_cast<std::uint64_t>(c) << (8 * (i % 8));
  }
  // Padding bits past n^3 are ignored.
  for (std::size_t i = grid.size(); i < words.size() * 64; ++i) grid.reset(i);
  return grid;
}

void save_cvox(const std::filesystem::path& path, const VoxelGrid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_cvox(out, grid);
}

VoxelGrid load_cvox(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_cvox(in);
}

}  // namespace cuboidkit
