#pragma once

#include "imclean/cube.hpp"

#include <filesystem>

namespace imclean {

// Binary container, all fields little-endian:
//   magic "IMC1" (cube, f64 payload) or "IMM1" (mask, u8 payload)
//   u32 format version (currently 1)
//   u64 n_rows, u64 n_channels
//   u64 grid nx, u64 grid ny, f64 pixel size [rad]   (zeros when absent)
//   f64 start frequency [Hz], f64 channel width [Hz]
//   row-major payload

inline constexpr std::uint32_t kCubeFormatVersion = 1;

/// Writes a cube. Throws ValueError on non-finite values, IoError on I/O failure.
void write_cube(const SpectralCube& cube, const std::filesystem::path& path);

/// Reads a cube written by write_cube. Rejects bad magic, version mismatch,
/// and truncated payloads.
SpectralCube read_cube(const std::filesystem::path& path);

/// Mask files reuse the cube header; axis/grid describe the owning cube and
/// may be defaulted when the mask stands alone.
void write_mask(const Mask& mask, const std::filesystem::path& path,
                const FrequencyAxis& axis = {0.0, 1.0, 0},
                const std::optional<SkyGrid>& grid = std::nullopt);

Mask read_mask(const std::filesystem::path& path);

}  // namespace imclean
