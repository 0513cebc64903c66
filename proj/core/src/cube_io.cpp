#include "imclean/cube_io.hpp"

#include "imclean/errors.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace imclean {

namespace {

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void put_u64(std::ostream& os, std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

std::uint32_t get_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
std::uint64_t get_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}
double get_f64(std::istream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

struct Header {
  std::uint64_t rows = 0, channels = 0;
  std::uint64_t nx = 0, ny = 0;
  double pixel_rad = 0.0;
  double start_hz = 0.0, width_hz = 0.0;
};

void write_header(std::ostream& os, const char* magic, const Header& h) {
  os.write(magic, 4);
  put_u32(os, kCubeFormatVersion);
  put_u64(os, h.rows);
  put_u64(os, h.channels);
  put_u64(os, h.nx);
  put_u64(os, h.ny);
  put_f64(os, h.pixel_rad);
  put_f64(os, h.start_hz);
  put_f64(os, h.width_hz);
}

Header read_header(std::istream& is, const char* expected_magic,
                   const std::filesystem::path& path) {
  char magic[4] = {};
  is.read(magic, 4);
  if (!is || std::memcmp(magic, expected_magic, 4) != 0)
    throw IoError("bad magic in " + path.string() + " (expected " +
                  std::string(expected_magic, 4) + ")");
  const std::uint32_t version = get_u32(is);
  if (version != kCubeFormatVersion)
    throw IoError("version mismatch in " + path.string() + ": found " +
                  std::to_string(version));
  Header h;
  h.rows = get_u64(is);
  h.channels = get_u64(is);
  h.nx = get_u64(is);
  h.ny = get_u64(is);
  h.pixel_rad = get_f64(is);
  h.start_hz = get_f64(is);
  h.width_hz = get_f64(is);
  if (!is) throw IoError("truncated header in " + path.string());
  return h;
}

}  // namespace

void write_cube(const SpectralCube& cube, const std::filesystem::path& path) {
  if (!cube.data.allFinite())
    throw ValueError("write_cube: non-finite values in " + path.string());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");

  Header h;
  h.rows = static_cast<std::uint64_t>(cube.rows());
  h.channels = static_cast<std::uint64_t>(cube.channels());
  if (cube.grid) {
    h.nx = static_cast<std::uint64_t>(cube.grid->nx);
    h.ny = static_cast<std::uint64_t>(cube.grid->ny);
    h.pixel_rad = cube.grid->pixel_rad;
  }
  h.start_hz = cube.axis.start_hz;
  h.width_hz = cube.axis.width_hz;
  write_header(os, "IMC1", h);
  os.write(reinterpret_cast<const char*>(cube.data.data()),
           static_cast<std::streamsize>(cube.data.size() * sizeof(double)));
  if (!os) throw IoError("write failure on " + path.string());
}

SpectralCube read_cube(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  const Header h = read_header(is, "IMC1", path);

  SpectralCube cube;
  cube.axis = FrequencyAxis{h.start_hz, h.width_hz, static_cast<Index>(h.channels)};
  if (h.nx > 0 && h.ny > 0)
    cube.grid = SkyGrid{static_cast<Index>(h.nx), static_cast<Index>(h.ny), h.pixel_rad};
  cube.data.resize(static_cast<Index>(h.rows), static_cast<Index>(h.channels));
  is.read(reinterpret_cast<char*>(cube.data.data()),
          static_cast<std::streamsize>(cube.data.size() * sizeof(double)));
  if (is.gcount() != static_cast<std::streamsize>(cube.data.size() * sizeof(double)))
    throw IoError("truncated payload in " + path.string());
  is.peek();
  if (!is.eof()) throw IoError("trailing bytes in " + path.string());
  return cube;
}

void write_mask(const Mask& mask, const std::filesystem::path& path,
                const FrequencyAxis& axis, const std::optional<SkyGrid>& grid) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  Header h;
  h.rows = static_cast<std::uint64_t>(mask.rows());
  h.channels = static_cast<std::uint64_t>(mask.channels());
  if (grid) {
    h.nx = static_cast<std::uint64_t>(grid->nx);
    h.ny = static_cast<std::uint64_t>(grid->ny);
    h.pixel_rad = grid->pixel_rad;
  }
  h.start_hz = axis.start_hz;
  h.width_hz = axis.width_hz;
  write_header(os, "IMM1", h);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(mask.flags.size()));
  for (Index r = 0, k = 0; r < mask.rows(); ++r)
    for (Index c = 0; c < mask.channels(); ++c, ++k)
      bytes[static_cast<std::size_t>(k)] = mask.flags(r, c) ? 1 : 0;
  os.write(reinterpret_cast<const char*>(bytes.data()),
           static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("write failure on " + path.string());
}

Mask read_mask(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  const Header h = read_header(is, "IMM1", path);
  std::vector<std::uint8_t> bytes(h.rows * h.channels);
  is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (is.gcount() != static_cast<std::streamsize>(bytes.size()))
    throw IoError("truncated payload in " + path.string());
  Mask mask = Mask::zeros(static_cast<Index>(h.rows), static_cast<Index>(h.channels));
  for (Index r = 0, k = 0; r < mask.rows(); ++r)
    for (Index c = 0; c < mask.channels(); ++c, ++k) {
      const std::uint8_t b = bytes[static_cast<std::size_t>(k)];
      if (b > 1) throw IoError("invalid mask byte in " + path.string());
      mask.flags(r, c) = b != 0;
    }
  return mask;
}

}  // namespace imclean
