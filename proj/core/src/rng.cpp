#include "imclean/rng.hpp"

#include <cmath>

namespace imclean::rng {

namespace {

constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMult1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline std::uint64_t mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t* hi) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  *hi = static_cast<std::uint64_t>(p >> 64);
  return static_cast<std::uint64_t>(p);
}

inline void round_once(std::array<std::uint64_t, 4>& ctr,
                       const std::array<std::uint64_t, 2>& key) {
  std::uint64_t hi0, hi1;
  const std::uint64_t lo0 = mulhilo(kMult0, ctr[0], &hi0);
  const std::uint64_t lo1 = mulhilo(kMult1, ctr[2], &hi1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& counter,
                                        const std::array<std::uint64_t, 2>& key) {
  std::array<std::uint64_t, 4> ctr = counter;
  std::array<std::uint64_t, 2> k = key;
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    round_once(ctr, k);
  }
  return ctr;
}

double CounterRng::uniform_at(std::uint64_t index) const {
  // 53-bit mantissa, offset by half an ulp so 0 is never returned.
  const std::uint64_t bits = uint64_at(index);
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::gaussian_at(std::uint64_t index) const {
  const std::uint64_t pair = index / 2;
  const double u1 = uniform_at(2 * pair);
  const double u2 = uniform_at(2 * pair + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  return (index % 2 == 0) ? r * std::cos(theta) : r * std::sin(theta);
}

double CounterRng::uniform_at(std::uint64_t slot, std::uint64_t index) const {
  const std::uint64_t bits = uint64_at(slot, index);
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::gaussian_at(std::uint64_t slot, std::uint64_t index) const {
  const std::uint64_t pair = index / 2;
  const double u1 = uniform_at(slot, 2 * pair);
  const double u2 = uniform_at(slot, 2 * pair + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  return (index % 2 == 0) ? r * std::cos(theta) : r * std::sin(theta);
}

std::uint64_t Sequence::next_below(std::uint64_t bound) {
  const std::uint64_t x = next_uint64();
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(x) * bound) >> 64);
}

}  // namespace imclean::rng
