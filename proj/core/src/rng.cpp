#include "vlab/rng.hpp"

#include <cmath>
#include <numbers>

namespace vlab {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline std::array<std::uint32_t, 4> block(const StreamId& id, std::uint64_t k) {
  // Counter words: draw index, component, path (lo, hi). Draw index beyond 2^32 is not needed
  // (at most one block per two normals of one path component).
  return philox4x32({static_cast<std::uint32_t>(k), id.component,
                     static_cast<std::uint32_t>(id.path), static_cast<std::uint32_t>(id.path >> 32)},
                    {static_cast<std::uint32_t>(id.seed), static_cast<std::uint32_t>(id.seed >> 32)});
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

void fill_normals(const StreamId& id, std::uint64_t first, double* out, std::size_t n) {
  std::size_t written = 0;
  std::uint64_t idx = first;
  while (written < n) {
    const auto w = block(id, idx / 2);
    const double u1 = to_unit(w[0], w[1]);
    const double u2 = to_unit(w[2], w[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    if (idx % 2 == 0) {
      out[written++] = r * std::cos(angle);
      ++idx;
      if (written == n) break;
    }
    out[written++] = r * std::sin(angle);
    ++idx;
  }
}

double stream_uniform(const StreamId& id, std::uint64_t k) {
  const auto w = block(id, k / 2);
  return k % 2 == 0 ? to_unit(w[0], w[1]) : to_unit(w[2], w[3]);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  // splitmix64 finalizer over the mixed pair
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace vlab
