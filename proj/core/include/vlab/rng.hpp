#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace vlab {

/// Philox4x32-10 counter-based generator (Salmon et al. 2011). Stateless: one call maps
/// (counter, key) to four 32-bit words.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Address of an independent normal stream: one per (seed, path, component).
struct StreamId {
  std::uint64_t seed = 0;
  std::uint64_t path = 0;
  std::uint32_t component = 0;
};

/// Fills out[0..n) with standard normals number first..first+n of the stream.
/// Entry k depends only on (id, k), so any split of the work gives identical values.
void fill_normals(const StreamId& id, std::uint64_t first, double* out, std::size_t n);

/// Single uniform in (0,1), entry k of the stream (for tests and spot checks).
double stream_uniform(const StreamId& id, std::uint64_t k);

/// Derives a new seed for a named sub-experiment, so related runs never share draws.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace vlab
