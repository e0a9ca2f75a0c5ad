#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <vector>

#include "vlab/paths.hpp"
#include "vlab/sde.hpp"

namespace vlab {

/// Binary layout (little-endian host order): 8-byte magic "VLABENS\0", then uint32 version,
/// uint32 scheme, uint64 seed, n_paths, n_nodes, dim, first_path, uint32 kind, uint32 reserved,
/// then n_paths·n_nodes·dim doubles in [path][node][component] order.
inline constexpr std::uint32_t kEnsembleFormatVersion = 1;
inline constexpr std::uint64_t kMaxEnsembleBytes = 2ull << 30;

enum class EnsembleKind : std::uint32_t { Noise = 0, Solution = 1 };

struct EnsembleHeader {
  std::uint32_t version = kEnsembleFormatVersion;
  Scheme scheme = Scheme::Exact;
  std::uint64_t seed = 0;
  std::uint64_t n_paths = 0;
  std::uint64_t n_nodes = 0;
  std::uint64_t dim = 0;
  std::uint64_t first_path = 0;
  EnsembleKind kind = EnsembleKind::Noise;
};

struct EnsembleFile {
  EnsembleHeader header;
  std::vector<double> values;
};

/// Writes the noise values; throws DomainError when the body would exceed 2 GB.
void write_ensemble(const std::filesystem::path& file, const PathEnsemble& ensemble);
/// Writes X values of a solution; the header carries the noise parameters.
void write_ensemble(const std::filesystem::path& file, const SolutionEnsemble& solution);
EnsembleFile read_ensemble(const std::filesystem::path& file);

/// JSON sidecar next to a binary file (same stem, .json).
void write_sidecar(const std::filesystem::path& file, const PathEnsemble& ensemble);
void write_sidecar(const std::filesystem::path& file, const SolutionEnsemble& solution);

/// Wide CSV: column t, then one column per selected path and component ("p<path>_c<comp>").
void write_paths_csv(std::ostream& out, const TimeGrid& grid, std::size_t dim, const std::vector<double>& values,
                     std::size_t n_paths, const std::vector<std::size_t>& paths, std::size_t first_path = 0);

}  // namespace vlab
