#include "vlab/ensemble_io.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "vlab/errors.hpp"
#include "vlab/serialization.hpp"

namespace vlab {

namespace {

constexpr std::array<char, 8> kMagic = {'V', 'L', 'A', 'B', 'E', 'N', 'S', '\0'};

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ValidationError("ensemble", "truncated header");
  return v;
}

void write_body(const std::filesystem::path& file, const EnsembleHeader& h, const std::vector<double>& values) {
  const std::uint64_t count = h.n_paths * h.n_nodes * h.dim;
  if (count != values.size()) throw DimensionMismatch("write_ensemble: value count does not match the header");
  if (count * sizeof(double) > kMaxEnsembleBytes)
    throw DomainError("write_ensemble: ensemble exceeds the 2 GB per-file limit");
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + file.string() + " for writing");
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, h.version);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(h.scheme));
  put<std::uint64_t>(out, h.seed);
  put<std::uint64_t>(out, h.n_paths);
  put<std::uint64_t>(out, h.n_nodes);
  put<std::uint64_t>(out, h.dim);
  put<std::uint64_t>(out, h.first_path);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(h.kind));
  put<std::uint32_t>(out, 0);
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!out) throw Error("write failed for " + file.string());
}

EnsembleHeader header_of(const PathEnsemble& e, EnsembleKind kind) {
  EnsembleHeader h;
  h.scheme = e.scheme();
  h.seed = e.seed();
  h.n_paths = e.n_paths();
  h.n_nodes = e.grid().n_nodes();
  h.dim = e.dim();
  h.first_path = e.first_path();
  h.kind = kind;
  return h;
}

void write_json(const std::filesystem::path& file, const Json& j) {
  std::filesystem::path side = file;
  side.replace_extension(".json");
  std::ofstream out(side, std::ios::trunc);
  if (!out) throw Error("cannot open " + side.string() + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace

void write_ensemble(const std::filesystem::path& file, const PathEnsemble& ensemble) {
  write_body(file, header_of(ensemble, EnsembleKind::Noise), ensemble.values());
}

void write_ensemble(const std::filesystem::path& file, const SolutionEnsemble& solution) {
  write_body(file, header_of(solution.noise(), EnsembleKind::Solution), solution.values());
}

EnsembleFile read_ensemble(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open " + file.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ValidationError("ensemble", "bad magic in " + file.string());
  EnsembleFile f;
  f.header.version = get<std::uint32_t>(in);
  if (f.header.version != kEnsembleFormatVersion) throw ValidationError("ensemble", "unsupported format version");
  const auto scheme = get<std::uint32_t>(in);
  if (scheme > 1) throw ValidationError("ensemble", "unknown scheme tag");
  f.header.scheme = static_cast<Scheme>(scheme);
  f.header.seed = get<std::uint64_t>(in);
  f.header.n_paths = get<std::uint64_t>(in);
  f.header.n_nodes = get<std::uint64_t>(in);
  f.header.dim = get<std::uint64_t>(in);
  f.header.first_path = get<std::uint64_t>(in);
  const auto kind = get<std::uint32_t>(in);
  if (kind > 1) throw ValidationError("ensemble", "unknown ensemble kind");
  f.header.kind = static_cast<EnsembleKind>(kind);
  get<std::uint32_t>(in);
  const std::uint64_t count = f.header.n_paths * f.header.n_nodes * f.header.dim;
  if (count * sizeof(double) > kMaxEnsembleBytes) throw ValidationError("ensemble", "body exceeds the 2 GB limit");
  f.values.resize(count);
  in.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw ValidationError("ensemble", "truncated body");
  return f;
}

void write_sidecar(const std::filesystem::path& file, const PathEnsemble& ensemble) {
  Json j = ensemble_metadata(ensemble);
  j["kind"] = "noise";
  j["format_version"] = kEnsembleFormatVersion;
  write_json(file, j);
}

void write_sidecar(const std::filesystem::path& file, const SolutionEnsemble& solution) {
  Json j = ensemble_metadata(solution.noise());
  j["kind"] = "solution";
  j["format_version"] = kEnsembleFormatVersion;
  j["x0"] = solution.x0();
  if (solution.drift()) j["drift"] = *solution.drift();
  if (solution.path_drift()) j["path_dependent_drift"] = *solution.path_drift();
  if (solution.v_process()) j["v_process"] = *solution.v_process();
  write_json(file, j);
}

void write_paths_csv(std::ostream& out, const TimeGrid& grid, std::size_t dim, const std::vector<double>& values,
                     std::size_t n_paths, const std::vector<std::size_t>& paths, std::size_t first_path) {
  const std::size_t nodes = grid.n_nodes();
  if (values.size() != n_paths * nodes * dim) throw DimensionMismatch("write_paths_csv: value count mismatch");
  for (std::size_t p : paths)
    if (p >= n_paths) throw DomainError("write_paths_csv: path index out of range");
  out.precision(17);
  out << 't';
  for (std::size_t p : paths)
    for (std::size_t c = 0; c < dim; ++c) out << ",p" << (p + first_path) << "_c" << c;
  out << '\n';
  for (std::size_t i = 0; i < nodes; ++i) {
    out << grid.node(i);
    for (std::size_t p : paths)
      for (std::size_t c = 0; c < dim; ++c) out << ',' << values[(p * nodes + i) * dim + c];
    out << '\n';
  }
}

}  // namespace vlab
