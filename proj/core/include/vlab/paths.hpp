#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vlab/kernels.hpp"

namespace vlab {

/// Uniform grid t_i = i T / n, i = 0..n.
struct TimeGrid {
  double T = 1.0;
  std::size_t n_steps = 1;

  TimeGrid() = default;
  TimeGrid(double horizon, std::size_t steps);

  double dt() const { return T / static_cast<double>(n_steps); }
  double node(std::size_t i) const { return T * static_cast<double>(i) / static_cast<double>(n_steps); }
  std::size_t n_nodes() const { return n_steps + 1; }
  /// Index of the node equal to t (relative tolerance 1e-9); DomainError otherwise.
  std::size_t node_index(double t) const;
  /// Number of steps spanned by a window of length ε; DomainError unless ε is a node multiple.
  std::size_t steps_in(double eps) const;
};

enum class Scheme { Exact, KernelDiscretized };
std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

/// Seeded collection of d-dimensional paths on a grid. Layout is row-major
/// [path][node][component]; wiener increments are [path][step][component].
/// `first_path` is the global index of path 0, so ensembles can be built in chunks.
class PathEnsemble {
 public:
  PathEnsemble(KernelSpec spec, TimeGrid grid, std::size_t dim, std::size_t n_paths, std::uint64_t seed,
               Scheme scheme, std::size_t first_path = 0);

  const KernelSpec& kernel() const { return spec_; }
  const TimeGrid& grid() const { return grid_; }
  std::size_t dim() const { return dim_; }
  std::size_t n_paths() const { return n_paths_; }
  std::size_t first_path() const { return first_path_; }
  std::uint64_t seed() const { return seed_; }
  Scheme scheme() const { return scheme_; }
  bool has_increments() const { return !increments_.empty(); }

  double value(std::size_t p, std::size_t i, std::size_t c) const {
    return values_[(p * grid_.n_nodes() + i) * dim_ + c];
  }
  double increment(std::size_t p, std::size_t j, std::size_t c) const {
    return increments_[(p * grid_.n_steps + j) * dim_ + c];
  }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& increments() const { return increments_; }
  std::vector<double>& mutable_values() { return values_; }
  std::vector<double>& mutable_increments() { return increments_; }

 private:
  KernelSpec spec_;
  TimeGrid grid_;
  std::size_t dim_;
  std::size_t n_paths_;
  std::uint64_t seed_;
  Scheme scheme_;
  std::size_t first_path_;
  std::vector<double> values_;
  std::vector<double> increments_;
};

/// Exact Gaussian sampling via Cholesky of R(t_i, t_j) on nodes 1..n.
PathEnsemble exact_sample(const KernelSpec& spec, const TimeGrid& grid, std::size_t dim, std::size_t n_paths,
                          std::uint64_t seed, std::size_t first_path = 0);

/// Left-point discretization of ∫K(t,s)dW_s with variance-matched diagonal cells.
PathEnsemble kernel_discretized_sample(const KernelSpec& spec, const TimeGrid& grid, std::size_t dim,
                                       std::size_t n_paths, std::uint64_t seed, std::size_t first_path = 0);

/// Row i of the discretization weights: w[j] for j < i, so that B_{t_i} = Σ_j w[j] ΔW_j.
std::vector<double> discretization_row(const KernelSpec& spec, const TimeGrid& grid, std::size_t i);

/// Lower-triangular Cholesky factor of the node covariance used by exact_sample, row-major
/// n × n over nodes 1..n, with the jitter that was needed.
struct CovarianceFactor {
  std::vector<double> lower;
  std::size_t n = 0;
  double jitter = 0.0;
};
CovarianceFactor covariance_factor(const KernelSpec& spec, const TimeGrid& grid);

/// Per-path split of B_t − B_{t−ε} into the F_{t−ε}-measurable part and the window integral.
struct TailSplit {
  std::vector<double> smooth;  // [path][component]
  std::vector<double> tail;    // [path][component]
};
TailSplit tail_components(const PathEnsemble& ensemble, const KernelSpec& spec, double t, double eps);

struct CovarianceEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Unbiased covariance of (B_{t_i}, B_{t_j}) pooled over components, with jackknife standard error.
std::vector<CovarianceEstimate> empirical_covariance(const PathEnsemble& ensemble,
                                                     const std::vector<std::pair<std::size_t, std::size_t>>& probes);

/// Covariance between two components at node i, across paths.
CovarianceEstimate cross_component_covariance(const PathEnsemble& ensemble, std::size_t i, std::size_t c1,
                                              std::size_t c2);

/// Jackknife covariance of paired samples (exposed for reuse and testing).
CovarianceEstimate jackknife_covariance(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace vlab
