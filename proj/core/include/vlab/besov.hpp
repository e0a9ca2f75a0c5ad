#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace vlab {

enum class DensityMethod { Histogram, KernelSmoother };
std::string to_string(DensityMethod m);
DensityMethod density_method_from_string(const std::string& name);

/// Density on a uniform 1-d grid; values[i] is the density at x_i = grid_start + i·spacing
/// (the bin centre for histograms).
struct DensityEstimate {
  DensityMethod method = DensityMethod::Histogram;
  double grid_start = 0.0;
  double spacing = 0.0;
  std::vector<double> values;
  double bandwidth_or_binwidth = 0.0;
  std::size_t n_samples = 0;
  std::size_t dim = 1;
  double sample_min = 0.0;
  double sample_max = 0.0;

  double x(std::size_t i) const { return grid_start + static_cast<double>(i) * spacing; }
  std::size_t size() const { return values.size(); }
};

/// Histogram: resolution is the number of bins over [min, max] (0 selects the Freedman–Diaconis
/// width), padded with 3 empty bins on each side. KernelSmoother: resolution is the Gaussian
/// bandwidth (0 selects Silverman's rule); grid spacing is bandwidth/4 over [min − 3bw, max + 3bw].
DensityEstimate estimate_density(std::span<const double> samples, DensityMethod method, double resolution);

/// Default histogram resolution used for regularity estimation.
inline constexpr double kDefaultBins = 200;

struct LagProfile {
  std::vector<double> h;
  std::vector<double> diff_l1;      // Σ|Δ_h^m f(x_i)|·spacing
  std::vector<double> noise_floor;  // expected value of the same sum for pure sampling noise
};

/// Discrete L1 norms of Δ_h^m f. Each h must be a multiple of the grid spacing, at least
/// 2·bandwidth_or_binwidth and at most 1.
LagProfile besov_lag_profile(const DensityEstimate& f, int m, std::span<const double> h_grid);

/// Up to n log-spaced lags k·spacing from 2·binwidth to min(1, sample span / 2).
std::vector<double> default_lag_grid(const DensityEstimate& f, std::size_t n = 16);

/// max_h h^{−s}·‖Δ_h^m f‖_{L1}; requires 0 < s ≤ m.
double besov_seminorm(const DensityEstimate& f, double s, int m, std::span<const double> h_grid);

/// Spacing-weighted Σ values, i.e. the L1 norm of the nonnegative estimate.
double density_l1_norm(const DensityEstimate& f);

struct BesovExponent {
  double s_hat = 0.0;  // clipped to (0, m]
  bool saturated = false;
  double raw_slope = 0.0;
  double r_squared = 0.0;
  double h_low = 0.0;  // fitted lag range
  double h_high = 0.0;
  std::vector<std::size_t> used;  // indices into the lag grid
};

inline constexpr double kNoiseFloorFactor = 5.0;
inline constexpr double kSaturationMargin = 0.05;

/// Log-log slope of the noise-corrected lag profile. Lags whose norm is below 5× the noise floor
/// are dropped; the fit uses the largest contiguous run of ≥ 3 lags with r² ≥ 0.98, preferring
/// larger h.
BesovExponent besov_exponent(const LagProfile& profile, int m);
BesovExponent besov_exponent(const DensityEstimate& f, int m, std::span<const double> h_grid);

struct BesovReport {
  int m = 2;
  std::vector<double> h_grid;
  std::vector<double> diff_l1_norms;
  std::vector<double> noise_floor;
  double s_evaluated = 0.0;  // s used for the seminorm
  double seminorm_sup = 0.0;
  double l1_norm = 0.0;
  double besov_norm = 0.0;  // l1_norm + seminorm_sup
  double exponent_estimate = 0.0;
  double exponent_r_squared = 0.0;
  double fit_h_low = 0.0;
  double fit_h_high = 0.0;
  std::optional<double> theoretical_eta;
  bool saturation_flag = false;
  double binwidth = 0.0;
};

/// Full report. The seminorm is evaluated at s = theoretical_eta when 0 < η < m, otherwise at
/// max(ŝ − 0.05, 0.01) capped below m.
BesovReport besov_report(const DensityEstimate& f, int m, std::span<const double> h_grid,
                         std::optional<double> theoretical_eta = std::nullopt);

/// CSV with header h,diff_l1,noise_floor,scaled (scaled = h^{−s}·diff_l1).
void write_lag_profile_csv(std::ostream& out, const BesovReport& report);

struct Verdict {
  double eta = 0.0;
  bool uses_path_dependent_bound = false;
  std::optional<double> mu;
  double s_hat = 0.0;
  bool saturated = false;
  double tolerance = 0.1;
  bool consistent = false;
  std::string reason;
};

/// One-sided check: consistent when ŝ ≥ η − tolerance or the estimate saturated at m.
/// With δ the path-dependent bound η = (μ + 1 − A)/A, μ = min(βH, δ), is used.
Verdict compare_to_theorem(const BesovReport& report, double A, double beta, double H,
                           std::optional<double> delta = std::nullopt, double tolerance = 0.1);

}  // namespace vlab
