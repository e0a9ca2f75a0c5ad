#include "vlab/besov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vlab/errors.hpp"
#include "vlab/parallel.hpp"
#include "vlab/smoothing.hpp"
#include "vlab/stats.hpp"

namespace vlab {

std::string to_string(DensityMethod m) {
  return m == DensityMethod::Histogram ? "Histogram" : "KernelSmoother";
}

DensityMethod density_method_from_string(const std::string& name) {
  if (name == "Histogram") return DensityMethod::Histogram;
  if (name == "KernelSmoother") return DensityMethod::KernelSmoother;
  throw DomainError("unknown density method '" + name + "'");
}

namespace {

constexpr int kPadBins = 3;

double quantile_sorted(const std::vector<double>& s, double q) {
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  return i + 1 < s.size() ? s[i] + frac * (s[i + 1] - s[i]) : s[i];
}

void normalize(DensityEstimate& f) {
  const double mass = pairwise_sum(f.values) * f.spacing;
  if (!(mass > 0.0)) throw InsufficientDataError("estimate_density: no mass on the grid");
  for (double& v : f.values) v /= mass;
}

}  // namespace

DensityEstimate estimate_density(std::span<const double> samples, DensityMethod method, double resolution) {
  if (samples.size() < 100) throw InsufficientDataError("estimate_density: at least 100 samples required");
  double lo = samples[0], hi = samples[0];
  for (double x : samples) {
    if (!std::isfinite(x)) throw DomainError("estimate_density: non-finite sample");
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (!(hi > lo)) throw DomainError("estimate_density: degenerate samples (all equal)");
  if (!(resolution >= 0.0)) throw DomainError("estimate_density: resolution must be nonnegative");
  const double n = static_cast<double>(samples.size());

  DensityEstimate f;
  f.method = method;
  f.n_samples = samples.size();
  f.sample_min = lo;
  f.sample_max = hi;

  if (method == DensityMethod::Histogram) {
    std::size_t bins;
    if (resolution == 0.0) {
      std::vector<double> s(samples.begin(), samples.end());
      std::sort(s.begin(), s.end());
      const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
      const double w = 2.0 * iqr / std::cbrt(n);
      bins = w > 0.0 ? static_cast<std::size_t>(std::ceil((hi - lo) / w)) : 200;
      bins = std::clamp<std::size_t>(bins, 10, 1000000);
    } else {
      if (resolution != std::floor(resolution) || resolution > 1e7)
        throw DomainError("estimate_density: histogram resolution must be an integer bin count");
      bins = static_cast<std::size_t>(resolution);
    }
    const double bw = (hi - lo) / static_cast<double>(bins);
    f.spacing = bw;
    f.bandwidth_or_binwidth = bw;
    f.grid_start = lo - (kPadBins - 0.5) * bw;
    std::vector<double> counts(bins + 2 * kPadBins, 0.0);
    for (double x : samples) {
      auto b = static_cast<std::ptrdiff_t>(std::floor((x - lo) / bw));
      b = std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(bins) - 1);
      counts[b + kPadBins] += 1.0;
    }
    f.values = std::move(counts);
    normalize(f);
    return f;
  }

  double bw = resolution;
  if (bw == 0.0) {
    std::vector<double> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    const double sd = std::sqrt(sample_variance(samples));
    const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
    bw = 0.9 * std::min(sd, iqr / 1.34) * std::pow(n, -0.2);
    if (!(bw > 0.0)) bw = 0.9 * sd * std::pow(n, -0.2);
  }
  const double dx = bw / 4.0;
  const double start = lo - 3.0 * bw;
  const auto cells = static_cast<std::size_t>(std::ceil((hi + 3.0 * bw - start) / dx)) + 1;
  if (cells > 50000000) throw DomainError("estimate_density: bandwidth too small for the sample range");
  // Linear binning onto the grid, then a discrete Gaussian convolution truncated at 5 bandwidths.
  std::vector<double> mass(cells, 0.0);
  for (double x : samples) {
    const double u = (x - start) / dx;
    const auto i = static_cast<std::size_t>(u);
    const double w = u - static_cast<double>(i);
    mass[i] += 1.0 - w;
    if (i + 1 < cells) mass[i + 1] += w;
  }
  const int half = static_cast<int>(std::ceil(5.0 * bw / dx));
  std::vector<double> kern(2 * half + 1);
  for (int j = -half; j <= half; ++j) {
    const double z = j * dx / bw;
    kern[j + half] = std::exp(-0.5 * z * z);
  }
  f.values.assign(cells, 0.0);
  parallel_for(cells, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      double s = 0.0;
      for (int j = -half; j <= half; ++j) {
        const auto src = static_cast<std::ptrdiff_t>(i) - j;
        if (src >= 0 && src < static_cast<std::ptrdiff_t>(cells)) s += kern[j + half] * mass[src];
      }
      f.values[i] = s;
    }
  });
  f.spacing = dx;
  f.grid_start = start;
  f.bandwidth_or_binwidth = bw;
  normalize(f);
  return f;
}

double density_l1_norm(const DensityEstimate& f) {
  return pairwise_sum(f.values) * f.spacing;
}

namespace {

std::size_t lag_steps(const DensityEstimate& f, double h) {
  if (!(h >= 2.0 * f.bandwidth_or_binwidth * (1.0 - 1e-9)))
    throw DomainError("besov_lag_profile: lag below 2·binwidth");
  if (!(h <= 1.0 + 1e-12)) throw DomainError("besov_lag_profile: lag above 1");
  const double k = std::round(h / f.spacing);
  if (std::abs(k * f.spacing - h) > 1e-6 * h) throw DomainError("besov_lag_profile: lag is not a multiple of the grid spacing");
  return static_cast<std::size_t>(k);
}

}  // namespace

LagProfile besov_lag_profile(const DensityEstimate& f, int m, std::span<const double> h_grid) {
  if (m < 1) throw DomainError("besov_lag_profile: m must be at least 1");
  if (f.values.empty() || !(f.spacing > 0.0)) throw DomainError("besov_lag_profile: empty density");
  const std::size_t n = f.values.size();
  std::vector<std::size_t> ks;
  for (double h : h_grid) ks.push_back(lag_steps(f, h));
  // Per-cell sampling variance of the estimate.
  const double nb = static_cast<double>(std::max<std::size_t>(f.n_samples, 1)) * f.bandwidth_or_binwidth;
  const double rk = f.method == DensityMethod::Histogram ? 1.0 : 0.5 / std::sqrt(std::numbers::pi);
  std::vector<double> cell_var(n);
  for (std::size_t i = 0; i < n; ++i) cell_var[i] = f.values[i] * rk / nb;
  std::vector<double> coeff(m + 1);
  for (int j = 0; j <= m; ++j) coeff[j] = ((m - j) % 2 ? -1.0 : 1.0) * binomial(m, j);

  LagProfile prof;
  prof.h.assign(h_grid.begin(), h_grid.end());
  prof.diff_l1.assign(ks.size(), 0.0);
  prof.noise_floor.assign(ks.size(), 0.0);
  parallel_for(ks.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t q = b; q < e; ++q) {
      const auto k = static_cast<std::ptrdiff_t>(ks[q]);
      const auto total = static_cast<std::ptrdiff_t>(n) + m * k;
      std::vector<double> absd(total), sd(total);
      for (std::ptrdiff_t r = 0; r < total; ++r) {
        const std::ptrdiff_t i = r - m * k;
        double d = 0.0, v = 0.0;
        for (int j = 0; j <= m; ++j) {
          const std::ptrdiff_t idx = i + j * k;
          if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(n)) continue;
          d += coeff[j] * f.values[idx];
          v += coeff[j] * coeff[j] * cell_var[idx];
        }
        absd[r] = std::abs(d);
        sd[r] = std::sqrt(v);
      }
      prof.diff_l1[q] = pairwise_sum(absd) * f.spacing;
      prof.noise_floor[q] = std::sqrt(2.0 / std::numbers::pi) * pairwise_sum(sd) * f.spacing;
    }
  });
  return prof;
}

std::vector<double> default_lag_grid(const DensityEstimate& f, std::size_t n) {
  if (n < 2) throw DomainError("default_lag_grid: need at least 2 lags");
  const double h_max = std::min(1.0, 0.5 * (f.sample_max - f.sample_min));
  const double k_lo = std::ceil(2.0 * f.bandwidth_or_binwidth / f.spacing - 1e-9);
  const double k_hi = std::floor(h_max / f.spacing);
  if (k_hi < k_lo) throw InsufficientDataError("default_lag_grid: grid too coarse for any admissible lag");
  std::vector<double> out;
  double last = -1.0;
  for (double kk : logspace(k_lo, k_hi, n)) {
    const double k = std::round(kk);
    if (k != last) out.push_back(k * f.spacing);
    last = k;
  }
  return out;
}

double besov_seminorm(const DensityEstimate& f, double s, int m, std::span<const double> h_grid) {
  if (!(s > 0.0)) throw DomainError("besov_seminorm: s must be positive");
  if (!(s <= m)) throw DomainError("besov_seminorm: s must not exceed m");
  const LagProfile prof = besov_lag_profile(f, m, h_grid);
  double best = 0.0;
  for (std::size_t q = 0; q < prof.h.size(); ++q) best = std::max(best, std::pow(prof.h[q], -s) * prof.diff_l1[q]);
  return best;
}

BesovExponent besov_exponent(const LagProfile& prof, int m) {
  std::vector<std::size_t> idx;
  for (std::size_t q = 0; q < prof.h.size(); ++q) {
    if (!(prof.diff_l1[q] > 0.0)) throw InsufficientDataError("besov_exponent: lag profile contains zeros");
    if (q > 0 && !(prof.h[q] > prof.h[q - 1])) throw DomainError("besov_exponent: lags must be increasing");
    if (prof.diff_l1[q] >= kNoiseFloorFactor * prof.noise_floor[q]) idx.push_back(q);
  }
  if (idx.size() < 3) throw InsufficientDataError("besov_exponent: fewer than 3 lags above the noise floor");
  std::vector<double> lx, ly;
  for (std::size_t q : idx) {
    lx.push_back(std::log(prof.h[q]));
    ly.push_back(std::log(prof.diff_l1[q] - prof.noise_floor[q]));
  }
  const std::size_t n = idx.size();
  for (std::size_t len = n; len >= 3; --len) {
    for (std::size_t start = n - len + 1; start-- > 0;) {
      const LinearFit fit = ols(std::span(lx).subspan(start, len), std::span(ly).subspan(start, len));
      if (fit.r_squared >= 0.98) {
        BesovExponent e;
        e.raw_slope = fit.slope;
        e.r_squared = fit.r_squared;
        e.s_hat = std::clamp(fit.slope, 1e-12, static_cast<double>(m));
        e.saturated = e.s_hat > m - kSaturationMargin;
        e.h_low = prof.h[idx[start]];
        e.h_high = prof.h[idx[start + len - 1]];
        e.used.assign(idx.begin() + start, idx.begin() + start + len);
        return e;
      }
    }
  }
  throw InsufficientDataError("besov_exponent: no run of 3 lags with r² ≥ 0.98");
}

BesovExponent besov_exponent(const DensityEstimate& f, int m, std::span<const double> h_grid) {
  return besov_exponent(besov_lag_profile(f, m, h_grid), m);
}

BesovReport besov_report(const DensityEstimate& f, int m, std::span<const double> h_grid,
                         std::optional<double> theoretical_eta) {
  const LagProfile prof = besov_lag_profile(f, m, h_grid);
  const BesovExponent e = besov_exponent(prof, m);
  BesovReport r;
  r.m = m;
  r.h_grid = prof.h;
  r.diff_l1_norms = prof.diff_l1;
  r.noise_floor = prof.noise_floor;
  r.exponent_estimate = e.s_hat;
  r.exponent_r_squared = e.r_squared;
  r.fit_h_low = e.h_low;
  r.fit_h_high = e.h_high;
  r.saturation_flag = e.saturated;
  r.theoretical_eta = theoretical_eta;
  r.binwidth = f.bandwidth_or_binwidth;
  if (theoretical_eta && *theoretical_eta > 0.0 && *theoretical_eta < m)
    r.s_evaluated = *theoretical_eta;
  else
    r.s_evaluated = std::min(std::max(e.s_hat - kSaturationMargin, 0.01), m - 0.01);
  for (std::size_t q = 0; q < prof.h.size(); ++q)
    r.seminorm_sup = std::max(r.seminorm_sup, std::pow(prof.h[q], -r.s_evaluated) * prof.diff_l1[q]);
  r.l1_norm = density_l1_norm(f);
  r.besov_norm = r.l1_norm + r.seminorm_sup;
  return r;
}

void write_lag_profile_csv(std::ostream& out, const BesovReport& r) {
  out << "h,diff_l1,noise_floor,scaled\n";
  out.precision(17);
  for (std::size_t q = 0; q < r.h_grid.size(); ++q)
    out << r.h_grid[q] << ',' << r.diff_l1_norms[q] << ',' << r.noise_floor[q] << ','
        << std::pow(r.h_grid[q], -r.s_evaluated) * r.diff_l1_norms[q] << '\n';
}

Verdict compare_to_theorem(const BesovReport& report, double A, double beta, double H, std::optional<double> delta,
                           double tolerance) {
  const TheoremExponents ex = theorem_exponents(A, beta, H, delta);
  Verdict v;
  v.uses_path_dependent_bound = delta.has_value();
  v.mu = ex.mu;
  v.eta = delta ? *ex.eta_t2 : ex.eta_t1;
  v.s_hat = report.exponent_estimate;
  v.saturated = report.saturation_flag;
  v.tolerance = tolerance;
  if (v.s_hat >= v.eta - tolerance) {
    v.consistent = true;
    v.reason = "estimated exponent reaches the guaranteed regularity";
  } else if (v.saturated) {
    v.consistent = true;
    v.reason = "estimate saturated at m; true regularity may exceed m";
  } else {
    v.consistent = false;
    v.reason = "estimated exponent below the guaranteed regularity";
  }
  return v;
}

}  // namespace vlab
