#include "vlab/paths.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "vlab/errors.hpp"
#include "vlab/parallel.hpp"
#include "vlab/rng.hpp"
#include "vlab/stats.hpp"

namespace vlab {

namespace {

constexpr std::size_t kPathBlock = 16;

// ∫_a^b K(t,u)² du with closed forms where they exist.
double cell_square(const KernelSpec& spec, double t, double a, double b) {
  switch (spec.family()) {
    case KernelFamily::Brownian: return b - a;
    case KernelFamily::RiemannLiouville: {
      const double h2 = 2.0 * spec.hurst();
      return (std::pow(t - a, h2) - std::pow(t - b, h2)) / h2;
    }
    case KernelFamily::OrnsteinUhlenbeck: {
      const double l = spec.decay();
      return std::exp(-2.0 * l * (t - b)) * -std::expm1(-2.0 * l * (b - a)) / (2.0 * l);
    }
    default: return kernel_square_integral(spec, t, a, b);
  }
}

bool same_kernel(const KernelSpec& a, const KernelSpec& b) {
  return a.family() == b.family() && a.hurst() == b.hurst() && a.decay() == b.decay() &&
         a.horizon() == b.horizon();
}

}  // namespace

TimeGrid::TimeGrid(double horizon, std::size_t steps) : T(horizon), n_steps(steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("grid: T must be positive");
  if (steps < 1) throw DomainError("grid: n_steps must be at least 1");
}

std::size_t TimeGrid::node_index(double t) const {
  const double x = t / dt();
  const double r = std::round(x);
  if (!(r >= 0.0 && r <= static_cast<double>(n_steps)) || std::abs(x - r) > 1e-9 * std::max(1.0, r))
    throw DomainError("time " + std::to_string(t) + " is not a grid node");
  return static_cast<std::size_t>(r);
}

std::size_t TimeGrid::steps_in(double eps) const {
  if (!(eps > 0.0)) throw DomainError("window length must be positive");
  const double x = eps / dt();
  const double r = std::round(x);
  if (r < 1.0 || std::abs(x - r) > 1e-9 * r) throw DomainError("window length is not a multiple of the grid step");
  return static_cast<std::size_t>(r);
}

std::string to_string(Scheme s) { return s == Scheme::Exact ? "Exact" : "KernelDiscretized"; }

Scheme scheme_from_string(const std::string& name) {
  if (name == "Exact") return Scheme::Exact;
  if (name == "KernelDiscretized") return Scheme::KernelDiscretized;
  throw DomainError("unknown scheme '" + name + "'");
}

PathEnsemble::PathEnsemble(KernelSpec spec, TimeGrid grid, std::size_t dim, std::size_t n_paths,
                           std::uint64_t seed, Scheme scheme, std::size_t first_path)
    : spec_(std::move(spec)),
      grid_(grid),
      dim_(dim),
      n_paths_(n_paths),
      seed_(seed),
      scheme_(scheme),
      first_path_(first_path) {
  if (dim < 1) throw DomainError("ensemble: dim must be at least 1");
  if (grid.T > spec_.horizon() * (1.0 + 1e-12)) throw DomainError("ensemble: grid horizon exceeds kernel horizon");
  values_.assign(n_paths * grid.n_nodes() * dim, 0.0);
  if (scheme == Scheme::KernelDiscretized) increments_.assign(n_paths * grid.n_steps * dim, 0.0);
}

CovarianceFactor covariance_factor(const KernelSpec& spec, const TimeGrid& grid) {
  const std::size_t n = grid.n_steps;
  Eigen::MatrixXd r(n, n);
  parallel_for(n, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      for (std::size_t j = 0; j <= i; ++j) r(i, j) = covariance(spec, grid.node(i + 1), grid.node(j + 1));
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) r(j, i) = r(i, j);
  const double scale = r.trace() / static_cast<double>(n);
  CovarianceFactor out;
  out.n = n;
  for (double rel : {0.0, 1e-16, 1e-15, 1e-14, 1e-13, 1e-12, 1e-11, 1e-10}) {
    Eigen::MatrixXd m = r;
    m.diagonal().array() += rel * scale;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) continue;
    Eigen::MatrixXd l = llt.matrixL();
    if (!l.allFinite()) continue;
    out.jitter = rel * scale;
    out.lower.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) out.lower[i * n + j] = l(i, j);
    return out;
  }
  throw NumericError("covariance factorization failed after jitter", 1e-10 * scale);
}

PathEnsemble exact_sample(const KernelSpec& spec, const TimeGrid& grid, std::size_t dim, std::size_t n_paths,
                          std::uint64_t seed, std::size_t first_path) {
  PathEnsemble ens(spec, grid, dim, n_paths, seed, Scheme::Exact, first_path);
  if (n_paths == 0) return ens;
  const CovarianceFactor f = covariance_factor(spec, grid);
  const std::size_t n = f.n;
  auto& values = ens.mutable_values();
  const std::size_t n_blocks = (n_paths + kPathBlock - 1) / kPathBlock;
  parallel_for(n_blocks, [&](std::size_t b0, std::size_t b1) {
    std::vector<double> z(n * kPathBlock), buf(n), acc(kPathBlock);
    for (std::size_t b = b0; b < b1; ++b) {
      const std::size_t p0 = b * kPathBlock;
      const std::size_t np = std::min(kPathBlock, n_paths - p0);
      for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t q = 0; q < np; ++q) {
          fill_normals({seed, first_path + p0 + q, static_cast<std::uint32_t>(c)}, 0, buf.data(), n);
          for (std::size_t j = 0; j < n; ++j) z[j * kPathBlock + q] = buf[j];
        }
        for (std::size_t i = 0; i < n; ++i) {
          std::fill(acc.begin(), acc.end(), 0.0);
          const double* row = &f.lower[i * n];
          for (std::size_t j = 0; j <= i; ++j) {
            const double w = row[j];
            const double* zj = &z[j * kPathBlock];
            for (std::size_t q = 0; q < kPathBlock; ++q) acc[q] += w * zj[q];
          }
          for (std::size_t q = 0; q < np; ++q) values[((p0 + q) * grid.n_nodes() + i + 1) * dim + c] = acc[q];
        }
      }
    }
  });
  return ens;
}

std::vector<double> discretization_row(const KernelSpec& spec, const TimeGrid& grid, std::size_t i) {
  if (i < 1 || i > grid.n_steps) throw DomainError("discretization_row: node index out of range");
  std::vector<double> w(i);
  const double dt = grid.dt();
  const double t = grid.node(i);
  if (spec.family() == KernelFamily::Brownian) {
    std::fill(w.begin(), w.end(), 1.0);
    return w;
  }
  for (std::size_t j = 0; j + 1 < i; ++j) {
    if (j == 0 && spec.is_fbm()) {
      // K(t,0) is infinite for the fBm kernels; use the cell's root-mean-square weight.
      w[0] = std::sqrt(cell_square(spec, t, 0.0, dt) / dt);
    } else {
      w[j] = spec.eval_lag(t, grid.node(j), static_cast<double>(i - j) * dt);
    }
  }
  w[i - 1] = std::sqrt(cell_square(spec, t, grid.node(i - 1), t) / dt);
  return w;
}

PathEnsemble kernel_discretized_sample(const KernelSpec& spec, const TimeGrid& grid, std::size_t dim,
                                       std::size_t n_paths, std::uint64_t seed, std::size_t first_path) {
  PathEnsemble ens(spec, grid, dim, n_paths, seed, Scheme::KernelDiscretized, first_path);
  if (n_paths == 0) return ens;
  const std::size_t n = grid.n_steps;
  const bool brownian = spec.family() == KernelFamily::Brownian;
  std::vector<std::vector<double>> rows(n + 1);
  if (!brownian) {
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) rows[i + 1] = discretization_row(spec, grid, i + 1);
    });
  }
  const double sdt = std::sqrt(grid.dt());
  auto& values = ens.mutable_values();
  auto& incs = ens.mutable_increments();
  const std::size_t n_blocks = (n_paths + kPathBlock - 1) / kPathBlock;
  parallel_for(n_blocks, [&](std::size_t b0, std::size_t b1) {
    std::vector<double> dw(n * kPathBlock), buf(n), acc(kPathBlock);
    for (std::size_t b = b0; b < b1; ++b) {
      const std::size_t p0 = b * kPathBlock;
      const std::size_t np = std::min(kPathBlock, n_paths - p0);
      for (std::size_t c = 0; c < dim; ++c) {
        std::fill(dw.begin(), dw.end(), 0.0);
        for (std::size_t q = 0; q < np; ++q) {
          fill_normals({seed, first_path + p0 + q, static_cast<std::uint32_t>(c)}, 0, buf.data(), n);
          for (std::size_t j = 0; j < n; ++j) {
            const double d = sdt * buf[j];
            dw[j * kPathBlock + q] = d;
            incs[((p0 + q) * n + j) * dim + c] = d;
          }
        }
        if (brownian) {
          std::fill(acc.begin(), acc.end(), 0.0);
          for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t q = 0; q < kPathBlock; ++q) acc[q] += dw[(i - 1) * kPathBlock + q];
            for (std::size_t q = 0; q < np; ++q) values[((p0 + q) * grid.n_nodes() + i) * dim + c] = acc[q];
          }
          continue;
        }
        for (std::size_t i = 1; i <= n; ++i) {
          std::fill(acc.begin(), acc.end(), 0.0);
          const double* row = rows[i].data();
          for (std::size_t j = 0; j < i; ++j) {
            const double w = row[j];
            const double* d = &dw[j * kPathBlock];
            for (std::size_t q = 0; q < kPathBlock; ++q) acc[q] += w * d[q];
          }
          for (std::size_t q = 0; q < np; ++q) values[((p0 + q) * grid.n_nodes() + i) * dim + c] = acc[q];
        }
      }
    }
  });
  return ens;
}

TailSplit tail_components(const PathEnsemble& ens, const KernelSpec& spec, double t, double eps) {
  if (!ens.has_increments())
    throw UnsupportedSchemeError("tail_components: ensemble has no Wiener increments (Exact scheme)");
  if (!same_kernel(spec, ens.kernel())) throw DomainError("tail_components: kernel differs from the ensemble's");
  const TimeGrid& grid = ens.grid();
  const std::size_t i = grid.node_index(t);
  const std::size_t steps = grid.steps_in(eps);
  if (steps > i) throw DomainError("tail_components: requires ε ≤ t");
  const std::size_t k = i - steps;
  const std::vector<double> wi = discretization_row(spec, grid, i);
  const std::vector<double> wk = k > 0 ? discretization_row(spec, grid, k) : std::vector<double>{};
  const std::size_t d = ens.dim();
  TailSplit out;
  out.smooth.assign(ens.n_paths() * d, 0.0);
  out.tail.assign(ens.n_paths() * d, 0.0);
  parallel_for(ens.n_paths(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p)
      for (std::size_t c = 0; c < d; ++c) {
        double smooth = 0.0, tail = 0.0;
        for (std::size_t j = 0; j < k; ++j) smooth += (wi[j] - wk[j]) * ens.increment(p, j, c);
        for (std::size_t j = k; j < i; ++j) tail += wi[j] * ens.increment(p, j, c);
        out.smooth[p * d + c] = smooth;
        out.tail[p * d + c] = tail;
      }
  });
  return out;
}

CovarianceEstimate jackknife_covariance(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw DomainError("covariance: size mismatch");
  if (n < 2) throw InsufficientDataError("covariance: need at least 2 samples");
  const double mx = pairwise_sum(x) / static_cast<double>(n);
  const double my = pairwise_sum(y) / static_cast<double>(n);
  std::vector<double> xc(n), yc(n), xy(n);
  for (std::size_t k = 0; k < n; ++k) {
    xc[k] = x[k] - mx;
    yc[k] = y[k] - my;
    xy[k] = xc[k] * yc[k];
  }
  const double sx = pairwise_sum(xc), sy = pairwise_sum(yc), sxy = pairwise_sum(xy);
  const double nn = static_cast<double>(n);
  CovarianceEstimate est;
  est.estimate = (sxy - sx * sy / nn) / (nn - 1.0);
  if (n < 3) return est;
  std::vector<double> loo(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double sxk = sx - xc[k], syk = sy - yc[k];
    loo[k] = (sxy - xy[k] - sxk * syk / (nn - 1.0)) / (nn - 2.0);
  }
  const double mean = pairwise_sum(loo) / nn;
  for (auto& v : loo) v = (v - mean) * (v - mean);
  est.std_error = std::sqrt((nn - 1.0) / nn * pairwise_sum(loo));
  return est;
}

std::vector<CovarianceEstimate> empirical_covariance(const PathEnsemble& ens,
                                                     const std::vector<std::pair<std::size_t, std::size_t>>& probes) {
  std::vector<CovarianceEstimate> out;
  const std::size_t d = ens.dim();
  for (const auto& [i, j] : probes) {
    if (i >= ens.grid().n_nodes() || j >= ens.grid().n_nodes())
      throw DomainError("empirical_covariance: probe index out of range");
    std::vector<double> x(ens.n_paths() * d), y(ens.n_paths() * d);
    for (std::size_t p = 0; p < ens.n_paths(); ++p)
      for (std::size_t c = 0; c < d; ++c) {
        x[p * d + c] = ens.value(p, i, c);
        y[p * d + c] = ens.value(p, j, c);
      }
    out.push_back(jackknife_covariance(x, y));
  }
  return out;
}

CovarianceEstimate cross_component_covariance(const PathEnsemble& ens, std::size_t i, std::size_t c1,
                                              std::size_t c2) {
  if (c1 >= ens.dim() || c2 >= ens.dim() || i >= ens.grid().n_nodes())
    throw DomainError("cross_component_covariance: index out of range");
  std::vector<double> x(ens.n_paths()), y(ens.n_paths());
  for (std::size_t p = 0; p < ens.n_paths(); ++p) {
    x[p] = ens.value(p, i, c1);
    y[p] = ens.value(p, i, c2);
  }
  return jackknife_covariance(x, y);
}

}  // namespace vlab
