#include "pdlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pdlab/bumps.hpp"
#include "pdlab/random.hpp"

namespace pdlab {
namespace {

double cell_volume(const LatticeField& f) {
  double step = f.domain() == Domain::space ? f.grid().spacing()
                                            : f.grid().freq_spacing();
  return std::pow(step, f.grid().n);
}

}  // namespace

double lp_norm(const LatticeField& f, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("lp_norm: p must be positive");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  double cell = cell_volume(f);
  double acc = 0.0;
  for (const auto& v : f.values()) acc += std::pow(std::abs(v), p);
  return std::pow(acc * cell, 1.0 / p);
}

double weak_lp_norm(const LatticeField& f, double p) {
  if (!(p > 0.0) || std::isinf(p))
    throw std::invalid_argument("weak_lp_norm: p must be finite and positive");
  std::vector<double> mags(f.size());
  for (std::int64_t i = 0; i < f.size(); ++i) mags[i] = std::abs(f[i]);
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  double cell = cell_volume(f);
  double best = 0.0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    if (mags[j] == 0.0) break;
    best = std::max(best, std::pow((j + 1) * cell, 1.0 / p) * mags[j]);
  }
  return best;
}

WindowKappa WindowKappa::standard(int n) {
  if (n < 1 || n > 3) throw std::invalid_argument("WindowKappa: dimension 1..3");
  // Periodized sum of the raw profile along one axis; the product structure
  // makes the n-dimensional cover the n-th power of the 1-d one.
  auto raw_cover = [](double xi) {
    double s = 0.0;
    for (int k = -2; k <= 2; ++k) s += bump((xi - k) / 0.75);
    return s;
  };
  const int samples = 20000;
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i <= samples; ++i) {
    double c = raw_cover(static_cast<double>(i) / samples);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  double scale = (1.0 + 1e-6) / lo;  // headroom for the sampled minimum
  WindowKappa k(n, scale, std::pow(scale * lo, n), std::pow(scale * hi, n));
  if (k.cover_min() < 1.0)
    throw std::runtime_error("WindowKappa: cover bound not met after scaling");
  return k;
}

double WindowKappa::eval1d(double t) const { return scale_ * bump(t / 0.75); }

double WindowKappa::operator()(std::span<const double> xi) const {
  double v = 1.0;
  for (int a = 0; a < n_; ++a) v *= eval1d(xi[a]);
  return v;
}

AmalgamNorm wiener_amalgam_norm(const LatticeField& f, double p, double q,
                                double s, const WindowKappa& kappa) {
  if (!(p > 0.0) || !(q > 0.0))
    throw std::invalid_argument("wiener_amalgam_norm: exponents must be positive");
  if (kappa.dim() != f.grid().n)
    throw std::invalid_argument("wiener_amalgam_norm: window dimension mismatch");

  const GridSpec& g = f.grid();
  LatticeField spec = f.domain() == Domain::frequency ? f : forward_transform(f);
  const double hw = kappa.support_radius();
  const int M = g.points_per_axis;
  const double dxi = g.freq_spacing();
  const int kmax = static_cast<int>(std::ceil(g.nyquist() + hw));

  AmalgamNorm out;
  out.window_radius = kmax;

  // Boundary-shell diagnostics: windows centered within hw+1 of the Nyquist
  // edge are clipped by the grid, so report the spectral mass living there.
  double total_mass = 0.0, edge_mass = 0.0;
  {
    std::vector<int> idx(g.n);
    for (std::int64_t i = 0; i < spec.size(); ++i) {
      double m2 = std::norm(spec[i]);
      if (m2 == 0.0) continue;
      total_mass += m2;
      spec.unflatten(i, idx);
      for (int a = 0; a < g.n; ++a) {
        if (g.nyquist() - std::abs(g.freq(idx[a])) < 1.0 + hw) {
          edge_mass += m2;
          break;
        }
      }
    }
  }
  out.spectral_tail = total_mass > 0.0 ? edge_mass / total_mass : 0.0;
  out.tail_warning = out.spectral_tail > 1e-10;

  std::vector<int> k(g.n, -kmax);
  std::vector<int> lo(g.n), hi(g.n), idx(g.n);
  std::vector<double> xi(g.n);
  double acc = 0.0;  // l^q accumulator (sup for q = inf)
  const bool qinf = std::isinf(q);

  while (true) {
    // per-axis signed frequency-index ranges of the window support
    bool overlap = true;
    for (int a = 0; a < g.n && overlap; ++a) {
      lo[a] = std::max(static_cast<int>(std::ceil((k[a] - hw) / dxi)), -M / 2);
      hi[a] = std::min(static_cast<int>(std::floor((k[a] + hw) / dxi)), M / 2 - 1);
      overlap = lo[a] <= hi[a];
    }
    if (overlap) {
      LatticeField band(g, Domain::frequency);
      std::vector<int> m(g.n);
      for (int a = 0; a < g.n; ++a) m[a] = lo[a];
      bool any = false;
      while (true) {
        for (int a = 0; a < g.n; ++a) {
          idx[a] = g.storage_index(m[a]);
          xi[a] = m[a] * dxi - k[a];
        }
        std::int64_t flat = band.flatten(idx);
        if (spec[flat] != cplx(0.0, 0.0)) {
          band[flat] = kappa(xi) * spec[flat];
          any = true;
        }
        int a = g.n - 1;
        while (a >= 0) {
          if (++m[a] <= hi[a]) break;
          m[a] = lo[a];
          --a;
        }
        if (a < 0) break;
      }
      if (any) {
        double piece = lp_norm(inverse_transform(band), p);
        if (piece > 0.0) {
          double k2 = 0.0;
          for (int a = 0; a < g.n; ++a) k2 += double(k[a]) * k[a];
          double weighted = std::pow(1.0 + k2, s / 2.0) * piece;
          if (qinf)
            acc = std::max(acc, weighted);
          else
            acc += std::pow(weighted, q);
        }
      }
    }
    int a = g.n - 1;
    while (a >= 0 && ++k[a] > kmax) k[a--] = -kmax;
    if (a < 0) break;
  }

  out.value = qinf ? acc : std::pow(acc, 1.0 / q);
  return out;
}

double local_hardy_norm(const LatticeField& f, double p, const MaximalPhi& profile) {
  if (!(p > 0.0)) throw std::invalid_argument("local_hardy_norm: p must be positive");
  if (f.domain() != Domain::space)
    throw std::invalid_argument("local_hardy_norm expects a space-domain field");
  const GridSpec& g = f.grid();
  double half = 0.5 * g.period;
  if (std::exp(-0.5 * half * half) > 1e-12)
    throw std::invalid_argument(
        "local_hardy_norm: grid period too small for the Gaussian profile "
        "(needs exp(-(period/2)^2/2) <= 1e-12)");

  int levels = profile.levels;
  if (levels <= 0) {
    levels = 0;
    for (int m = g.points_per_axis; m > 4; m /= 2) ++levels;  // log2(M) - 2
  }

  LatticeField spec = forward_transform(f);
  std::vector<double> maximal(f.size(), 0.0);
  std::vector<int> idx(g.n);
  for (int j = 0; j <= levels; ++j) {
    double t = std::pow(0.5, j);
    LatticeField level(g, Domain::frequency);
    for (std::int64_t i = 0; i < spec.size(); ++i) {
      if (spec[i] == cplx(0.0, 0.0)) continue;
      spec.unflatten(i, idx);
      double xi2 = 0.0;
      for (int a = 0; a < g.n; ++a) {
        double xi = g.freq(idx[a]);
        xi2 += xi * xi;
      }
      level[i] = spec[i] * std::pow(2 * M_PI, g.n / 2.0) *
                 std::exp(-0.5 * t * t * xi2);
    }
    LatticeField conv = inverse_transform(level);
    for (std::int64_t i = 0; i < conv.size(); ++i)
      maximal[i] = std::max(maximal[i], std::abs(conv[i]));
  }

  LatticeField mf(g, Domain::space);
  for (std::int64_t i = 0; i < mf.size(); ++i) mf[i] = maximal[i];
  return lp_norm(mf, p);
}

double bmo_norm(const LatticeField& f, bool local) {
  if (f.domain() != Domain::space)
    throw std::invalid_argument("bmo_norm expects a space-domain field");
  const GridSpec& g = f.grid();
  const int M = g.points_per_axis;
  int levels = 0;
  for (int m = M; m > 1; m /= 2) ++levels;  // cube sides P/2^j, j=0..levels

  std::vector<int> idx(g.n);
  double sup = 0.0;

  for (int j = 0; j <= levels; ++j) {
    int side_pts = M >> j;
    double side = g.period / (1 << j);
    int cubes_per_axis = M / side_pts;
    std::int64_t cube_count = 1;
    for (int a = 0; a < g.n; ++a) cube_count *= cubes_per_axis;
    double inv_count = 1.0 / std::pow(static_cast<double>(side_pts), g.n);

    bool use_osc = !local || side <= 1.0;
    bool use_mean = local && side >= 1.0;
    if (!use_osc && !use_mean) continue;

    for (int family = 0; family < 2; ++family) {
      int off = family == 0 ? 0 : side_pts / 2;
      if (family == 1 && off == 0) break;  // single-point cubes: no shifted family

      auto cube_of = [&](std::span<const int> ix) {
        std::int64_t c = 0;
        for (int a = 0; a < g.n; ++a)
          c = c * cubes_per_axis + ((ix[a] + off) % M) / side_pts;
        return c;
      };

      std::vector<cplx> mean(cube_count, cplx(0, 0));
      std::vector<double> absmean(cube_count, 0.0);
      for (std::int64_t i = 0; i < f.size(); ++i) {
        f.unflatten(i, idx);
        std::int64_t c = cube_of(idx);
        mean[c] += f[i];
        absmean[c] += std::abs(f[i]);
      }
      for (std::int64_t c = 0; c < cube_count; ++c) {
        mean[c] *= inv_count;
        absmean[c] *= inv_count;
      }

      if (use_mean)
        for (std::int64_t c = 0; c < cube_count; ++c) sup = std::max(sup, absmean[c]);

      if (use_osc) {
        std::vector<double> osc(cube_count, 0.0);
        for (std::int64_t i = 0; i < f.size(); ++i) {
          f.unflatten(i, idx);
          std::int64_t c = cube_of(idx);
          osc[c] += std::abs(f[i] - mean[c]);
        }
        for (std::int64_t c = 0; c < cube_count; ++c)
          sup = std::max(sup, osc[c] * inv_count);
      }
    }
  }
  return sup;
}

const char* embedding_name(Embedding e) {
  switch (e) {
    case Embedding::amalgam_into_amalgam: return "amalgam_into_amalgam";
    case Embedding::lp_into_amalgam_dual: return "lp_into_amalgam_dual";
    case Embedding::lp_into_amalgam_l2: return "lp_into_amalgam_l2";
    case Embedding::hardy_into_amalgam: return "hardy_into_amalgam";
    case Embedding::bmo_into_amalgam: return "bmo_into_amalgam";
    case Embedding::amalgam_into_hardy: return "amalgam_into_hardy";
    case Embedding::amalgam_into_lp: return "amalgam_into_lp";
  }
  return "?";
}

namespace {

double conjugate(double p) {
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

}  // namespace

RatioStats check_embedding(Embedding which, const EmbeddingConfig& cfg,
                           const WindowKappa& kappa) {
  const double inf = std::numeric_limits<double>::infinity();
  const double p = cfg.p;
  int n = cfg.grid.n;

  switch (which) {
    case Embedding::amalgam_into_amalgam:
      if (!(p <= cfg.p2) || !(cfg.q1 <= cfg.q2))
        throw std::invalid_argument(
            "amalgam_into_amalgam requires p1 <= p2 and q1 <= q2");
      break;
    case Embedding::lp_into_amalgam_dual:
      if (!(1.0 <= p && p <= 2.0))
        throw std::invalid_argument("lp_into_amalgam_dual requires 1 <= p <= 2");
      break;
    case Embedding::lp_into_amalgam_l2:
      if (!(p >= 2.0))
        throw std::invalid_argument("lp_into_amalgam_l2 requires p >= 2");
      break;
    case Embedding::hardy_into_amalgam:
      if (!(0.0 < p && p <= 2.0))
        throw std::invalid_argument("hardy_into_amalgam requires 0 < p <= 2");
      break;
    case Embedding::amalgam_into_hardy:
      if (!(0.0 < p && p <= 2.0))
        throw std::invalid_argument("amalgam_into_hardy requires 0 < p <= 2");
      break;
    case Embedding::amalgam_into_lp:
      if (!(p >= 2.0))
        throw std::invalid_argument("amalgam_into_lp requires p >= 2");
      break;
    case Embedding::bmo_into_amalgam:
      break;
  }

  RatioStats stats;
  stats.min_ratio = inf;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    LatticeField f = random_band_limited(cfg.grid, cfg.band_radius,
                                         mix(cfg.seed, trial));
    double src = 0.0, tgt = 0.0;
    switch (which) {
      case Embedding::amalgam_into_amalgam:
        src = wiener_amalgam_norm(f, p, cfg.q1, 0.0, kappa).value;
        tgt = wiener_amalgam_norm(f, cfg.p2, cfg.q2, 0.0, kappa).value;
        break;
      case Embedding::lp_into_amalgam_dual:
        src = lp_norm(f, p);
        tgt = wiener_amalgam_norm(f, p, conjugate(p), 0.0, kappa).value;
        break;
      case Embedding::lp_into_amalgam_l2:
        src = lp_norm(f, p);
        tgt = wiener_amalgam_norm(f, p, 2.0, 0.0, kappa).value;
        break;
      case Embedding::hardy_into_amalgam:
        src = local_hardy_norm(f, p);
        tgt = wiener_amalgam_norm(f, p, 2.0, n * (0.5 - 1.0 / p), kappa).value;
        break;
      case Embedding::bmo_into_amalgam:
        src = bmo_norm(f, /*local=*/true);
        tgt = wiener_amalgam_norm(f, inf, 2.0, 0.0, kappa).value;
        break;
      case Embedding::amalgam_into_hardy:
        src = wiener_amalgam_norm(f, p, 2.0, 0.0, kappa).value;
        tgt = local_hardy_norm(f, p);
        break;
      case Embedding::amalgam_into_lp:
        src = wiener_amalgam_norm(f, p, conjugate(p), 0.0, kappa).value;
        tgt = lp_norm(f, p);
        break;
    }
    if (!(src > 1e-300)) {
      ++stats.skipped;
      continue;
    }
    double ratio = tgt / src;
    stats.max_ratio = std::max(stats.max_ratio, ratio);
    stats.min_ratio = std::min(stats.min_ratio, ratio);
    stats.mean_ratio += ratio;
    ++stats.evaluated;
  }
  if (stats.evaluated > 0) stats.mean_ratio /= stats.evaluated;
  if (stats.evaluated == 0) stats.min_ratio = 0.0;
  return stats;
}

}  // namespace pdlab
