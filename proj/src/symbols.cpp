#include "pdlab/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "pdlab/bumps.hpp"
#include "pdlab/fft.hpp"
#include "pdlab/norms.hpp"
#include "pdlab/random.hpp"

namespace pdlab {
namespace {

// odometer over the box [lo, hi]^len; returns false after the last tuple
bool advance_box(std::span<int> idx, int lo, int hi) {
  for (int a = static_cast<int>(idx.size()) - 1; a >= 0; --a) {
    if (++idx[a] <= hi) return true;
    idx[a] = lo;
  }
  return false;
}

double slot_norm(std::span<const double> xi_flat, int n, int j) {
  double r2 = 0.0;
  for (int a = 0; a < n; ++a) r2 += xi_flat[j * n + a] * xi_flat[j * n + a];
  return std::sqrt(r2);
}

}  // namespace

double SymbolOrder::weight(int n, std::span<const double> xi_flat) const {
  int N = static_cast<int>(xi_flat.size()) / n;
  if (scalar_) {
    double s = 1.0;
    for (int j = 0; j < N; ++j) s += slot_norm(xi_flat, n, j);
    return std::pow(s, m_);
  }
  if (static_cast<int>(slots_.size()) != N)
    throw std::invalid_argument("SymbolOrder: slot count mismatch");
  double w = 1.0;
  for (int j = 0; j < N; ++j)
    w *= std::pow(1.0 + slot_norm(xi_flat, n, j), slots_[j]);
  return w;
}

SymbolSpec::SymbolSpec(int n, int N, SymbolOrder order, Eval eval,
                       bool x_independent, int max_deriv_order)
    : n_(n), N_(N), order_(std::move(order)), eval_(std::move(eval)),
      x_independent_(x_independent), max_deriv_order_(max_deriv_order) {
  if (n < 1 || n > 3) throw std::invalid_argument("SymbolSpec: dimension 1..3");
  if (N < 1 || N > 3) throw std::invalid_argument("SymbolSpec: arity 1..3");
  if (!eval_) throw std::invalid_argument("SymbolSpec: empty evaluator");
  if (max_deriv_order < 0)
    throw std::invalid_argument("SymbolSpec: negative derivative bound");
  if (x_independent_) {
    // spot check: the evaluator must not actually depend on x
    std::vector<double> xi(n * N), x1(n), x2(n);
    for (int trial = 0; trial < 3; ++trial) {
      for (int a = 0; a < n * N; ++a)
        xi[a] = 6.0 * unit_real(mix(11 + trial, a)) - 3.0;
      for (int a = 0; a < n; ++a) {
        x1[a] = 2.0 * unit_real(mix(21 + trial, a)) - 1.0;
        x2[a] = 2.0 * unit_real(mix(31 + trial, a)) - 1.0;
      }
      cplx v1 = eval_(x1, xi), v2 = eval_(x2, xi);
      if (std::abs(v1 - v2) > 1e-10 * (1.0 + std::abs(v1)))
        throw std::logic_error(
            "symbol declared x-independent but varies with x");
    }
  }
}

SymbolSpec SymbolSpec::multiplier(
    int n, int N, SymbolOrder order,
    std::function<cplx(std::span<const double>)> eval) {
  if (!eval) throw std::invalid_argument("multiplier: empty evaluator");
  return SymbolSpec(
      n, N, std::move(order),
      [fn = std::move(eval)](std::span<const double>, std::span<const double> xi) {
        return fn(xi);
      },
      /*x_independent=*/true);
}

SymbolSpec SymbolSpec::separable_multiplier(int n, int N, SymbolOrder order,
                                            std::vector<SlotFn> factors) {
  if (static_cast<int>(factors.size()) != N)
    throw std::invalid_argument("separable_multiplier: need one factor per slot");
  SymbolSpec s(
      n, N, std::move(order),
      [fs = factors, n](std::span<const double>, std::span<const double> xi) {
        cplx v = 1.0;
        for (std::size_t j = 0; j < fs.size(); ++j)
          v *= fs[j](xi.subspan(j * n, n));
        return v;
      },
      /*x_independent=*/true);
  s.factors_ = std::move(factors);
  return s;
}

cplx SymbolSpec::operator()(std::span<const double> x,
                            std::span<const double> xi_flat) const {
  return eval_(x, xi_flat);
}

namespace {

// accumulate the sampled seminorm for one multi-index gamma over the joint
// (x, xi) axes into est
void seminorm_accumulate(const SymbolSpec& symbol, std::span<const int> gamma,
                         double xi_box_radius, int samples, std::uint64_t seed,
                         SeminormEstimate& est) {
  const int n = symbol.dim(), d_xi = n * symbol.arity();
  const int d_x = symbol.x_independent() ? 0 : n;
  const int d = d_x + d_xi;
  std::vector<double> pt(d);
  std::vector<double> x(n, 0.0);

  // iterated central differences along the first active axis
  std::function<cplx(std::span<double>, std::span<const int>, double)> deriv =
      [&](std::span<double> p, std::span<const int> g_in, double h) -> cplx {
    int axis = -1;
    for (int a = 0; a < d; ++a)
      if (g_in[a] > 0) {
        axis = a;
        break;
      }
    if (axis < 0) {
      std::span<const double> xs =
          d_x > 0 ? std::span<const double>(p.data(), n) : std::span<const double>(x);
      return symbol(xs, std::span<const double>(p.data() + d_x, d_xi));
    }
    std::vector<int> g(g_in.begin(), g_in.end());
    --g[axis];
    double keep = p[axis];
    p[axis] = keep + h;
    cplx hi = deriv(p, g, h);
    p[axis] = keep - h;
    cplx lo = deriv(p, g, h);
    p[axis] = keep;
    return (hi - lo) / (2.0 * h);
  };

  int total = 0;
  for (int v : gamma) total += v;
  const double h = 1e-3;
  for (int i = 0; i < samples; ++i) {
    for (int a = 0; a < d_x; ++a)
      pt[a] = 4.0 * unit_real(mix(seed, mix(i, a))) - 2.0;
    for (int a = d_x; a < d; ++a)
      pt[a] = xi_box_radius * (2.0 * unit_real(mix(seed, mix(i, a))) - 1.0);
    double w = symbol.order().weight(
        n, std::span<const double>(pt.data() + d_x, d_xi));
    cplx v;
    if (total == 0) {
      v = deriv(pt, gamma, h);
    } else {
      cplx dh = deriv(pt, gamma, h);
      cplx dh2 = deriv(pt, gamma, h / 2);
      v = (4.0 * dh2 - dh) / 3.0;
      double denom = std::max(std::abs(v), 0.01 * (est.value + 1e-300));
      est.richardson_error =
          std::max(est.richardson_error, std::abs(dh2 - dh) / denom);
    }
    est.value = std::max(est.value, std::abs(v) / w);
  }
}

}  // namespace

SeminormEstimate seminorm_estimate(const SymbolSpec& symbol,
                                   std::span<const int> alpha,
                                   std::span<const int> beta,
                                   double xi_box_radius, int samples,
                                   std::uint64_t seed) {
  const int n = symbol.dim(), d_xi = n * symbol.arity();
  if (!alpha.empty() && static_cast<int>(alpha.size()) != n)
    throw std::invalid_argument("seminorm_estimate: alpha must have length n");
  if (static_cast<int>(beta.size()) != d_xi)
    throw std::invalid_argument("seminorm_estimate: beta must have length n*N");
  if (samples < 1) throw std::invalid_argument("seminorm_estimate: samples >= 1");
  int total = 0;
  for (int v : alpha) {
    if (v < 0) throw std::invalid_argument("seminorm_estimate: negative order");
    total += v;
  }
  for (int v : beta) {
    if (v < 0) throw std::invalid_argument("seminorm_estimate: negative order");
    total += v;
  }
  if (total > symbol.max_deriv_order())
    throw std::invalid_argument(
        "seminorm_estimate: derivative order exceeds the symbol's declared bound");
  if (symbol.x_independent())
    for (int v : alpha)
      if (v > 0)
        throw std::invalid_argument(
            "seminorm_estimate: x derivative of an x-independent symbol");

  const int d_x = symbol.x_independent() ? 0 : n;
  std::vector<int> gamma(d_x + d_xi, 0);
  for (int a = 0; a < d_x; ++a) gamma[a] = alpha[a];
  for (int a = 0; a < d_xi; ++a) gamma[d_x + a] = beta[a];

  SeminormEstimate est;
  est.total_order = total;
  est.samples = samples;
  seminorm_accumulate(symbol, gamma, xi_box_radius, samples, seed, est);
  return est;
}

SeminormEstimate seminorm_profile(const SymbolSpec& symbol, int max_order,
                                  double xi_box_radius, int samples,
                                  std::uint64_t seed) {
  if (max_order < 0 || max_order > symbol.max_deriv_order())
    throw std::invalid_argument(
        "seminorm_profile: order outside the symbol's declared bound");
  const int n = symbol.dim();
  const int d = (symbol.x_independent() ? 0 : n) + n * symbol.arity();

  std::vector<std::vector<int>> orders;
  std::vector<int> cur(d, 0);
  std::function<void(int, int)> gen = [&](int axis, int left) {
    if (axis == d) {
      orders.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[axis] = v;
      gen(axis + 1, left - v);
    }
    cur[axis] = 0;
  };
  gen(0, max_order);

  SeminormEstimate est;
  est.total_order = max_order;
  est.samples = samples;
  for (const auto& gamma : orders)
    seminorm_accumulate(symbol, gamma, xi_box_radius, samples, seed, est);
  return est;
}

PartitionSet::PartitionSet(int n, int chi_order) : n_(n), chi_m_(chi_order) {
  if (n < 1 || n > 3) throw std::invalid_argument("PartitionSet: dimension 1..3");
  if (chi_order < 1) throw std::invalid_argument("PartitionSet: chi order >= 1");
}

double PartitionSet::phi1(double t) const {
  // difference of the shared cumulative table telescopes exactly across
  // integer translates: sum_k phi1(t - k) = 1
  double upper = bump_cdf(4.0 * std::min(0.25, t + 0.5));
  double lower = bump_cdf(4.0 * std::max(-0.25, t - 0.5));
  double v = upper - lower;
  return v > 0.0 ? v : 0.0;
}

double PartitionSet::phi(std::span<const double> t) const {
  double v = 1.0;
  for (int a = 0; a < n_; ++a) v *= phi1(t[a]);
  return v;
}

double PartitionSet::phi_tilde1(double t) const {
  double a = std::abs(t);
  if (a <= 1.0) return 1.0;
  if (a >= M_PI) return 0.0;
  return smooth_step((a - 1.0) / (M_PI - 1.0));
}

double PartitionSet::phi_tilde(std::span<const double> t) const {
  double v = 1.0;
  for (int a = 0; a < n_; ++a) v *= phi_tilde1(t[a]);
  return v;
}

double PartitionSet::chi(std::span<const int> ell, std::span<const double> zeta) const {
  double p = 1.0;
  double l2 = 0.0, z2 = 0.0;
  for (int a = 0; a < n_; ++a) {
    p *= phi1(zeta[a] - ell[a]);
    l2 += static_cast<double>(ell[a]) * ell[a];
    z2 += zeta[a] * zeta[a];
  }
  if (p == 0.0) return 0.0;
  return p * std::pow((1.0 + l2) / (1.0 + z2), chi_m_);
}

LatticeField frequency_piece(const LatticeField& f, const PartitionSet& parts,
                             std::span<const int> nu, std::span<const double> k) {
  const GridSpec& g = f.grid();
  if (parts.dim() != g.n)
    throw std::invalid_argument("frequency_piece: partition dimension mismatch");
  if (static_cast<int>(nu.size()) != g.n || static_cast<int>(k.size()) != g.n)
    throw std::invalid_argument("frequency_piece: index dimension mismatch");
  if (f.domain() != Domain::space)
    throw std::invalid_argument("frequency_piece expects a space-domain field");

  LatticeField spec = forward_transform(f);
  std::vector<int> idx(g.n);
  std::vector<double> rel(g.n);
  double outside = 0.0;
  for (std::int64_t i = 0; i < spec.size(); ++i) {
    if (spec[i] == cplx(0.0, 0.0)) continue;
    spec.unflatten(i, idx);
    double phase = 0.0;
    bool in_box = true;
    for (int a = 0; a < g.n; ++a) {
      double xi = g.freq(idx[a]);
      rel[a] = xi - nu[a];
      phase += k[a] * xi;
      in_box = in_box && std::abs(rel[a]) < M_PI;
    }
    double w = parts.phi_tilde(rel);
    if (w != 0.0 && !in_box) outside += std::norm(w * spec[i]);
    spec[i] *= w * std::polar(1.0, phase);
  }
  if (outside > 0.0)
    throw std::logic_error("frequency_piece: band leaked outside its box");
  return inverse_transform(spec);
}

namespace {

std::int64_t box_flat(std::span<const int> v, int radius) {
  std::int64_t flat = 0;
  for (int x : v) {
    if (std::abs(x) > radius) return -1;
    flat = flat * (2 * radius + 1) + (x + radius);
  }
  return flat;
}

void box_vector(std::int64_t flat, int radius, std::span<int> out) {
  int width = 2 * radius + 1;
  for (int a = static_cast<int>(out.size()) - 1; a >= 0; --a) {
    out[a] = static_cast<int>(flat % width) - radius;
    flat /= width;
  }
}

int next_pow2(int v) {
  int p = 1;
  while (p < v) p *= 2;
  return p;
}

}  // namespace

const GridSpec& DecomposedSymbol::xgrid() const {
  if (!xgrid_) throw std::logic_error("x-independent decomposition has no x grid");
  return *xgrid_;
}

void DecomposedSymbol::nu_vector(std::int64_t nu_flat, std::span<int> out) const {
  box_vector(nu_flat, nu_radius_, out);
}

void DecomposedSymbol::k_vector(std::int64_t k_flat, std::span<int> out) const {
  box_vector(k_flat, k_radius_, out);
}

std::int64_t DecomposedSymbol::nu_flat(std::span<const int> nu) const {
  return box_flat(nu, nu_radius_);
}

std::int64_t DecomposedSymbol::k_flat(std::span<const int> k) const {
  return box_flat(k, k_radius_);
}

cplx DecomposedSymbol::q_value(std::int64_t nu_flat, std::int64_t k_flat) const {
  if (!x_independent_)
    throw std::logic_error("q_value is only defined for x-independent symbols");
  return q_const_[nu_flat * k_count_ + k_flat];
}

const std::vector<DecomposedSymbol::XBlock>& DecomposedSymbol::x_blocks(
    std::int64_t nu_flat, std::int64_t k_flat) const {
  if (x_independent_)
    throw std::logic_error("x_blocks is only defined for x-dependent symbols");
  return q_x_[nu_flat * k_count_ + k_flat];
}

DecomposedSymbol decompose(const SymbolSpec& symbol, const PartitionSet& parts,
                           int nu_radius, const DecomposeOptions& opts) {
  const int n = symbol.dim(), N = symbol.arity(), d = n * N;
  if (parts.dim() != n)
    throw std::invalid_argument("decompose: partition dimension mismatch");
  if (nu_radius < 0) throw std::invalid_argument("decompose: nu_radius < 0");
  if (opts.k_radius < 1 || opts.L < 1)
    throw std::invalid_argument("decompose: k_radius and L must be >= 1");
  if (!symbol.x_independent() && !opts.xgrid)
    throw std::invalid_argument("decompose: x-dependent symbol needs an x grid");

  DecomposedSymbol out;
  out.n_ = n;
  out.N_ = N;
  out.nu_radius_ = nu_radius;
  out.k_radius_ = opts.k_radius;
  out.L_ = opts.L;
  out.chi_m_ = parts.chi_order();
  out.x_independent_ = symbol.x_independent();
  out.order_ = symbol.order();
  if (!symbol.x_independent()) {
    opts.xgrid->validate();
    out.xgrid_ = opts.xgrid;
  }

  std::int64_t nu_count = 1, k_count = 1;
  for (int a = 0; a < d; ++a) {
    nu_count *= 2 * nu_radius + 1;
    k_count *= 2 * opts.k_radius + 1;
  }
  out.nu_count_ = nu_count;
  out.k_count_ = k_count;

  const GridSpec* xg = out.x_independent_ ? nullptr : &*out.xgrid_;
  const std::int64_t xsize = xg ? xg->size() : 1;

  int S = std::max(opts.min_quad_points, next_pow2(4 * (opts.k_radius + 1)));
  S = next_pow2(S);

  std::vector<int> nu(d), kvec(d), sidx(d);
  std::vector<double> eta(d), xpt(n, 0.0);
  std::vector<int> dims;
  std::vector<cplx> samples;

  for (;; S *= 2) {
    dims.assign(d, S);
    std::int64_t grid_total = 1;
    for (int a = 0; a < d; ++a) grid_total *= S;
    samples.assign(grid_total, cplx(0, 0));

    if (out.x_independent_)
      out.q_const_.assign(nu_count * k_count, cplx(0, 0));
    else
      out.q_x_.assign(nu_count * k_count, {});

    double worst_defect = 0.0;
    const double du = 2.0 * M_PI / S;

    for (std::int64_t nf = 0; nf < nu_count; ++nf) {
      box_vector(nf, nu_radius, nu);

      // x loop (single pass with a zero x for x-independent symbols)
      std::vector<std::vector<cplx>> p_of_x;  // [k_flat][x] for this nu
      if (!out.x_independent_) p_of_x.assign(k_count, std::vector<cplx>(xsize));

      double total2 = 0.0, shell2 = 0.0;
      for (std::int64_t xi_flat = 0; xi_flat < xsize; ++xi_flat) {
        if (xg) {
          std::vector<int> xidx(n);
          std::int64_t rem = xi_flat;
          for (int a = n - 1; a >= 0; --a) {
            xidx[a] = static_cast<int>(rem % xg->points_per_axis);
            rem /= xg->points_per_axis;
          }
          for (int a = 0; a < n; ++a) xpt[a] = xg->coord(xidx[a]);
        }

        std::fill(sidx.begin(), sidx.end(), 0);
        std::int64_t flat = 0;
        do {
          double mask = 1.0;
          for (int a = 0; a < d; ++a) {
            double u = -M_PI + sidx[a] * du;
            eta[a] = nu[a] + u;
            mask *= parts.phi1(u);
          }
          samples[flat] = mask == 0.0 ? cplx(0, 0) : mask * symbol(xpt, eta);
          ++flat;
        } while (advance_box(sidx, 0, S - 1) && (flat < grid_total));

        fft::dft(samples.data(), dims, /*inverse=*/false);

        // spectral-quality bookkeeping: mass in the outer half of the
        // coefficient array bounds the aliasing of the retained block
        for (std::int64_t c = 0; c < grid_total; ++c) {
          double m2 = std::norm(samples[c]);
          if (m2 == 0.0) continue;
          total2 += m2;
          std::int64_t rem = c;
          bool outer = false;
          for (int a = d - 1; a >= 0; --a) {
            int ka = static_cast<int>(rem % S);
            rem /= S;
            if (ka >= S / 2) ka -= S;
            if (std::abs(ka) > S / 4) outer = true;
          }
          if (outer) shell2 += m2;
        }

        // collect the retained coefficients
        std::fill(kvec.begin(), kvec.end(), -opts.k_radius);
        while (true) {
          std::int64_t cidx = 0;
          int parity = 0;
          double kdotnu = 0.0;
          for (int a = 0; a < d; ++a) {
            int ka = kvec[a];
            cidx = cidx * S + ((ka % S) + S) % S;
            parity += ka;
            kdotnu += static_cast<double>(ka) * nu[a];
          }
          cplx p = samples[cidx] / std::pow(static_cast<double>(S), d);
          if (parity & 1) p = -p;
          p *= std::polar(1.0, -kdotnu);
          std::int64_t kf = box_flat(kvec, opts.k_radius);
          if (out.x_independent_)
            out.q_const_[nf * k_count + kf] = p;
          else
            p_of_x[kf][xi_flat] = p;
          if (!advance_box(kvec, -opts.k_radius, opts.k_radius)) break;
        }
      }

      if (total2 > 0.0) worst_defect = std::max(worst_defect, shell2 / total2);

      if (!out.x_independent_) {
        // split each Q_{nu,k}(x) into chi offsets over the x spectrum
        for (std::int64_t kf = 0; kf < k_count; ++kf) {
          double k2 = 0.0;
          box_vector(kf, opts.k_radius, kvec);
          for (int a = 0; a < d; ++a) k2 += static_cast<double>(kvec[a]) * kvec[a];
          double kw = std::pow(1.0 + k2, opts.L);

          LatticeField q(*xg, Domain::space);
          for (std::int64_t xi_flat = 0; xi_flat < xsize; ++xi_flat)
            q[xi_flat] = kw * p_of_x[kf][xi_flat];
          LatticeField qspec = forward_transform(q);
          double spec_max = 0.0;
          for (std::int64_t c = 0; c < qspec.size(); ++c)
            spec_max = std::max(spec_max, std::abs(qspec[c]));

          int lmax = static_cast<int>(std::floor(xg->nyquist() + 0.75));
          std::vector<int> ell(n, -lmax), midx(n);
          std::vector<double> zeta(n);
          do {
            double l2 = 0.0;
            for (int a = 0; a < n; ++a) l2 += static_cast<double>(ell[a]) * ell[a];
            double lw = std::pow(1.0 + l2, parts.chi_order());
            LatticeField band(*xg, Domain::frequency);
            double band_amp = 0.0;
            for (std::int64_t c = 0; c < qspec.size(); ++c) {
              if (qspec[c] == cplx(0, 0)) continue;
              qspec.unflatten(c, midx);
              double w = 1.0;
              for (int a = 0; a < n; ++a) {
                zeta[a] = xg->freq(midx[a]);
                w *= parts.phi1(zeta[a] - ell[a]);
              }
              if (w == 0.0) continue;
              band[c] = w * qspec[c];
              band_amp = std::max(band_amp, std::abs(band[c]));
            }
            // drop bands that only carry transform rounding noise
            if (band_amp <= 1e-14 * spec_max) continue;
            DecomposedSymbol::XBlock blk;
            blk.ell = {0, 0, 0};
            for (int a = 0; a < n; ++a) blk.ell[a] = ell[a];
            LatticeField piece = inverse_transform(band);
            blk.values.assign(piece.values().begin(), piece.values().end());
            // chi_ell(zeta) <zeta>^{2M} = phi(zeta-ell) <ell>^{2M}
            for (cplx& v : blk.values) v *= lw;
            out.q_x_[nf * k_count + kf].push_back(std::move(blk));
          } while (advance_box(ell, -lmax, lmax));
        }
      }
    }

    out.defect_ = worst_defect;
    out.quad_points_ = S;
    if (worst_defect <= opts.target_defect || 2 * S > opts.max_quad_points) break;
  }

  if (out.defect_ > opts.defect_error) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "decompose: quadrature resolution insufficient "
                  "(defect %.3e > %.3e at %d points per axis)",
                  out.defect_, opts.defect_error, out.quad_points_);
    throw std::runtime_error(msg);
  }

  // apply the <k>^{2L} rescaling for the x-independent storage
  if (out.x_independent_) {
    for (std::int64_t kf = 0; kf < k_count; ++kf) {
      box_vector(kf, opts.k_radius, kvec);
      double k2 = 0.0;
      for (int a = 0; a < d; ++a) k2 += static_cast<double>(kvec[a]) * kvec[a];
      double kw = std::pow(1.0 + k2, opts.L);
      for (std::int64_t nf = 0; nf < nu_count; ++nf)
        out.q_const_[nf * k_count + kf] *= kw;
    }
  }

  return out;
}

cplx q_coefficient_by_parts(const SymbolSpec& symbol, const PartitionSet& parts,
                            std::span<const int> nu, std::span<const int> k,
                            int L, int quad_points) {
  if (!symbol.x_independent())
    throw std::invalid_argument("q_coefficient_by_parts: x-independent only");
  const int n = symbol.dim(), d = n * symbol.arity();
  const int S = quad_points;
  const double du = 2.0 * M_PI / S;
  const double h = 1e-3;
  std::vector<double> x0(n, 0.0);

  // sigma_nu as a function of eta
  auto f = [&](std::span<const double> eta) {
    double mask = 1.0;
    std::vector<double> u(d);
    for (int a = 0; a < d; ++a) {
      u[a] = eta[a] - nu[a];
      mask *= parts.phi1(u[a]);
    }
    if (mask == 0.0) return cplx(0, 0);
    return mask * symbol(x0, eta);
  };

  // (I - Laplacian)^L f by nested central second differences
  std::function<cplx(std::span<double>, int)> opL =
      [&](std::span<double> eta, int level) -> cplx {
    if (level == 0) return f(eta);
    cplx center = opL(eta, level - 1);
    cplx lap(0, 0);
    for (int a = 0; a < d; ++a) {
      double keep = eta[a];
      eta[a] = keep + h;
      cplx up = opL(eta, level - 1);
      eta[a] = keep - h;
      cplx dn = opL(eta, level - 1);
      eta[a] = keep;
      lap += (up - 2.0 * center + dn) / (h * h);
    }
    return center - lap;
  };

  std::vector<int> sidx(d, 0);
  std::vector<double> eta(d);
  cplx acc(0, 0);
  do {
    double kdot = 0.0;
    for (int a = 0; a < d; ++a) {
      eta[a] = nu[a] - M_PI + sidx[a] * du;
      kdot += static_cast<double>(k[a]) * eta[a];
    }
    acc += std::polar(1.0, -kdot) * opL(eta, L);
  } while (advance_box(sidx, 0, S - 1));

  return acc * std::pow(du / (2.0 * M_PI), d);
}

CoefficientBound coefficient_bound_check(const DecomposedSymbol& d,
                                         const SymbolOrder& order) {
  CoefficientBound out;
  const int dim = d.n() * d.arity();
  std::vector<int> nu(dim);
  std::vector<double> nud(dim);
  for (std::int64_t nf = 0; nf < d.nu_count(); ++nf) {
    d.nu_vector(nf, nu);
    for (int a = 0; a < dim; ++a) nud[a] = nu[a];
    double w = order.weight(d.n(), nud);
    for (std::int64_t kf = 0; kf < d.k_count(); ++kf) {
      if (d.x_independent()) {
        double v = std::abs(d.q_value(nf, kf)) / w;
        if (v > out.constant) {
          out.constant = v;
          out.argmax_nu = nf;
          out.argmax_k = kf;
          out.argmax_ell = {0, 0, 0};
        }
      } else {
        for (const auto& blk : d.x_blocks(nf, kf)) {
          double sup = 0.0;
          for (const cplx& q : blk.values) sup = std::max(sup, std::abs(q));
          double v = sup / w;
          if (v > out.constant) {
            out.constant = v;
            out.argmax_nu = nf;
            out.argmax_k = kf;
            out.argmax_ell = blk.ell;
          }
        }
      }
    }
  }
  return out;
}

CoefficientBound coefficient_bound_check(const DecomposedSymbol& d) {
  return coefficient_bound_check(d, d.order());
}

double chi_kernel_l1_constant(const PartitionSet& parts, int ell_max,
                              const GridSpec& grid) {
  if (ell_max < 0)
    throw std::invalid_argument("chi_kernel_l1_constant: ell_max >= 0");
  // chi_ell(zeta) = phi(zeta - ell) * (<ell>/<zeta>)^{2M}; translating the
  // window to the origin costs only a modulation of the kernel, which the
  // L1 norm ignores, so sample phi(zeta) <ell>^{2M} <zeta + ell>^{-2M}.
  const int n = grid.n;
  std::vector<int> ell(n, 0);
  double worst = 0.0;
  for (;;) {
    double l2 = 0.0;
    for (int a = 0; a < n; ++a) l2 += double(ell[a]) * ell[a];
    const double lw = std::pow(1.0 + l2, parts.chi_order());
    LatticeField ker = LatticeField::sample(
        grid, Domain::frequency, [&](std::span<const double> zeta) {
          double z2 = 0.0;
          for (int a = 0; a < n; ++a) {
            double s = zeta[a] + ell[a];
            z2 += s * s;
          }
          double zw = std::pow(1.0 + z2, parts.chi_order());
          return cplx(parts.phi(zeta) * lw / zw, 0.0);
        });
    worst = std::max(worst, lp_norm(inverse_transform(ker), 1.0));
    // advance ell over the box ||ell||_inf <= ell_max
    int a = n - 1;
    while (a >= 0 && ell[a] == ell_max) ell[a--] = -ell_max;
    if (a < 0) break;
    ++ell[a];
  }
  return worst;
}

}  // namespace pdlab
