#include "pdlab/sharpness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <stdexcept>

#include "pdlab/bumps.hpp"
#include "pdlab/norms.hpp"
#include "pdlab/operators.hpp"
#include "pdlab/random.hpp"

namespace pdlab {
namespace {

__attribute__((format(printf, 1, 2), noreturn)) void fail_arg(const char* fmt,
                                                              ...) {
  char msg[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(msg, sizeof msg, fmt, ap);
  va_end(ap);
  throw std::invalid_argument(msg);
}

__attribute__((format(printf, 1, 2), noreturn)) void fail_run(const char* fmt,
                                                              ...) {
  char msg[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(msg, sizeof msg, fmt, ap);
  va_end(ap);
  throw std::runtime_error(msg);
}

std::int64_t ipow(std::int64_t base, int e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= base;
  return r;
}

double euclid(std::span<const int> v) {
  double s = 0.0;
  for (int c : v) s += double(c) * c;
  return std::sqrt(s);
}

// cube [lo, hi]^n flattened row-major
struct Cube {
  int n = 1, lo = 0, hi = 0;
  std::int64_t count = 0;
  Cube(int n_, int lo_, int hi_)
      : n(n_), lo(lo_), hi(hi_),
        count(ipow(std::int64_t(hi_) - lo_ + 1, n_)) {}
  static Cube signed_box(int n, int r) { return Cube(n, -r, r); }
  static Cube quadrant(int n, int r) { return Cube(n, 0, r); }

  void decode(std::int64_t flat, std::span<int> out) const {
    const int w = hi - lo + 1;
    for (int a = n - 1; a >= 0; --a) {
      out[a] = int(flat % w) + lo;
      flat /= w;
    }
  }
  std::int64_t encode(std::span<const int> v) const {
    std::int64_t flat = 0;
    for (int a = 0; a < n; ++a) {
      if (v[a] < lo || v[a] > hi) return -1;
      flat = flat * (hi - lo + 1) + (v[a] - lo);
    }
    return flat;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// thresholds

Rational critical_exponent(const CriticalExponentQuery& q) {
  if (q.n < 1) fail_arg("critical_exponent: dimension must be >= 1, got %d", q.n);
  const Rational n(q.n);
  const Rational half_n(q.n, 2);
  Rational out = rmin(n * q.exps.p().reciprocal(), half_n);
  for (const Exponent& pj : q.exps.inputs())
    out = out - rmax(n * pj.reciprocal(), half_n);
  return out;
}

Rational two_input_max_threshold(int n, const Exponent& p1, const Exponent& p2) {
  if (n < 1) fail_arg("two_input_max_threshold: dimension must be >= 1, got %d", n);
  const Rational u = p1.reciprocal(), v = p2.reciprocal();
  const Rational half(1, 2);
  Rational best = half;
  best = rmax(best, u);
  best = rmax(best, v);
  best = rmax(best, Rational(1) - u - v);
  best = rmax(best, u + v - half);
  return -(Rational(n) * best);
}

// ---------------------------------------------------------------------------
// best constants

namespace {

// c(t) = sum_{u+v=t} a(u) b(v), output on the Minkowski-sum cube
std::vector<double> box_conv(const std::vector<double>& a, const Cube& ca,
                             const std::vector<double>& b, const Cube& cb) {
  const Cube cc(ca.n, ca.lo + cb.lo, ca.hi + cb.hi);
  std::vector<double> c(cc.count, 0.0);
  std::vector<int> ua(ca.n), ub(ca.n), uc(ca.n);
  for (std::int64_t i = 0; i < ca.count; ++i) {
    if (a[i] == 0.0) continue;
    ca.decode(i, ua);
    for (std::int64_t j = 0; j < cb.count; ++j) {
      if (b[j] == 0.0) continue;
      cb.decode(j, ub);
      for (int t = 0; t < ca.n; ++t) uc[t] = ua[t] + ub[t];
      c[cc.encode(uc)] += a[i] * b[j];
    }
  }
  return c;
}

// g(v) = sum_mu u(mu) B(mu - v), v over the target cube
std::vector<double> box_corr(const std::vector<double>& u, const Cube& cu,
                             const std::vector<double>& B, const Cube& cB,
                             const Cube& cv) {
  std::vector<double> g(cv.count, 0.0);
  std::vector<int> xu(cu.n), xv(cu.n), xd(cu.n);
  for (std::int64_t iv = 0; iv < cv.count; ++iv) {
    cv.decode(iv, xv);
    double acc = 0.0;
    for (std::int64_t iu = 0; iu < cu.count; ++iu) {
      if (u[iu] == 0.0) continue;
      cu.decode(iu, xu);
      for (int t = 0; t < cu.n; ++t) xd[t] = xu[t] - xv[t];
      const std::int64_t j = cB.encode(xd);
      if (j >= 0) acc += u[iu] * B[j];
    }
    g[iv] = acc;
  }
  return g;
}

double l2_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void normalize_l2(std::vector<double>& v) {
  const double s = l2_of(v);
  if (s > 0)
    for (double& x : v) x /= s;
}

std::vector<double> start_vector(std::int64_t count, int start, int slot) {
  std::vector<double> v(count);
  if (start == 0) {
    std::fill(v.begin(), v.end(), 1.0);
  } else {
    // positive but uneven, deterministic in (start, slot, index)
    for (std::int64_t i = 0; i < count; ++i) {
      double g0, g1;
      normal_pair(mix(mix(start, slot), std::uint64_t(i)), g0, g1);
      v[i] = std::fabs(g0) + 0.02;
    }
  }
  normalize_l2(v);
  return v;
}

constexpr int kMaxSweeps = 20000;
constexpr double kAscentTol = 1e-10;

HilbertConstant kernel_form_constant(int N, int n, int radius) {
  // the section lives on the nonnegative quadrant, the habitat of the
  // classical inequality; sign flips only relabel |nu_j|, so the full
  // signed constant differs by at most the quadrant-folding factor
  const Cube slot = Cube::quadrant(n, radius);
  const std::int64_t P = slot.count;
  double work = 1.0;
  for (int j = 0; j < N; ++j) work *= double(P);
  if (work > double(std::int64_t(1) << 27))
    fail_arg("hilbert_type_constant: kernel form sweeps %.3g tuples (cap 2^27); "
             "shrink the radius", work);

  std::vector<double> nrm(P);
  std::vector<int> c(n);
  for (std::int64_t i = 0; i < P; ++i) {
    slot.decode(i, c);
    nrm[i] = euclid(c);
  }
  const double expo = -0.5 * N * n;

  // N = 2 fits a full kernel matrix; larger arities evaluate on the fly
  std::vector<double> kmat;
  if (N == 2 && P * P <= (std::int64_t(1) << 26)) {
    kmat.resize(P * P);
    for (std::int64_t i = 0; i < P; ++i)
      for (std::int64_t j = 0; j < P; ++j)
        kmat[i * P + j] = std::pow(1.0 + nrm[i] + nrm[j], expo);
  }

  HilbertConstant best;
  best.starts = 3;
  for (int start = 0; start < best.starts; ++start) {
    std::vector<std::vector<double>> A(N);
    for (int j = 0; j < N; ++j) A[j] = start_vector(P, start, j);

    double obj = 0.0, residual = 1.0;
    int sweep = 0;
    for (sweep = 1; sweep <= kMaxSweeps; ++sweep) {
      double last = 0.0;
      for (int i = 0; i < N; ++i) {
        std::vector<double> g(P, 0.0);
        if (!kmat.empty()) {
          const std::vector<double>& other = A[1 - i];
          for (std::int64_t v = 0; v < P; ++v) {
            double acc = 0.0;
            const double* row = &kmat[v * P];
            for (std::int64_t w = 0; w < P; ++w) acc += row[w] * other[w];
            g[v] = acc;  // the kernel is symmetric in its two slots
          }
        } else {
          std::vector<std::int64_t> pos(N, 0);
          for (std::int64_t v = 0; v < P; ++v) {
            double acc = 0.0;
            std::fill(pos.begin(), pos.end(), 0);
            // odometer over the other slots
            for (;;) {
              double prod = 1.0, dist = nrm[v];
              for (int j = 0; j < N; ++j) {
                if (j == i) continue;
                prod *= A[j][pos[j]];
                dist += nrm[pos[j]];
              }
              if (prod != 0.0) acc += std::pow(1.0 + dist, expo) * prod;
              int j = N - 1;
              for (; j >= 0; --j) {
                if (j == i) continue;
                if (++pos[j] < P) break;
                pos[j] = 0;
              }
              if (j < 0) break;
            }
            g[v] = acc;
          }
        }
        last = l2_of(g);
        if (last > 0)
          for (std::int64_t v = 0; v < P; ++v) A[i][v] = g[v] / last;
      }
      residual = std::fabs(last - obj) / std::max(last, 1e-300);
      obj = last;
      if (sweep >= 2 && residual < kAscentTol) break;
    }
    if (sweep > kMaxSweeps)
      fail_run("hilbert_type_constant: start %d did not converge after %d "
               "sweeps (relative change %.3e)", start, kMaxSweeps, residual);
    if (obj > best.constant) {
      best.constant = obj;
      best.residual = residual;
      best.iterations = sweep;
    }
  }
  return best;
}

HilbertConstant weighted_form_constant(int N, int n, double r,
                                       std::span<const double> a, int radius) {
  if (!(r > 1.0) || !std::isfinite(r))
    fail_arg("hilbert_type_constant: weighted form needs 1 < r < inf, got %g", r);
  if (int(a.size()) != N)
    fail_arg("hilbert_type_constant: %d weight exponents for %d slots",
             int(a.size()), N);
  double asum = 0.0;
  for (int j = 0; j < N; ++j) {
    if (!(a[j] > -0.5 * n) || !(a[j] < 0.0))
      fail_arg("hilbert_type_constant: weight exponent a_%d = %g outside "
               "(-n/2, 0) = (%g, 0)", j + 1, a[j], -0.5 * n);
    asum += a[j];
  }
  const double target = n / r - 0.5 * N * n;
  if (std::fabs(asum - target) > 1e-9)
    fail_arg("hilbert_type_constant: weight exponents sum to %.12g, the "
             "scaling constraint needs n/r - Nn/2 = %.12g", asum, target);

  // quadrant sections, like the kernel form: n_0^n is closed under the
  // convolution, so the inequality restricts cleanly
  const Cube slot = Cube::quadrant(n, radius);
  const std::int64_t P = slot.count;
  const Cube out = Cube::quadrant(n, N * radius);
  if (double(out.count) * double(P) > double(std::int64_t(1) << 27))
    fail_arg("hilbert_type_constant: weighted form sweeps %.3g pairs (cap "
             "2^27); shrink the radius", double(out.count) * double(P));

  std::vector<std::vector<double>> w(N, std::vector<double>(P));
  std::vector<int> c(n);
  for (std::int64_t i = 0; i < P; ++i) {
    slot.decode(i, c);
    const double d = euclid(c);
    for (int j = 0; j < N; ++j) w[j][i] = std::pow(1.0 + d, a[j]);
  }
  const double rp = r / (r - 1.0);

  // h = (w_1 A_1) * .. * (w_N A_N) as a lattice convolution
  auto convolve_all = [&](const std::vector<std::vector<double>>& A,
                          int skip) -> std::pair<std::vector<double>, Cube> {
    std::vector<double> acc;
    Cube cacc = slot;
    for (int j = 0; j < N; ++j) {
      if (j == skip) continue;
      std::vector<double> wa(P);
      for (std::int64_t i = 0; i < P; ++i) wa[i] = w[j][i] * A[j][i];
      if (acc.empty()) {
        acc = std::move(wa);
      } else {
        acc = box_conv(acc, cacc, wa, slot);
        cacc = Cube(n, cacc.lo, cacc.hi + radius);
      }
    }
    return {std::move(acc), cacc};
  };

  HilbertConstant best;
  best.starts = 3;
  for (int start = 0; start < best.starts; ++start) {
    std::vector<std::vector<double>> A(N);
    for (int j = 0; j < N; ++j) A[j] = start_vector(P, start, j);

    double obj = 0.0, residual = 1.0;
    int sweep = 0;
    for (sweep = 1; sweep <= kMaxSweeps; ++sweep) {
      auto [h, hcube] = convolve_all(A, -1);
      double hnorm = 0.0;
      for (double x : h) hnorm += std::pow(x, rp);
      hnorm = std::pow(hnorm, 1.0 / rp);
      if (!(hnorm > 0)) break;  // degenerate start

      residual = std::fabs(hnorm - obj) / hnorm;
      obj = hnorm;
      if (sweep >= 3 && residual < kAscentTol) break;

      // duality map of h in l^{r'}: <h, u> = ||h||_{r'}, ||u||_r = 1
      std::vector<double> u(h.size());
      for (size_t i = 0; i < h.size(); ++i)
        u[i] = std::pow(h[i] / hnorm, rp - 1.0);

      for (int i = 0; i < N; ++i) {
        auto [B, Bcube] = convolve_all(A, i);
        std::vector<double> g = box_corr(u, hcube, B, Bcube, slot);
        for (std::int64_t v = 0; v < P; ++v) g[v] *= w[i][v];
        normalize_l2(g);
        A[i] = std::move(g);
      }
    }
    if (sweep > kMaxSweeps)
      fail_run("hilbert_type_constant: start %d did not converge after %d "
               "sweeps (relative change %.3e)", start, kMaxSweeps, residual);
    if (obj > best.constant) {
      best.constant = obj;
      best.residual = residual;
      best.iterations = sweep;
    }
  }
  return best;
}

}  // namespace

HilbertConstant hilbert_type_constant(int N, int n, double r,
                                      std::span<const double> a,
                                      int lattice_radius) {
  if (N < 2) fail_arg("hilbert_type_constant: arity must be >= 2, got %d", N);
  if (n < 1) fail_arg("hilbert_type_constant: dimension must be >= 1, got %d", n);
  if (lattice_radius < 1)
    fail_arg("hilbert_type_constant: lattice radius must be >= 1, got %d",
             lattice_radius);
  if (a.empty()) return kernel_form_constant(N, n, lattice_radius);
  return weighted_form_constant(N, n, r, a, lattice_radius);
}

// ---------------------------------------------------------------------------
// lacunary-phase series

double WaingerParams::b(int n) const {
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  return 0.5 * n + (1.0 - a) * (0.5 * n - n * inv_p) + epsilon;
}

WaingerField wainger_synthesize(const WaingerParams& w, const GridSpec& grid) {
  grid.validate();
  if (!(w.a > 0.0 && w.a < 1.0))
    fail_arg("wainger_synthesize: phase exponent a must lie in (0,1), got %g", w.a);
  if (!(w.p >= 1.0))
    fail_arg("wainger_synthesize: p must be >= 1, got %g", w.p);
  if (!(w.epsilon > 0.0))
    fail_arg("wainger_synthesize: epsilon must be positive, got %g", w.epsilon);
  if (std::fabs(grid.period - 2.0 * M_PI) > 1e-12 * 2.0 * M_PI)
    fail_arg("wainger_synthesize: the series lives on a 2*pi-periodic grid, "
             "got period %.6g", grid.period);
  const int max_l = grid.points_per_axis / 2 - 1;
  if (w.radius < 1 || 2 * w.radius > max_l)
    fail_arg("wainger_synthesize: radius %d needs 1 <= radius and 2*radius <= "
             "%d on %d points per axis", w.radius, max_l, grid.points_per_axis);

  const double b = w.b(grid.n);
  const double amp = std::pow(2.0 * M_PI, grid.n);  // undoes period^-n of the inverse

  auto partial = [&](int R) {
    LatticeField fhat(grid, Domain::frequency);
    std::vector<int> idx(grid.n);
    for (std::int64_t i = 0; i < fhat.size(); ++i) {
      fhat.unflatten(i, idx);
      double nsq = 0.0;
      for (int s : idx) {
        const double l = grid.signed_index(s);
        nsq += l * l;
      }
      if (nsq == 0.0 || nsq > double(R) * R) continue;
      const double l = std::sqrt(nsq);
      fhat[i] = amp * std::polar(std::pow(l, -b),
                                 2.0 * M_PI * std::pow(l, w.a));
    }
    return inverse_transform(fhat);
  };

  int R = w.radius;
  for (;;) {
    LatticeField f_r = partial(R);
    LatticeField f_2r = partial(2 * R);
    const double norm_r = lp_norm(f_r, w.p);
    const double norm_2r = lp_norm(f_2r, w.p);
    if (std::fabs(norm_2r - norm_r) < 0.01 * std::max(norm_r, norm_2r))
      return {std::move(f_r), b, R, norm_r, norm_2r};
    if (4 * R > max_l)
      fail_run("wainger_synthesize: L^%g norms at radii %d and %d still "
               "differ by %.2g%% and radius %d does not fit %d points per "
               "axis; raise epsilon or a", w.p, R, 2 * R,
               100.0 * std::fabs(norm_2r - norm_r) / std::max(norm_r, norm_2r),
               4 * R, grid.points_per_axis);
    R *= 2;
  }
}

// ---------------------------------------------------------------------------
// growth-rate reports

namespace {

// least squares of log2(value) against scale; residual = rms misfit
void fit_log2(SharpnessReport& rep) {
  const size_t m = rep.points.size();
  if (m < 4)
    fail_arg("%s: slope fit needs at least 4 scale points, got %zu",
             rep.family.c_str(), m);
  double sx = 0, sy = 0;
  for (const ScalePoint& p : rep.points) {
    if (!(p.value > 0.0) || !std::isfinite(p.value))
      fail_run("%s: measured value %g at scale %g; cannot fit log2 growth",
               rep.family.c_str(), p.value, p.scale);
    sx += p.scale;
    sy += std::log2(p.value);
  }
  const double xbar = sx / m, ybar = sy / m;
  double sxx = 0, sxy = 0;
  for (const ScalePoint& p : rep.points) {
    const double dx = p.scale - xbar;
    sxx += dx * dx;
    sxy += dx * (std::log2(p.value) - ybar);
  }
  if (!(sxx > 0))
    fail_arg("%s: scale points must not coincide", rep.family.c_str());
  rep.fitted_slope = sxy / sxx;
  double rss = 0;
  for (const ScalePoint& p : rep.points) {
    const double e = std::log2(p.value) - ybar - rep.fitted_slope * (p.scale - xbar);
    rss += e * e;
  }
  rep.residual = std::sqrt(rss / m);
}

// signed lattice points with lo <= |v|_2 <= hi, row-major box order, flattened
std::vector<int> shell_points(int n, double lo, double hi, const char* who) {
  const int r = int(std::floor(hi));
  const Cube box = Cube::signed_box(n, r);
  if (box.count > (std::int64_t(1) << 26))
    fail_arg("%s: shell radius %g in dimension %d scans %lld lattice points "
             "(cap 2^26)", who, hi, n, static_cast<long long>(box.count));
  std::vector<int> pts;
  std::vector<int> c(n);
  const double lo2 = lo * lo, hi2 = hi * hi;
  for (std::int64_t i = 0; i < box.count; ++i) {
    box.decode(i, c);
    double nsq = 0;
    for (int v : c) nsq += double(v) * v;
    if (nsq >= lo2 && nsq <= hi2)
      pts.insert(pts.end(), c.begin(), c.end());
  }
  return pts;
}

std::vector<double> case1_decay_exponents(int n, const ExponentTuple& exps,
                                          std::span<const double> a,
                                          double epsilon) {
  const int N = exps.size();
  std::vector<double> b(N);
  for (int j = 0; j < N; ++j) {
    const Exponent& pj = exps.inputs()[j];
    double aj;
    if (a.empty()) {
      aj = pj.reciprocal() <= Rational(1, 2) ? 1.0 : 0.0;  // p_j >= 2 limit
    } else {
      aj = a[j];
    }
    b[j] = 0.5 * n + (1.0 - aj) * (0.5 * n - n * pj.reciprocal().value()) + epsilon;
  }
  return b;
}

}  // namespace

std::int64_t DkTable::flat(std::span<const int> k) const {
  const Cube box = Cube::signed_box(n, box_radius);
  return box.encode(k);
}

double DkTable::l2_norm() const {
  double s = 0;
  for (double v : d) s += v * v;
  return std::sqrt(s);
}

double DkTable::total() const {
  double s = 0;
  for (double v : d) s += v;
  return s;
}

int case1_min_l_offset(int N) {
  if (N < 2) fail_arg("case1_min_l_offset: arity must be >= 2, got %d", N);
  int L = 0;
  while (double(N - 1) * std::exp2(double(-L)) > 0.25) ++L;
  return L;
}

DkTable case1_dk_table(int n, std::span<const double> b, double m, int A,
                       int L_offset) {
  if (n < 1) fail_arg("case1_dk_table: dimension must be >= 1, got %d", n);
  const int N = int(b.size());
  if (N < 2) fail_arg("case1_dk_table: arity must be >= 2, got %d", N);
  if (A < 1) fail_arg("case1_dk_table: scale index must be >= 1, got %d", A);
  if (L_offset < 0)
    fail_arg("case1_dk_table: scale gap must be >= 0, got %d", L_offset);

  const double inner_lo = std::exp2(double(A - L_offset - 1));
  const double inner_hi = std::exp2(double(A - L_offset));
  const double outer_lo = std::exp2(double(A - 1));
  const double outer_hi = std::exp2(double(A + 1));
  const std::vector<int> inner =
      shell_points(n, inner_lo, inner_hi, "case1_dk_table");
  const std::int64_t inner_count = std::int64_t(inner.size()) / n;
  if (inner_count == 0)
    fail_arg("case1_dk_table: the annulus [%g, %g] holds no lattice points; "
             "raise A or lower L_offset", inner_lo, inner_hi);
  const std::vector<int> outer =
      shell_points(n, outer_lo, outer_hi, "case1_dk_table");
  const std::int64_t outer_count = std::int64_t(outer.size()) / n;

  double work = double(outer_count);
  for (int j = 0; j < N - 1; ++j) work *= double(inner_count);
  if (work > double(std::int64_t(1) << 27))
    fail_arg("case1_dk_table: %.3g tuples at A=%d (cap 2^27); lower A or the "
             "arity", work, A);

  // per-slot decay of the annulus slots, cached over the point list
  std::vector<std::vector<double>> wj(N - 1,
                                      std::vector<double>(inner_count));
  std::vector<double> inner_norm(inner_count);
  for (std::int64_t i = 0; i < inner_count; ++i) {
    inner_norm[i] = euclid(std::span(inner).subspan(i * n, n));
    for (int j = 0; j < N - 1; ++j)
      wj[j][i] = std::pow(inner_norm[i], -b[j]);
  }

  DkTable t;
  t.n = n;
  t.A = A;
  t.box_radius = int(outer_hi);
  const Cube kbox = Cube::signed_box(n, t.box_radius);
  t.d.assign(kbox.count, 0.0);

  const double keep_lo2 = std::exp2(2.0 * (A - 2));
  const double keep_hi2 = std::exp2(2.0 * (A + 2));
  std::vector<std::int64_t> pos(N - 1, 0);
  std::vector<int> klast(n);
  // fixed order: outer k slowest, annulus tuples in row-major box order
  for (std::int64_t ko = 0; ko < outer_count; ++ko) {
    const std::span<const int> k(outer.data() + ko * n, size_t(n));
    const std::int64_t kflat = kbox.encode(k);
    std::fill(pos.begin(), pos.end(), 0);
    for (;;) {
      double ksq = 0.0, weight = 1.0;
      for (int ax = 0; ax < n; ++ax) klast[ax] = k[ax];
      for (int j = 0; j < N - 1; ++j) {
        const int* kj = inner.data() + pos[j] * n;
        for (int ax = 0; ax < n; ++ax) klast[ax] -= kj[ax];
        ksq += inner_norm[pos[j]] * inner_norm[pos[j]];
        weight *= wj[j][pos[j]];
      }
      double lsq = 0.0;
      for (int ax = 0; ax < n; ++ax) lsq += double(klast[ax]) * klast[ax];
      if (lsq < keep_lo2 || lsq > keep_hi2) {
        char tup[256];
        int off = 0;
        for (int j = 0; j < N - 1 && off < 200; ++j) {
          const int* kj = inner.data() + pos[j] * n;
          for (int ax = 0; ax < n; ++ax)
            off += std::snprintf(tup + off, sizeof tup - off, "%d ", kj[ax]);
        }
        for (int ax = 0; ax < n && off < 200; ++ax)
          off += std::snprintf(tup + off, sizeof tup - off, "%d ", klast[ax]);
        fail_run("case1_dk_table: tuple (%s) puts |k_%d| = %.6g outside "
                 "[2^%d, 2^%d] at A=%d; raise L_offset", tup, N,
                 std::sqrt(lsq), A - 2, A + 2, A);
      }
      ksq += lsq;
      t.d[kflat] += std::pow(1.0 + std::sqrt(ksq), m) *
                    weight * std::pow(std::sqrt(lsq), -b[N - 1]);
      ++t.terms;
      int j = N - 2;
      for (; j >= 0; --j) {
        if (++pos[j] < inner_count) break;
        pos[j] = 0;
      }
      if (j < 0) break;
    }
  }
  return t;
}

namespace {

// E || sum_k r_k d_k e^{ikx} ||_{L^p}^p over random signs, against
// (sum d_k^2)^{p/2} (2 pi)^n
double khinchine_ratio_mc(const DkTable& t, double p, int trials,
                          std::uint64_t seed) {
  int M = 1;
  while (M < 4 * t.box_radius) M *= 2;
  const GridSpec g = GridSpec::make(t.n, M, 1);
  const Cube kbox = Cube::signed_box(t.n, t.box_radius);
  const double amp = std::pow(2.0 * M_PI, t.n);

  // storage addresses of the nonzero coefficients, computed once
  std::vector<std::int64_t> addr;
  std::vector<double> coef;
  std::vector<std::int64_t> key;
  std::vector<int> c(t.n), s(t.n);
  LatticeField probe(g, Domain::frequency);
  for (std::int64_t i = 0; i < kbox.count; ++i) {
    if (t.d[i] == 0.0) continue;
    kbox.decode(i, c);
    for (int ax = 0; ax < t.n; ++ax) s[ax] = g.storage_index(c[ax]);
    addr.push_back(probe.flatten(s));
    coef.push_back(t.d[i]);
    key.push_back(i);
  }

  double d2 = 0.0;
  for (double v : coef) d2 += v * v;
  if (!(d2 > 0)) fail_run("khinchine check: empty d_k family at A=%d", t.A);

  double acc = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    LatticeField fhat(g, Domain::frequency);
    for (size_t i = 0; i < addr.size(); ++i) {
      const int sign =
          rademacher(mix(mix(seed, std::uint64_t(trial)), std::uint64_t(key[i])));
      fhat[addr[i]] = amp * sign * coef[i];
    }
    acc += std::pow(lp_norm(inverse_transform(fhat), p), p);
  }
  return (acc / trials) / (std::pow(2.0 * M_PI, t.n) * std::pow(d2, 0.5 * p));
}

}  // namespace

SharpnessReport case1_random_sign_experiment(const Case1Config& cfg) {
  const int N = cfg.exps.size();
  if (cfg.n < 1)
    fail_arg("case1: dimension must be >= 1, got %d", cfg.n);
  if (N < 2) fail_arg("case1: arity must be >= 2, got %d", N);
  for (int j = 0; j < N; ++j) {
    const Exponent& pj = cfg.exps.inputs()[j];
    if (pj.is_infinity() || !(pj.reciprocal() < Rational(1)))
      fail_arg("case1: input exponent p_%d must satisfy 1 < p_j < inf, got %s",
               j + 1, pj.str().c_str());
  }
  if (!(cfg.exps.p().reciprocal() >= Rational(1, 2)))
    fail_arg("case1: target exponent must satisfy 0 < p <= 2, got %s",
             cfg.exps.p().str().c_str());
  if (!cfg.a.empty()) {
    if (int(cfg.a.size()) != N)
      fail_arg("case1: %zu phase exponents for %d slots", cfg.a.size(), N);
    for (double aj : cfg.a)
      if (!(aj >= 0.0 && aj <= 1.0))
        fail_arg("case1: phase exponents must lie in [0,1], got %g", aj);
  }
  if (!(cfg.epsilon >= 0.0))
    fail_arg("case1: epsilon must be >= 0, got %g", cfg.epsilon);
  if (cfg.trials < 0)
    fail_arg("case1: trials must be >= 0, got %d", cfg.trials);

  const std::vector<double> b =
      case1_decay_exponents(cfg.n, cfg.exps, cfg.a, cfg.epsilon);

  SharpnessReport rep;
  rep.family = "random-sign";
  double bsum = 0.0;
  for (double bj : b) bsum += bj;
  rep.theoretical_slope = cfg.m - bsum + cfg.n * (N - 1) + 0.5 * cfg.n;

  const double p = cfg.exps.p().as_double();
  for (int A : cfg.A_list) {
    const DkTable t = case1_dk_table(cfg.n, b, cfg.m, A, cfg.L_offset);
    rep.points.push_back({double(A), t.l2_norm()});
    if (cfg.trials > 0)
      rep.khinchine_ratio.push_back(
          khinchine_ratio_mc(t, p, cfg.trials, cfg.seed));
  }
  fit_log2(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// dyadic shell family

double case3_psi(std::span<const double> xi) {
  double nsq = 0.0;
  for (double v : xi) nsq += v * v;
  if (nsq <= 0.0) return 0.0;
  return bump(4.0 * std::log2(std::sqrt(nsq)));
}

double case3_shell(int n, int N, std::span<const double> xi_flat) {
  double s = 0.0;
  for (int j = 0; j < N; ++j) {
    double nsq = 0.0;
    for (int ax = 0; ax < n; ++ax) {
      const double v = xi_flat[j * n + ax];
      nsq += v * v;
    }
    s += std::sqrt(nsq);
  }
  if (s <= 0.0) return 0.0;
  return plateau_window(std::log2(s / N), -0.5, -0.25, 0.25, 0.5);
}

SymbolSpec case3_symbol(int n, int N, double m) {
  if (n < 1 || N < 1)
    fail_arg("case3_symbol: need n >= 1 and N >= 1, got n=%d N=%d", n, N);
  auto eval = [n, N, m](std::span<const double> xi_flat) -> cplx {
    double s = 0.0;
    for (int j = 0; j < N; ++j) {
      double nsq = 0.0;
      for (int ax = 0; ax < n; ++ax) {
        const double v = xi_flat[j * n + ax];
        nsq += v * v;
      }
      s += std::sqrt(nsq);
    }
    if (s <= 0.0) return 0.0;
    // the shell window only sees sum_j |xi_j|, so dilation by 2^-j shifts
    // its log2 argument; at most one dyadic term is live at any point
    const double t = std::log2(s / N);
    const int jc = int(std::floor(t));
    double acc = 0.0;
    for (int j = std::max(0, jc - 1); j <= jc + 1; ++j)
      acc += std::exp2(double(j) * m) *
             plateau_window(t - j, -0.5, -0.25, 0.25, 0.5);
    return acc;
  };
  return SymbolSpec::multiplier(n, N, SymbolOrder::scalar(m), eval);
}

SharpnessReport case3_dyadic_experiment(const Case3Config& cfg) {
  cfg.grid.validate();
  if (cfg.n != cfg.grid.n)
    fail_arg("case3: config dimension %d != grid dimension %d", cfg.n,
             cfg.grid.n);
  const int N = cfg.exps.size();
  for (int j = 0; j < N; ++j) {
    const Exponent& pj = cfg.exps.inputs()[j];
    if (pj.is_infinity() || !(pj.reciprocal() > Rational(1, 2)) ||
        !(pj.reciprocal() < Rational(1)))
      fail_arg("case3: input exponent p_%d must satisfy 1 < p_j < 2, got %s",
               j + 1, pj.str().c_str());
  }
  const Exponent& p = cfg.exps.p();
  if (p.is_infinity() || !(p.reciprocal() < Rational(1, 2)))
    fail_arg("case3: target exponent must satisfy 2 < p < inf, got %s",
             p.str().c_str());
  int kmax = 0;
  for (int k : cfg.k_list) {
    if (k < 0) fail_arg("case3: scale indices must be >= 0, got %d", k);
    kmax = std::max(kmax, k);
  }
  const double shell_top = std::exp2(kmax + 0.25);
  const double safe = (cfg.grid.points_per_axis / 6) * cfg.grid.freq_spacing();
  if (shell_top > safe)
    fail_run("case3: refusing scale 2^%d on %d points per axis (shell top "
             "%.6g exceeds the aliasing-safe band %.6g); shrink k_list or "
             "enlarge the grid", kmax, cfg.grid.points_per_axis, shell_top,
             safe);

  const SymbolSpec sigma = case3_symbol(cfg.n, N, cfg.m);

  SharpnessReport rep;
  rep.family = "dyadic";
  rep.theoretical_slope = cfg.m - cfg.n * p.reciprocal().value();
  for (int j = 0; j < N; ++j)
    rep.theoretical_slope += cfg.n * cfg.exps.inputs()[j].reciprocal().value();

  for (int k : cfg.k_list) {
    std::vector<LatticeField> f;
    double inputs = 1.0;
    for (int j = 0; j < N; ++j) {
      const double pj_inv = cfg.exps.inputs()[j].reciprocal().value();
      const double ampl = std::exp2(double(k) * cfg.n * (pj_inv - 1.0));
      const double scale = std::exp2(double(-k));
      LatticeField fhat = LatticeField::sample(
          cfg.grid, Domain::frequency,
          [&](std::span<const double> xi) -> cplx {
            std::vector<double> sc(xi.size());
            for (size_t ax = 0; ax < xi.size(); ++ax) sc[ax] = scale * xi[ax];
            return ampl * case3_psi(sc);
          });
      f.push_back(inverse_transform(fhat));
      const double nj = lp_norm(f.back(), cfg.exps.inputs()[j].as_double());
      if (!(nj > 0))
        fail_run("case3: slot %d captures no lattice frequencies at scale "
                 "2^%d on %d points per axis", j + 1, k,
                 cfg.grid.points_per_axis);
      rep.input_norms.push_back(nj);
      inputs *= nj;
    }
    const OperatorResult res = apply_multiplier_fft(sigma, f);
    rep.points.push_back({double(k), lp_norm(res.output, p.as_double()) / inputs});
  }
  fit_log2(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// phase scan

std::string ThresholdScan::csv() const {
  std::string out = "tuple,offset,family,fitted_slope,theory_slope,pass,note\n";
  char buf[256];
  for (const ThresholdCell& c : cells) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%s,%.17g,%.17g,%d,\"",
                  c.tuple.c_str(), c.offset, c.family.c_str(), c.fitted_slope,
                  c.theory_slope, c.pass ? 1 : 0);
    out += buf;
    for (char ch : c.note) {  // CSV quoting: double any embedded quote
      out += ch;
      if (ch == '"') out += '"';
    }
    out += "\"\n";
  }
  return out;
}

ThresholdScan threshold_scan(int n, std::span<const ExponentTuple> p_grid,
                             std::span<const double> m_offsets,
                             const ScanBudget& budget) {
  if (n < 1) fail_arg("threshold_scan: dimension must be >= 1, got %d", n);
  ThresholdScan scan;
  for (const ExponentTuple& exps : p_grid) {
    std::string tup = "p=" + exps.p().str();
    for (int j = 0; j < exps.size(); ++j) {
      char lbl[48];
      std::snprintf(lbl, sizeof lbl, ";p%d=", j + 1);
      tup += lbl;
      tup += exps.inputs()[j].str();
    }
    const double m_cr = critical_exponent({n, exps}).value();

    bool inputs_open = true, inputs_below_two = true;
    for (const Exponent& pj : exps.inputs()) {
      if (pj.is_infinity() || !(pj.reciprocal() < Rational(1)))
        inputs_open = false;
      if (pj.is_infinity() || !(pj.reciprocal() > Rational(1, 2)))
        inputs_below_two = false;
    }
    const bool p_low = exps.p().reciprocal() >= Rational(1, 2);
    const bool p_high =
        !exps.p().is_infinity() && exps.p().reciprocal() < Rational(1, 2);

    for (double off : m_offsets) {
      ThresholdCell cell;
      cell.tuple = tup;
      cell.offset = off;
      const double m = m_cr + off;
      try {
        if (inputs_open && p_low) {
          cell.family = "random-sign";
          Case1Config c1{n,    exps,        m,   budget.A_list,
                         budget.L_offset,  0,   budget.seed,
                         0.0,              {}};
          const SharpnessReport r = case1_random_sign_experiment(c1);
          cell.fitted_slope = r.fitted_slope;
          cell.theory_slope = r.theoretical_slope;
        } else if (inputs_below_two && p_high) {
          cell.family = "dyadic";
          Case3Config c3{n, exps, m, budget.k_list, budget.grid};
          const SharpnessReport r = case3_dyadic_experiment(c3);
          cell.fitted_slope = r.fitted_slope;
          cell.theory_slope = r.theoretical_slope;
        } else {
          cell.family = "none";
          cell.note = "not applicable";
          scan.cells.push_back(std::move(cell));
          continue;
        }
        cell.pass = std::fabs(cell.fitted_slope - cell.theory_slope) <
                    budget.slope_tolerance;
        cell.note = "ok";
      } catch (const std::exception& e) {
        cell.pass = false;
        cell.note = e.what();
      }
      scan.cells.push_back(std::move(cell));
    }
  }
  return scan;
}

}  // namespace pdlab
