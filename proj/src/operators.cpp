#include "pdlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace pdlab {
namespace {

// odometer over [0, M)^len in row-major order; false after the last tuple
bool advance_storage(std::span<int> idx, int M) {
  for (int a = static_cast<int>(idx.size()) - 1; a >= 0; --a) {
    if (++idx[a] < M) return true;
    idx[a] = 0;
  }
  return false;
}

const GridSpec& shared_grid(const SymbolSpec& symbol,
                            std::span<const LatticeField> f,
                            const char* who) {
  char msg[128];
  if (static_cast<int>(f.size()) != symbol.arity()) {
    std::snprintf(msg, sizeof msg, "%s: expected %d inputs, got %zu", who,
                  symbol.arity(), f.size());
    throw std::invalid_argument(msg);
  }
  const GridSpec& g = f[0].grid();
  if (g.n != symbol.dim()) {
    std::snprintf(msg, sizeof msg, "%s: grid dimension %d != symbol dimension %d",
                  who, g.n, symbol.dim());
    throw std::invalid_argument(msg);
  }
  for (const LatticeField& fj : f) {
    if (!(fj.grid() == g)) {
      std::snprintf(msg, sizeof msg, "%s: inputs live on different grids", who);
      throw std::invalid_argument(msg);
    }
    if (fj.domain() != Domain::space) {
      std::snprintf(msg, sizeof msg, "%s: inputs must be space-domain fields", who);
      throw std::invalid_argument(msg);
    }
  }
  return g;
}

// e^{2 pi i r / M} for r in [0, M); storage-index products already fold mod M
std::vector<cplx> unit_roots(int M) {
  std::vector<cplx> w(M);
  for (int r = 0; r < M; ++r)
    w[r] = std::polar(1.0, 2.0 * M_PI * r / M);
  return w;
}

// continuum-normalized forward coefficients by explicit summation (no FFT);
// the reference path must not share machinery with the fast paths
std::vector<cplx> naive_forward(const LatticeField& f,
                                const std::vector<cplx>& roots) {
  const GridSpec& g = f.grid();
  const int M = g.points_per_axis, n = g.n;
  const double cell = std::pow(g.spacing(), n);
  std::vector<cplx> hat(f.size());
  std::vector<int> mi(n), si(n);
  std::fill(mi.begin(), mi.end(), 0);
  std::int64_t mf = 0;
  do {
    cplx acc = 0.0;
    std::fill(si.begin(), si.end(), 0);
    std::int64_t sf = 0;
    do {
      std::int64_t r = 0;
      for (int a = 0; a < n; ++a) r += std::int64_t(si[a]) * mi[a];
      acc += f[sf] * std::conj(roots[static_cast<int>(r % M)]);
      ++sf;
    } while (advance_storage(si, M));
    hat[mf++] = cell * acc;
  } while (advance_storage(mi, M));
  return hat;
}

// middle-third spectral confinement: relative l2 mass with any axis index
// beyond floor(M/6); the pushforward of N such boxes cannot reach Nyquist
double confinement_excess(std::span<const cplx> hat, const GridSpec& g) {
  const int M = g.points_per_axis, n = g.n;
  const int allowed = M / 6;
  std::vector<int> mi(n, 0);
  double inside = 0.0, outside = 0.0;
  std::int64_t mf = 0;
  do {
    double m2 = std::norm(hat[mf++]);
    bool ok = true;
    for (int a = 0; a < n; ++a)
      ok = ok && std::abs(g.signed_index(mi[a])) <= allowed;
    (ok ? inside : outside) += m2;
  } while (advance_storage(mi, M));
  double total = inside + outside;
  return total > 0.0 ? outside / total : 0.0;
}

struct SlotSpectra {
  std::vector<std::vector<cplx>> hat;     // per slot, storage order
  std::vector<std::vector<double>> freq;  // per-axis frequency by storage index
};

}  // namespace

const char* apply_method_name(ApplyMethod m) {
  switch (m) {
    case ApplyMethod::direct_quadrature: return "direct_quadrature";
    case ApplyMethod::multiplier_fft: return "multiplier_fft";
    case ApplyMethod::decomposition_sum: return "decomposition_sum";
  }
  return "?";
}

OperatorResult apply_direct(const SymbolSpec& symbol,
                            std::span<const LatticeField> f) {
  const GridSpec& g = shared_grid(symbol, f, "apply_direct");
  const int n = g.n, N = symbol.arity(), M = g.points_per_axis;
  const int d = n * N;

  const bool shape_ok = (n == 1 && N <= 3 && M <= 256) ||
                        (n == 2 && N == 2 && M <= 64);
  double work = std::pow(double(M), double(d));
  if (!symbol.x_independent()) work *= std::pow(double(M), double(n));
  if (!shape_ok || work > double(1ll << 26)) {
    char msg[192];
    std::snprintf(msg, sizeof msg,
                  "apply_direct: refusing %.3g quadrature terms (budget: n=1 "
                  "needs N<=3 and <=256 points, n=2 needs N=2 and <=64 points, "
                  "work <= 2^26; got n=%d N=%d points=%d%s)",
                  work, n, N, M,
                  symbol.x_independent() ? "" : ", x-dependent");
    throw std::invalid_argument(msg);
  }

  const std::vector<cplx> roots = unit_roots(M);
  std::vector<std::vector<cplx>> hat(N);
  for (int j = 0; j < N; ++j) hat[j] = naive_forward(f[j], roots);
  std::vector<double> freq(M);
  for (int s = 0; s < M; ++s) freq[s] = g.freq(s);

  const double prefactor = std::pow(g.period, -double(d));
  LatticeField out(g, Domain::space);
  std::vector<int> mi(d, 0);
  std::vector<double> xi(d);
  std::vector<double> x(n, 0.0);
  std::vector<int> si(n);
  std::int64_t terms = 0;
  auto slot_flat = [&](int j) {
    std::int64_t flat = 0;
    for (int a = 0; a < n; ++a) flat = flat * M + mi[j * n + a];
    return flat;
  };

  if (symbol.x_independent()) {
    // accumulate the pushforward per folded output index, then synthesize
    // with the same explicit phase table
    std::vector<cplx> acc(static_cast<std::size_t>(std::pow(M, n)), 0.0);
    do {
      cplx coef = 1.0;
      for (int j = 0; j < N && coef != 0.0; ++j) coef *= hat[j][slot_flat(j)];
      if (coef == 0.0) continue;
      for (int a = 0; a < d; ++a) xi[a] = freq[mi[a]];
      cplx s = symbol(x, xi) * coef;
      if (s == 0.0) continue;
      std::int64_t tflat = 0;
      for (int a = 0; a < n; ++a) {
        int sum = 0;
        for (int j = 0; j < N; ++j) sum += mi[j * n + a];
        tflat = tflat * M + (sum % M);
      }
      acc[tflat] += s;
      ++terms;
    } while (advance_storage(mi, M));

    std::fill(si.begin(), si.end(), 0);
    std::int64_t sf = 0;
    std::vector<int> ti(n);
    do {
      cplx v = 0.0;
      std::fill(ti.begin(), ti.end(), 0);
      std::int64_t tf = 0;
      do {
        if (acc[tf] != 0.0) {
          std::int64_t r = 0;
          for (int a = 0; a < n; ++a) r += std::int64_t(si[a]) * ti[a];
          v += acc[tf] * roots[static_cast<int>(r % M)];
        }
        ++tf;
      } while (advance_storage(ti, M));
      out[sf++] = prefactor * v;
    } while (advance_storage(si, M));
  } else {
    std::vector<int> sumi(n);
    do {
      cplx coef = 1.0;
      for (int j = 0; j < N && coef != 0.0; ++j) coef *= hat[j][slot_flat(j)];
      if (coef == 0.0) continue;
      for (int a = 0; a < d; ++a) xi[a] = freq[mi[a]];
      for (int a = 0; a < n; ++a) {
        int sum = 0;
        for (int j = 0; j < N; ++j) sum += mi[j * n + a];
        sumi[a] = sum % M;
      }
      ++terms;
      std::fill(si.begin(), si.end(), 0);
      std::int64_t sf = 0;
      do {
        for (int a = 0; a < n; ++a) x[a] = g.coord(si[a]);
        std::int64_t r = 0;
        for (int a = 0; a < n; ++a) r += std::int64_t(si[a]) * sumi[a];
        out[sf++] += prefactor * symbol(x, xi) * coef *
                     roots[static_cast<int>(r % M)];
      } while (advance_storage(si, M));
    } while (advance_storage(mi, M));
  }

  OperatorResult res{std::move(out), ApplyMethod::direct_quadrature, {}};
  res.truncation.terms = terms;
  return res;
}

OperatorResult apply_multiplier_fft(const SymbolSpec& symbol,
                                    std::span<const LatticeField> f,
                                    const MultiplierOptions& opts) {
  const GridSpec& g = shared_grid(symbol, f, "apply_multiplier_fft");
  if (!symbol.x_independent())
    throw std::invalid_argument(
        "apply_multiplier_fft: symbol is x-dependent; use apply_direct or "
        "apply_via_decomposition");
  const int n = g.n, N = symbol.arity(), M = g.points_per_axis;

  std::vector<LatticeField> spec;
  spec.reserve(N);
  for (int j = 0; j < N; ++j) spec.push_back(forward_transform(f[j]));

  TruncationReport report;
  if (N >= 2) {
    double worst = 0.0;
    for (int j = 0; j < N; ++j)
      worst = std::max(worst, confinement_excess(spec[j].values(), g));
    if (worst > opts.confinement_tolerance && !opts.allow_aliasing) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "apply_multiplier_fft: input spectrum leaves the middle "
                    "third (relative mass %.3e > %.3e); the pushforward would "
                    "alias",
                    worst, opts.confinement_tolerance);
      throw std::invalid_argument(msg);
    }
  }

  std::vector<double> freq(M);
  for (int s = 0; s < M; ++s) freq[s] = g.freq(s);

  if (symbol.separable()) {
    // per-slot multipliers, then a pointwise product in space
    LatticeField out(g, Domain::space);
    std::vector<int> mi(n);
    std::vector<double> xi(n);
    for (std::int64_t i = 0; i < out.size(); ++i) out[i] = 1.0;
    for (int j = 0; j < N; ++j) {
      LatticeField& sj = spec[j];
      std::fill(mi.begin(), mi.end(), 0);
      std::int64_t mf = 0;
      do {
        if (sj[mf] != 0.0) {
          for (int a = 0; a < n; ++a) xi[a] = freq[mi[a]];
          sj[mf] *= symbol.factor(j)(xi);
          ++report.terms;
        }
        ++mf;
      } while (advance_storage(mi, M));
      LatticeField gj = inverse_transform(sj);
      for (std::int64_t i = 0; i < out.size(); ++i) out[i] *= gj[i];
    }
    return OperatorResult{std::move(out), ApplyMethod::multiplier_fft, report};
  }

  // gather occupied spectral sites per slot so band-limited inputs only pay
  // for their boxes; the forward transform turns exact zeros into ~1e-17
  // roundoff, so "occupied" means above a relative floor, not != 0
  struct Site {
    std::vector<int> signed_idx;
    std::vector<double> xi;
    cplx val;
  };
  std::vector<std::vector<Site>> sites(N);
  for (int j = 0; j < N; ++j) {
    double peak = 0.0;
    for (std::int64_t i = 0; i < spec[j].size(); ++i)
      peak = std::max(peak, std::abs(spec[j][i]));
    const double floor = 1e-14 * peak;
    std::vector<int> mi(n, 0);
    std::int64_t mf = 0;
    do {
      if (std::abs(spec[j][mf]) > floor) {
        Site s;
        s.signed_idx.resize(n);
        s.xi.resize(n);
        for (int a = 0; a < n; ++a) {
          s.signed_idx[a] = g.signed_index(mi[a]);
          s.xi[a] = freq[mi[a]];
        }
        s.val = spec[j][mf];
        sites[j].push_back(std::move(s));
      }
      ++mf;
    } while (advance_storage(mi, M));
  }

  LatticeField push(g, Domain::frequency);
  std::vector<std::size_t> pick(N, 0);
  std::vector<double> xi(n * N);
  std::vector<double> x;  // unused by x-independent evaluators
  double placed = 0.0, wrapped = 0.0;
  bool empty = false;
  for (int j = 0; j < N; ++j) empty = empty || sites[j].empty();
  if (!empty) {
    for (;;) {
      cplx coef = 1.0;
      for (int j = 0; j < N; ++j) {
        const Site& s = sites[j][pick[j]];
        coef *= s.val;
        std::copy(s.xi.begin(), s.xi.end(), xi.begin() + j * n);
      }
      cplx v = symbol(x, xi) * coef;
      if (v != 0.0) {
        std::int64_t tflat = 0;
        bool wrap = false;
        for (int a = 0; a < n; ++a) {
          int sum = 0;
          for (int j = 0; j < N; ++j) sum += sites[j][pick[j]].signed_idx[a];
          wrap = wrap || sum < -M / 2 || sum >= M / 2;
          tflat = tflat * M + (((sum % M) + M) % M);  // fold is exact
        }
        push[tflat] += v;
        (wrap ? wrapped : placed) += std::norm(v);
        ++report.terms;
      }
      int j = N - 1;
      while (j >= 0 && ++pick[j] == sites[j].size()) pick[j--] = 0;
      if (j < 0) break;
    }
  }
  report.wrapped_mass =
      placed + wrapped > 0.0 ? wrapped / (placed + wrapped) : 0.0;

  const double scale = std::pow(g.period, -double((N - 1) * n));
  for (std::int64_t i = 0; i < push.size(); ++i) push[i] *= scale;
  return OperatorResult{inverse_transform(push), ApplyMethod::multiplier_fft,
                        report};
}

double k_tail_weight_bound(int d, int L, int radius) {
  if (d < 1 || radius < 0)
    throw std::invalid_argument("k_tail_weight_bound: bad dimensions");
  if (2 * L <= d) return std::numeric_limits<double>::infinity();
  const double s = double(L) / d;  // per-axis exponent, 2s > 1
  auto g1 = [&](int kappa) {
    return std::pow(1.0 + double(kappa) * kappa, -s);
  };
  const int K0 = std::max(2 * radius, 4096);
  double inner = 1.0, full = 1.0;
  for (int kappa = 1; kappa <= K0; ++kappa) {
    double v = 2.0 * g1(kappa);
    full += v;
    if (kappa <= radius) inner += v;
  }
  full += 2.0 * std::pow(double(K0), 1.0 - 2.0 * s) / (2.0 * s - 1.0);
  return std::pow(full, d) - std::pow(inner, d);
}

namespace {

// lazily built bank of frequency pieces F^j, keyed per slot by the local
// (nu_j, k_j) pair; iteration order never depends on fill order
class PieceBank {
 public:
  PieceBank(const DecomposedSymbol& d, const PartitionSet& parts,
            std::span<const LatticeField> f)
      : d_(d), parts_(parts), f_(f) {
    const int n = d.n();
    nu_width_ = 2 * d.nu_radius() + 1;
    k_width_ = 2 * d.k_radius() + 1;
    std::int64_t per_slot = 1;
    for (int a = 0; a < n; ++a) per_slot *= nu_width_ * k_width_;
    bank_.assign(d.arity(), std::vector<std::optional<LatticeField>>(per_slot));
  }

  const LatticeField& get(int j, std::span<const int> nu_j,
                          std::span<const int> k_j) {
    const int n = d_.n();
    std::int64_t key = 0;
    for (int a = 0; a < n; ++a)
      key = key * nu_width_ * k_width_ +
            std::int64_t(nu_j[a] + d_.nu_radius()) * k_width_ +
            (k_j[a] + d_.k_radius());
    auto& slot = bank_[j][key];
    if (!slot) {
      std::vector<double> kd(k_j.begin(), k_j.end());
      slot.emplace(frequency_piece(f_[j], parts_, nu_j, kd));
    }
    return *slot;
  }

 private:
  const DecomposedSymbol& d_;
  const PartitionSet& parts_;
  std::span<const LatticeField> f_;
  int nu_width_, k_width_;
  std::vector<std::vector<std::optional<LatticeField>>> bank_;
};

const GridSpec& decomposition_grid(const DecomposedSymbol& d,
                                   std::span<const LatticeField> f,
                                   const char* who) {
  char msg[128];
  if (static_cast<int>(f.size()) != d.arity()) {
    std::snprintf(msg, sizeof msg, "%s: expected %d inputs, got %zu", who,
                  d.arity(), f.size());
    throw std::invalid_argument(msg);
  }
  const GridSpec& g = f[0].grid();
  if (g.n != d.n()) {
    std::snprintf(msg, sizeof msg, "%s: grid dimension %d != symbol dimension %d",
                  who, g.n, d.n());
    throw std::invalid_argument(msg);
  }
  for (const LatticeField& fj : f) {
    if (!(fj.grid() == g))
      throw std::invalid_argument(
          std::string(who) + ": inputs live on different grids");
    if (fj.domain() != Domain::space)
      throw std::invalid_argument(
          std::string(who) + ": inputs must be space-domain fields");
  }
  if (!d.x_independent() && !(d.xgrid() == g))
    throw std::invalid_argument(
        std::string(who) +
        ": x-dependent coefficients live on a different grid than the inputs");
  return g;
}

}  // namespace

OperatorResult apply_via_decomposition(const DecomposedSymbol& d,
                                       const PartitionSet& parts,
                                       std::span<const LatticeField> f) {
  const GridSpec& g = decomposition_grid(d, f, "apply_via_decomposition");
  const int n = d.n(), N = d.arity(), dim = n * N;

  PieceBank bank(d, parts, f);
  LatticeField out(g, Domain::space);
  std::vector<int> k(dim), nu(dim);
  std::vector<const LatticeField*> piece(N);
  TruncationReport report;

  // fixed flat order over k outer, nu inner: reruns are bit-identical
  for (std::int64_t kf = 0; kf < d.k_count(); ++kf) {
    d.k_vector(kf, k);
    double k2 = 0.0;
    for (int v : k) k2 += double(v) * v;
    const double kw = std::pow(1.0 + k2, double(d.L()));  // undo <k>^{2L}
    for (std::int64_t nf = 0; nf < d.nu_count(); ++nf) {
      d.nu_vector(nf, nu);
      for (int j = 0; j < N; ++j)
        piece[j] = &bank.get(j, std::span<const int>(nu).subspan(j * n, n),
                             std::span<const int>(k).subspan(j * n, n));
      if (d.x_independent()) {
        const cplx q = d.q_value(nf, kf) / kw;
        if (q == 0.0) continue;
        ++report.terms;
        for (std::int64_t i = 0; i < out.size(); ++i) {
          cplx prod = q;
          for (int j = 0; j < N; ++j) prod *= (*piece[j])[i];
          out[i] += prod;
        }
      } else {
        for (const auto& blk : d.x_blocks(nf, kf)) {
          double l2 = 0.0;
          for (int a = 0; a < n; ++a) l2 += double(blk.ell[a]) * blk.ell[a];
          const double lw = std::pow(1.0 + l2, double(d.chi_order()));
          ++report.terms;
          for (std::int64_t i = 0; i < out.size(); ++i) {
            cplx prod = blk.values[i] / (kw * lw);
            for (int j = 0; j < N; ++j) prod *= (*piece[j])[i];
            out[i] += prod;
          }
        }
      }
    }
  }

  report.k_tail_weight = k_tail_weight_bound(dim, d.L(), d.k_radius());
  // the x-band split is complete on the grid, so no ell tail remains
  report.ell_tail_weight = 0.0;
  // relative input mass outside the region where the retained nu box still
  // sums to one (per axis |xi| <= nu_radius + 1/4)
  for (int j = 0; j < N; ++j) {
    LatticeField spec = forward_transform(f[j]);
    std::vector<int> mi(n, 0);
    std::int64_t mf = 0;
    double inside = 0.0, outside = 0.0;
    do {
      double m2 = std::norm(spec[mf++]);
      bool covered = true;
      for (int a = 0; a < n; ++a)
        covered = covered &&
                  std::abs(g.freq(mi[a])) <= d.nu_radius() + 0.25;
      (covered ? inside : outside) += m2;
    } while (advance_storage(mi, g.points_per_axis));
    if (inside + outside > 0.0)
      report.input_coverage_gap =
          std::max(report.input_coverage_gap, outside / (inside + outside));
  }

  return OperatorResult{std::move(out), ApplyMethod::decomposition_sum, report};
}

HmuFamily assemble_hmu(const DecomposedSymbol& d, const PartitionSet& parts,
                       std::span<const LatticeField> f,
                       std::span<const int> k, std::span<const int> ell) {
  const GridSpec& g = decomposition_grid(d, f, "assemble_hmu");
  const int n = d.n(), N = d.arity(), dim = n * N;
  if (static_cast<int>(k.size()) != dim)
    throw std::invalid_argument("assemble_hmu: k must have length n*N");
  if (static_cast<int>(ell.size()) != n)
    throw std::invalid_argument("assemble_hmu: ell must have length n");
  const std::int64_t kf = d.k_flat(k);
  if (kf < 0)
    throw std::invalid_argument(
        "assemble_hmu: coefficients for this k were not retained");
  if (d.x_independent())
    for (int a = 0; a < n; ++a)
      if (ell[a] != 0)
        throw std::invalid_argument(
            "assemble_hmu: x-independent coefficients have no ell != 0 bands");

  const int V = d.nu_radius();
  const int mu_radius = N * V, mu_width = 2 * mu_radius + 1;
  std::int64_t mu_count = 1;
  for (int a = 0; a < n; ++a) mu_count *= mu_width;

  HmuFamily fam;
  fam.mu.resize(mu_count, {0, 0, 0});
  fam.fields.reserve(mu_count);
  for (std::int64_t i = 0; i < mu_count; ++i) {
    std::int64_t rest = i;
    for (int a = n - 1; a >= 0; --a) {
      fam.mu[i][a] = static_cast<int>(rest % mu_width) - mu_radius;
      rest /= mu_width;
    }
    fam.fields.emplace_back(g, Domain::space);
  }

  PieceBank bank(d, parts, f);
  std::vector<int> nu(dim);
  std::vector<const LatticeField*> piece(N);
  for (std::int64_t nf = 0; nf < d.nu_count(); ++nf) {
    d.nu_vector(nf, nu);
    std::int64_t mu_flat = 0;
    for (int a = 0; a < n; ++a) {
      int mu_a = 0;
      for (int j = 0; j < N; ++j) mu_a += nu[j * n + a];
      mu_flat = mu_flat * mu_width + (mu_a + mu_radius);
    }
    const cplx* xq = nullptr;
    cplx q = 0.0;
    if (d.x_independent()) {
      q = d.q_value(nf, kf);
      if (q == 0.0) continue;
    } else {
      for (const auto& blk : d.x_blocks(nf, kf)) {
        bool match = true;
        for (int a = 0; a < n; ++a) match = match && blk.ell[a] == ell[a];
        if (match) {
          xq = blk.values.data();
          break;
        }
      }
      if (!xq) continue;  // band pruned below the amplitude floor
    }
    for (int j = 0; j < N; ++j)
      piece[j] = &bank.get(j, std::span<const int>(nu).subspan(j * n, n),
                           std::span<const int>(k).subspan(j * n, n));
    LatticeField& h = fam.fields[mu_flat];
    for (std::int64_t i = 0; i < h.size(); ++i) {
      cplx prod = d.x_independent() ? q : xq[i];
      for (int j = 0; j < N; ++j) prod *= (*piece[j])[i];
      h[i] += prod;
    }
  }

  // support check: spectrum of h_mu concentrates near mu + ell
  const double predicted = N * M_PI + 0.75;
  std::vector<int> mi(n, 0);
  for (std::int64_t i = 0; i < mu_count; ++i) {
    LatticeField spec = forward_transform(fam.fields[i]);
    double total = 0.0;
    for (std::int64_t m = 0; m < spec.size(); ++m) total += std::norm(spec[m]);
    if (total == 0.0) continue;
    double outside = 0.0;
    std::fill(mi.begin(), mi.end(), 0);
    std::int64_t mf = 0;
    do {
      double m2 = std::norm(spec[mf++]);
      if (m2 == 0.0) continue;
      double dist = 0.0;
      for (int a = 0; a < n; ++a)
        dist = std::max(dist,
                        std::abs(g.freq(mi[a]) - fam.mu[i][a] - ell[a]));
      if (dist > predicted + 1e-9) outside += m2;
      if (m2 > 1e-24 * total)
        fam.support_radius = std::max(fam.support_radius, dist);
    } while (advance_storage(mi, g.points_per_axis));
    fam.worst_outside_energy =
        std::max(fam.worst_outside_energy, outside / total);
  }
  return fam;
}

MasterEstimate master_estimate_probe(const DecomposedSymbol& d,
                                     const PartitionSet& parts,
                                     std::span<const LatticeField> f, double s,
                                     double t, const WindowKappa& kappa) {
  OperatorResult res = apply_via_decomposition(d, parts, f);
  MasterEstimate est;
  est.left = wiener_amalgam_norm(res.output, s, t, 0.0, kappa).value;

  const GridSpec& g = f[0].grid();
  const int n = d.n(), dim = n * d.arity();

  // distinct retained ell offsets (x-independent data only has ell = 0)
  std::vector<std::array<int, 3>> ells;
  if (d.x_independent()) {
    ells.push_back({0, 0, 0});
  } else {
    for (std::int64_t nf = 0; nf < d.nu_count(); ++nf)
      for (std::int64_t kf = 0; kf < d.k_count(); ++kf)
        for (const auto& blk : d.x_blocks(nf, kf))
          if (std::find(ells.begin(), ells.end(), blk.ell) == ells.end())
            ells.push_back(blk.ell);
    std::sort(ells.begin(), ells.end());
  }

  std::vector<int> k(dim);
  LatticeField G(g, Domain::space);
  for (std::int64_t kf = 0; kf < d.k_count(); ++kf) {
    d.k_vector(kf, k);
    for (const auto& ell : ells) {
      HmuFamily fam = assemble_hmu(d, parts, f,
                                   k, std::span<const int>(ell.data(), n));
      for (std::int64_t i = 0; i < G.size(); ++i) {
        double acc = 0.0;
        if (std::isinf(t)) {
          for (const LatticeField& h : fam.fields)
            acc = std::max(acc, std::abs(h[i]));
        } else {
          for (const LatticeField& h : fam.fields)
            acc += std::pow(std::abs(h[i]), t);
          acc = std::pow(acc, 1.0 / t);
        }
        G[i] = acc;
      }
      double value = lp_norm(G, s);
      if (value > est.right) {
        est.right = value;
        est.argmax_k = kf;
        est.argmax_ell = ell;
      }
    }
  }
  return est;
}

double nikolskij_ratio(const LatticeField& h, const WindowKappa& kappa,
                       std::span<const double> a, double r) {
  const GridSpec& g = h.grid();
  const int n = g.n, M = g.points_per_axis;
  if (h.domain() != Domain::space)
    throw std::invalid_argument("nikolskij_ratio: space-domain field expected");
  if (static_cast<int>(a.size()) != n)
    throw std::invalid_argument("nikolskij_ratio: center has wrong dimension");
  if (!(r > 0.0) || r > 1.0)
    throw std::invalid_argument("nikolskij_ratio: r must lie in (0, 1]");

  // kernel F^{-1} kappa and the windowed field kappa(D - a) h
  LatticeField khat = LatticeField::sample(
      g, Domain::frequency, [&](std::span<const double> zeta) {
        return cplx(kappa(zeta), 0.0);
      });
  LatticeField kernel = inverse_transform(khat);
  LatticeField spec = forward_transform(h);
  std::vector<int> mi(n, 0);
  std::vector<double> rel(n);
  std::int64_t mf = 0;
  do {
    for (int axis = 0; axis < n; ++axis) rel[axis] = g.freq(mi[axis]) - a[axis];
    spec[mf++] *= kappa(rel);
  } while (advance_storage(mi, M));
  LatticeField windowed = inverse_transform(spec);

  const double cell = std::pow(g.spacing(), n);
  std::vector<int> si(n, 0), yi(n), di(n);
  double worst = 0.0;
  std::int64_t sf = 0;
  do {
    double acc = 0.0;
    std::fill(yi.begin(), yi.end(), 0);
    std::int64_t yf = 0;
    do {
      std::int64_t df = 0;
      for (int axis = 0; axis < n; ++axis)
        df = df * M + (((si[axis] - yi[axis]) % M) + M) % M;
      double v = std::abs(kernel[yf] * h[df]);
      ++yf;
      if (v != 0.0) acc += std::pow(v, r);
    } while (advance_storage(yi, M));
    double right = std::pow(cell * acc, 1.0 / r);
    if (right > 0.0) worst = std::max(worst, std::abs(windowed[sf]) / right);
    ++sf;
  } while (advance_storage(si, M));
  return worst;
}

}  // namespace pdlab
