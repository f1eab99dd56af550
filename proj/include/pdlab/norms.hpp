#pragma once

#include <cstdint>
#include <span>

#include "pdlab/grid.hpp"

namespace pdlab {

// L^p quasinorm over the field's own lattice (Riemann sum with the cell
// volume of its domain); p = infinity takes the max modulus. p must be > 0.
double lp_norm(const LatticeField& f, double p);

// Weak L^p via the decreasing rearrangement of |f|:
//   sup_j (j * cell)^{1/p} * a_j,  a_1 >= a_2 >= ... the sorted moduli.
// Finite p only.
double weak_lp_norm(const LatticeField& f, double p);

// Frequency window for Wiener-amalgam norms: a product of scaled bumps
// supported in |xi_i| <= 0.75, normalized once so the periodized sum over the
// integer lattice satisfies the cover bound sum_k kappa(xi - k) >= 1 (the raw
// product bump dips to ~0.806 between lattice points). The measured cover
// bounds are recorded on the object.
class WindowKappa {
 public:
  static WindowKappa standard(int n);

  int dim() const { return n_; }
  double support_radius() const { return 0.75; }
  double eval1d(double t) const;
  double operator()(std::span<const double> xi) const;
  double cover_min() const { return cover_min_; }  // >= 1 by construction
  double cover_max() const { return cover_max_; }

 private:
  WindowKappa(int n, double scale, double cover_min, double cover_max)
      : n_(n), scale_(scale), cover_min_(cover_min), cover_max_(cover_max) {}
  int n_;
  double scale_;
  double cover_min_, cover_max_;
};

// Wiener amalgam norm W^{p,q}_s: l^q_k over the integer lattice of
// <k>^s || kappa(D - k) f ||_{L^p}. The window sweep covers every grid
// frequency; `spectral_tail` reports the relative l^2 spectral mass within
// reach of the frequency-box boundary (bands there are truncated by the
// grid), flagged when above 1e-10.
struct AmalgamNorm {
  double value = 0.0;
  double spectral_tail = 0.0;
  bool tail_warning = false;
  int window_radius = 0;
};

AmalgamNorm wiener_amalgam_norm(const LatticeField& f, double p, double q,
                                double s, const WindowKappa& kappa);

// Local Hardy-space quasinorm h^p: L^p norm of sup_{0<t<=1} |phi_t * f| with
// the Gaussian profile phi(x) = exp(-|x|^2/2) over dyadic t = 2^-j,
// j = 0..levels (levels = log2(points_per_axis) - 2 when 0). Requires the
// profile to decay below 1e-12 at half the period, i.e. period >= ~14.9.
struct MaximalPhi {
  int levels = 0;
};

double local_hardy_norm(const LatticeField& f, double p,
                        const MaximalPhi& profile = {});

// Mean-oscillation norms over the dyadic cubes of the cell and their
// half-cube translates. local = false: sup of mean oscillation over all
// cubes. local = true (bmo): oscillation over cubes of side <= 1 plus mean
// modulus over cubes of side >= 1.
double bmo_norm(const LatticeField& f, bool local);

// Embedding experiments: ratio statistics of target norm / source norm over
// seeded random band-limited fields.
enum class Embedding {
  amalgam_into_amalgam,   // W^{p,q1} -> W^{p2,q2}, p <= p2, q1 <= q2
  lp_into_amalgam_dual,   // L^p -> W^{p,p'},   1 <= p <= 2
  lp_into_amalgam_l2,     // L^p -> W^{p,2},    2 <= p
  hardy_into_amalgam,     // h^p -> W^{p,2}_{n(1/2-1/p)}, 0 < p <= 2
  bmo_into_amalgam,       // bmo -> W^{inf,2}
  amalgam_into_hardy,     // W^{p,2} -> h^p,    0 < p <= 2
  amalgam_into_lp,        // W^{p,p'} -> L^p,   2 <= p
};

const char* embedding_name(Embedding e);

struct EmbeddingConfig {
  GridSpec grid = GridSpec::make(1, 256, 4);
  double p = 2.0;
  double p2 = 2.0, q1 = 2.0, q2 = 2.0;  // amalgam_into_amalgam only
  double band_radius = 6.0;
  int trials = 100;
  std::uint64_t seed = 1;
};

struct RatioStats {
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  double mean_ratio = 0.0;
  int evaluated = 0;
  int skipped = 0;  // degenerate (zero source norm) draws
};

RatioStats check_embedding(Embedding which, const EmbeddingConfig& cfg,
                           const WindowKappa& kappa);

}  // namespace pdlab
