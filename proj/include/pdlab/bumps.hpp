#pragma once

namespace pdlab {

// Standard compactly supported mollifier: exp(1 - 1/(1-t^2)) on (-1,1), zero
// outside. Peak value 1 at t = 0, C-infinity everywhere.
double bump(double t);

// C-infinity step: 1 for u <= 0, 0 for u >= 1, strictly decreasing between.
double smooth_step(double u);

// Ramp that is 0 below lo, 1 above hi (lo < hi), smooth in between.
inline double smooth_ramp_up(double u, double lo, double hi) {
  return smooth_step(1.0 - (u - lo) / (hi - lo));
}

// Window in a scalar variable u: supported on (support_lo, support_hi),
// identically 1 on [plateau_lo, plateau_hi], smooth transitions.
double plateau_window(double u, double support_lo, double plateau_lo,
                      double plateau_hi, double support_hi);

// Normalized antiderivative of the bump: rises from exactly 0 at t = -1 to
// exactly 1 at t = +1. Tabulated once (composite Simpson on a fine grid) and
// evaluated with cubic Hermite pieces whose slopes are the exact bump values,
// so expressions built from differences of this function telescope exactly.
double bump_cdf(double t);

}  // namespace pdlab
