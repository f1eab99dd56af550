#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pdlab/exponents.hpp"
#include "pdlab/grid.hpp"
#include "pdlab/symbols.hpp"

namespace pdlab {

// ---------------------------------------------------------------------------
// Closed-form boundedness thresholds.

struct CriticalExponentQuery {
  int n = 1;
  ExponentTuple exps;
};

// Largest symbol order for which the operators stay bounded on the given
// exponent tuple: min{n/p, n/2} - sum_j max{n/p_j, n/2}, with 1/inf = 0.
// Exact rational arithmetic.
Rational critical_exponent(const CriticalExponentQuery& q);

// Two-input threshold in max form,
//   -n * max{1/2, 1/p1, 1/p2, 1 - 1/p1 - 1/p2, 1/p1 + 1/p2 - 1/2},
// stated for the Hoelder target 1/p = 1/p1 + 1/p2, where it agrees with
// critical_exponent.
Rational two_input_max_threshold(int n, const Exponent& p1, const Exponent& p2);

// ---------------------------------------------------------------------------
// Best constants of the discrete convolution inequalities, restricted to
// finite lattice sections.  Both forms keep the nonnegative quadrant
// [0, radius]^n: the kernel sees only |nu_j| (signs merely fold), and n_0^n
// is closed under the convolution, so the weighted inequality restricts
// cleanly as well.

struct HilbertConstant {
  double constant = 0.0;   // objective of the best start at termination
  double residual = 0.0;   // its last relative objective change
  int iterations = 0;      // sweeps used by the best start
  int starts = 0;
};

// Estimates the best constant C of one of two inequalities over nonnegative
// sequences A_j on the truncated lattice:
//   weighted form (a nonempty, length N):
//     || sum_{nu_1+..+nu_N = mu} prod_j (1+|nu_j|)^{a_j} A_j(nu_j) ||_{l^{r'}_mu}
//       <= C prod_j ||A_j||_{l^2},
//     requires 1 < r < inf, -n/2 < a_j < 0, sum_j a_j = n/r - N n/2;
//   kernel form (a empty; r ignored):
//     sum_{nu_vec} (1 + |nu_1| + .. + |nu_N|)^{-Nn/2} prod_j A_j(nu_j)
//       <= C prod_j ||A_j||_{l^2}.
// Method: alternating ascent over the unit-ball factors (each step maximizes
// a functional linear in one factor, so the objective never decreases); for
// N = 2 this is singular-value power iteration on the kernel matrix.
// Multistart over deterministic seeds; the best run is reported.
HilbertConstant hilbert_type_constant(int N, int n, double r,
                                      std::span<const double> a,
                                      int lattice_radius);

// ---------------------------------------------------------------------------
// Lacunary-phase series with coefficients |l|^{-b} e^{2 pi i |l|^a}.

struct WaingerParams {
  double a = 0.5;        // phase exponent, in (0, 1)
  double p = 2.0;        // target Lebesgue exponent, 1 <= p <= inf
  double epsilon = 0.1;  // positive margin on the coefficient decay
  int radius = 64;       // initial lattice truncation of the partial sum

  // n/2 + (1-a)(n/2 - n/p) + epsilon
  double b(int n) const;
};

struct WaingerField {
  LatticeField field;      // space samples of the radius-R partial sum
  double b = 0.0;
  int radius_used = 0;     // R after escalation
  double norm_at_radius = 0.0;    // L^p norm of the partial sum at R
  double norm_at_2radius = 0.0;   // and at 2R (the convergence certificate)
};

// Partial sum sum_{0 < |l| <= R} |l|^{-b} e^{2 pi i |l|^a} e^{i l.x} on a
// 2*pi-periodic grid (the series lives on [-pi, pi]^n). Starting from
// w.radius, R doubles until the L^p norms at R and 2R agree within 1%; if 2R
// no longer fits the grid first, the call fails with a diagnostic suggesting
// a larger epsilon or a.
WaingerField wainger_synthesize(const WaingerParams& w, const GridSpec& grid);

// ---------------------------------------------------------------------------
// Growth-rate experiments.

struct ScalePoint {
  double scale = 0.0;  // A or k
  double value = 0.0;  // measured norm or norm ratio at that scale
};

struct SharpnessReport {
  std::string family;
  std::vector<ScalePoint> points;       // >= 4; fit is log2(value) against scale
  double fitted_slope = 0.0;
  double theoretical_slope = 0.0;
  double residual = 0.0;                // rms log2 deviation from the fit line
  std::vector<double> khinchine_ratio;  // random-sign family: MC moment ratio per scale
  std::vector<double> input_norms;      // dyadic family: L^{p_j} norms, row-major (scale, slot)
};

// The d_k family of one scale A: dense table over the box |k|_inf <= 2^{A+1},
//   d_k = sum over k_1..k_{N-1} in the annulus 2^{A-L-1} <= |k_j| <= 2^{A-L}
//         and |k_1+..+k_N| in [2^{A-1}, 2^{A+1}], with k_N = k - sum,
//         of (1+|k_vec|)^m prod_j |k_j|^{-b_j}.
// Every enumerated k_N must land in [2^{A-2}, 2^{A+2}]; a violation throws
// with the offending tuple (the scale gap L is too small for this A).
struct DkTable {
  int n = 1;
  int A = 0;
  int box_radius = 0;
  std::vector<double> d;       // flattened over [-box_radius, box_radius]^n
  std::int64_t terms = 0;      // tuples accumulated

  std::int64_t flat(std::span<const int> k) const;  // -1 outside the box
  double l2_norm() const;
  double total() const;        // plain sum, for enumeration cross-checks
};

DkTable case1_dk_table(int n, std::span<const double> b, double m, int A,
                       int L_offset);

struct Case1Config {
  int n = 1;
  ExponentTuple exps;        // 1 < p_j < inf for every slot, 0 < p <= 2
  double m = 0.0;
  std::vector<int> A_list;   // scale indices, at least 4
  int L_offset = 2;          // scale gap of the first N-1 slots in D_A
  int trials = 0;            // Rademacher draws per scale; 0 skips the check
  std::uint64_t seed = 1;
  double epsilon = 0.0;      // additive margin in every b_j
  std::vector<double> a;     // per-slot phase exponents in [0,1]; empty = the
                             // limit values (1 where p_j >= 2, else 0)
};

// Exact enumeration of the random-sign multiplier family: measures the l2
// norm of d_k per scale and fits its log2 growth against A; the theoretical
// slope is m - sum_j b_j + n(N-1) + n/2 with b_j = n/2 + (1-a_j)(n/2-n/p_j)
// + epsilon. With trials > 0 each scale also gets a Monte-Carlo check of the
// moment equivalence: E || sum_k r_k d_k e^{ikx} ||_{L^p}^p over random signs
// against (sum_k d_k^2)^{p/2} (2 pi)^n, reported as a ratio.
SharpnessReport case1_random_sign_experiment(const Case1Config& cfg);

// Smallest scale gap whose k_N containment follows from the triangle
// inequality: the least L with (N-1) 2^{-L} <= 1/4.
int case1_min_l_offset(int N);

// Annulus profile supported on 2^{-1/4} <= |xi| <= 2^{1/4}.
double case3_psi(std::span<const double> xi);
// Shell window in sum_j |xi_j|: supported on [2^{-1/2} N, 2^{1/2} N] and
// identically 1 on [2^{-1/4} N, 2^{1/4} N].
double case3_shell(int n, int N, std::span<const double> xi_flat);
// The dyadic multiplier sum_{j>=0} 2^{jm} Shell(2^{-j} xi_vec), of order m.
SymbolSpec case3_symbol(int n, int N, double m);

struct Case3Config {
  int n = 1;
  ExponentTuple exps;       // 1 < p_j < 2 for every slot, 2 < p < inf
  double m = 0.0;
  std::vector<int> k_list;  // dyadic scale indices, at least 4
  GridSpec grid;
};

// Dyadic shell family: inputs fhat_{j,k} = 2^{kn(1/p_j-1)} psi(2^{-k} xi),
// measured value || T(f_1..f_N) ||_{L^p} / prod_j || f_{j,k} ||_{L^{p_j}} per
// scale k through the multiplier fast path; the theoretical slope is
// m + sum_j n/p_j - n/p. Scales the grid cannot hold without aliasing are
// refused up front.
SharpnessReport case3_dyadic_experiment(const Case3Config& cfg);

// ---------------------------------------------------------------------------
// Phase scan over exponent tuples and order offsets.

struct ScanBudget {
  std::vector<int> A_list = {6, 7, 8, 9, 10};
  int L_offset = 2;
  std::vector<int> k_list = {2, 3, 4, 5};
  GridSpec grid = GridSpec::make(1, 4096, 4);
  double slope_tolerance = 0.05;
  std::uint64_t seed = 1;
};

struct ThresholdCell {
  std::string tuple;        // "p=..;p1=..;p2=.."
  double offset = 0.0;
  std::string family;       // "random-sign", "dyadic", or "none"
  double fitted_slope = 0.0;
  double theory_slope = 0.0;
  bool pass = false;        // |fitted - theory| < tolerance
  std::string note;         // "ok", "not applicable", or the recorded failure
};

struct ThresholdScan {
  std::vector<ThresholdCell> cells;
  std::string csv() const;  // fixed schema, header line first
};

// For every tuple and every m = critical_exponent + offset, runs whichever
// growth family covers the tuple (random-sign for p <= 2, dyadic for
// 1 < p_j < 2 < p < inf) and records the fitted against the theoretical
// slope. Per-cell failures are recorded in the table; the scan continues.
ThresholdScan threshold_scan(int n, std::span<const ExponentTuple> p_grid,
                             std::span<const double> m_offsets,
                             const ScanBudget& budget);

}  // namespace pdlab
