#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "pdlab/grid.hpp"
#include "pdlab/norms.hpp"
#include "pdlab/symbols.hpp"

namespace pdlab {

enum class ApplyMethod { direct_quadrature, multiplier_fft, decomposition_sum };

const char* apply_method_name(ApplyMethod m);

// Tail and coverage diagnostics attached to an operator application. Exact
// methods leave the tail fields at zero.
struct TruncationReport {
  double k_tail_weight = 0.0;      // upper bound on sum_{|k|>K} <k>^{-2L}
  double ell_tail_weight = 0.0;    // dropped band mass bound (x-dependent)
  double input_coverage_gap = 0.0; // worst relative input mass off the nu box
  double wrapped_mass = 0.0;       // relative mass folded past Nyquist
  std::int64_t terms = 0;          // terms actually summed
};

struct OperatorResult {
  LatticeField output;
  ApplyMethod method;
  TruncationReport truncation;
};

// Literal trapezoidal discretization of
//   T(f_1..f_N)(x) = (2 pi)^{-Nn} int e^{i x.(xi_1+..+xi_N)}
//                    sigma(x, xi_vec) prod fhat_j(xi_j) d xi_vec
// on the dual lattice, FFT-free (naive transforms and root-of-unity phase
// tables), intended as the reference the fast paths are tested against.
// Work is capped at desk scale: n = 1 needs N <= 3 and <= 256 points per
// axis, n = 2 needs N = 2 and <= 64 per axis, and x-dependent symbols
// additionally pay a factor of the space grid in evaluations; outside the
// cap the call refuses with the required budget in the message.
OperatorResult apply_direct(const SymbolSpec& symbol,
                            std::span<const LatticeField> f);

struct MultiplierOptions {
  // Inputs must carry no spectral mass outside the middle third of the
  // frequency range (per axis), so the pushforward sum_j xi_j cannot fold
  // past Nyquist. Setting allow_aliasing turns the refusal into a report.
  bool allow_aliasing = false;
  double confinement_tolerance = 1e-12;  // relative l2 mass allowed outside
};

// Same output as apply_direct for x-independent symbols: N forward
// transforms, a gridded multiplier times the N-fold spectral tensor,
// accumulation of the diagonal pushforward H(t) = P^{-(N-1)n} *
// sum_{m_1+..+m_N = t} sigma prod fhat_j, one inverse transform. Separable
// symbols skip the N-fold loop: per-slot multipliers and a pointwise
// product. Zero spectral coefficients are skipped, so band-limited inputs
// cost only their occupied boxes.
OperatorResult apply_multiplier_fft(const SymbolSpec& symbol,
                                    std::span<const LatticeField> f,
                                    const MultiplierOptions& opts = {});

// Evaluates the decomposition representation
//   T(f_vec) = sum_k <k>^{-2L} sum_ell <ell>^{-2M} sum_nu Q_{nu,k,ell}(x)
//              prod_j F^j_{nu_j,k_j}(x)
// over the retained boxes, with F^j built by frequency_piece and cached per
// (slot, nu_j, k_j). Summation follows fixed flat-index order, so reruns are
// bit-identical. x-dependent coefficients require the fields to live on the
// decomposition's x grid.
OperatorResult apply_via_decomposition(const DecomposedSymbol& d,
                                       const PartitionSet& parts,
                                       std::span<const LatticeField> f);

// Upper bound on sum over k in Z^d with |k|_inf > radius of <k>^{-2L},
// via the coordinate-factorized majorant <k>^{-2L} <= prod (1+k_a^2)^{-L/d}.
// Requires 2L > d (the tail diverges otherwise).
double k_tail_weight_bound(int d, int L, int radius);

// The per-mu pieces h_mu = sum_{nu_1+..+nu_N = mu} Q_{nu,k,ell} prod F^j at
// one fixed (k, ell). Their spectra concentrate near mu + ell; the family
// records the worst relative energy outside the predicted cell
// |zeta - mu - ell|_inf <= N pi + 3/4 and the measured support radius.
struct HmuFamily {
  std::vector<std::array<int, 3>> mu;  // first n entries used
  std::vector<LatticeField> fields;    // space domain, aligned with mu
  double worst_outside_energy = 0.0;   // relative l2, over the family
  double support_radius = 0.0;         // measured max |zeta - mu - ell|_inf
};

HmuFamily assemble_hmu(const DecomposedSymbol& d, const PartitionSet& parts,
                       std::span<const LatticeField> f,
                       std::span<const int> k, std::span<const int> ell);

// Both sides of the master estimate
//   || T(f_vec) ||_{W^{s,t}}  <~  sup_{k,ell} || || h_mu ||_{l^t_mu} ||_{L^s}
// evaluated numerically: left via the amalgam norm of the decomposition
// output, right by sweeping every retained (k, ell) and taking the sup.
struct MasterEstimate {
  double left = 0.0;
  double right = 0.0;
  std::int64_t argmax_k = 0;
  std::array<int, 3> argmax_ell = {0, 0, 0};
};

MasterEstimate master_estimate_probe(const DecomposedSymbol& d,
                                     const PartitionSet& parts,
                                     std::span<const LatticeField> f, double s,
                                     double t, const WindowKappa& kappa);

// Pointwise Nikol'skij ratio for a band-limited h:
//   max_x |kappa(D-a)h(x)| / || (F^{-1}kappa)(y) h(x-y) ||_{L^r_y},
// with the window centered at a (a on the dual lattice keeps the discrete
// modulation identity exact). r <= 1; at r = 1 the ratio cannot exceed 1.
double nikolskij_ratio(const LatticeField& h, const WindowKappa& kappa,
                       std::span<const double> a, double r);

}  // namespace pdlab
