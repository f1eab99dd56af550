#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pdlab/grid.hpp"

namespace pdlab {

// Order data for symbol classes: a scalar order m weights by
// (1 + |xi_1| + ... + |xi_N|)^m, per-slot orders by prod_j (1+|xi_j|)^{m_j}
// (slot norms Euclidean).
class SymbolOrder {
 public:
  static SymbolOrder scalar(double m) { return SymbolOrder{true, m, {}}; }
  static SymbolOrder per_slot(std::vector<double> m) {
    return SymbolOrder{false, 0.0, std::move(m)};
  }
  bool is_scalar() const { return scalar_; }
  double scalar_order() const { return m_; }
  const std::vector<double>& slot_orders() const { return slots_; }
  int arity_hint() const { return static_cast<int>(slots_.size()); }

  // weight at the flattened frequency tuple (N blocks of length n)
  double weight(int n, std::span<const double> xi_flat) const;

 private:
  SymbolOrder(bool s, double m, std::vector<double> slots)
      : scalar_(s), m_(m), slots_(std::move(slots)) {}
  bool scalar_;
  double m_;
  std::vector<double> slots_;
};

// An N-linear symbol sigma(x, xi_1..xi_N) with declared order. x-independence
// is part of the type and is spot-checked at construction.
class SymbolSpec {
 public:
  using Eval = std::function<cplx(std::span<const double> x,
                                  std::span<const double> xi_flat)>;
  using SlotFn = std::function<cplx(std::span<const double> xi)>;

  SymbolSpec(int n, int N, SymbolOrder order, Eval eval, bool x_independent,
             int max_deriv_order = 3);

  // x-independent symbol given as a function of the frequency tuple alone
  static SymbolSpec multiplier(int n, int N, SymbolOrder order,
                               std::function<cplx(std::span<const double>)> eval);
  // product of per-slot multipliers
  static SymbolSpec separable_multiplier(int n, int N, SymbolOrder order,
                                         std::vector<SlotFn> factors);

  cplx operator()(std::span<const double> x, std::span<const double> xi_flat) const;
  int dim() const { return n_; }
  int arity() const { return N_; }
  const SymbolOrder& order() const { return order_; }
  bool x_independent() const { return x_independent_; }
  int max_deriv_order() const { return max_deriv_order_; }
  bool separable() const { return !factors_.empty(); }
  const SlotFn& factor(int j) const { return factors_[j]; }

 private:
  int n_, N_;
  SymbolOrder order_;
  Eval eval_;
  bool x_independent_;
  int max_deriv_order_;
  std::vector<SlotFn> factors_;
};

// Sampled seminorm sup |d^alpha_x d^beta_xi sigma| / weight over random
// points, derivatives by central differences (h = 1e-3) with one Richardson
// step. alpha is the x multi-index (length n, ignored for x-independent
// symbols), beta the flattened frequency multi-index (length n*N). Orders
// beyond the symbol's max_deriv_order are a parameter error.
struct SeminormEstimate {
  double value = 0.0;
  double richardson_error = 0.0;  // worst relative h vs h/2 discrepancy
  int total_order = 0;
  int samples = 0;
};

SeminormEstimate seminorm_estimate(const SymbolSpec& symbol,
                                   std::span<const int> alpha,
                                   std::span<const int> beta,
                                   double xi_box_radius, int samples,
                                   std::uint64_t seed);

// Maximum of seminorm_estimate over every multi-index of total degree
// <= max_order.
SeminormEstimate seminorm_profile(const SymbolSpec& symbol, int max_order,
                                  double xi_box_radius, int samples,
                                  std::uint64_t seed);

// The partition kit:
//   phi: product bump-cdf partition, supp phi1 = [-3/4, 3/4], phi1(0) = 1,
//        sum_k phi1(t - k) = 1 exactly (telescoping differences of one table);
//   phi_tilde: 1 on [-1,1], 0 outside (-pi,pi), values in [0,1];
//   chi_ell(zeta) = phi(zeta - ell) <ell>^{2M} / <zeta>^{2M}, so that
//        sum_ell <ell>^{-2M} chi_ell(zeta) <zeta>^{2M} = 1 exactly.
class PartitionSet {
 public:
  PartitionSet(int n, int chi_order);

  int dim() const { return n_; }
  int chi_order() const { return chi_m_; }

  double phi1(double t) const;
  double phi(std::span<const double> t) const;
  double phi_tilde1(double t) const;
  double phi_tilde(std::span<const double> t) const;
  double chi(std::span<const int> ell, std::span<const double> zeta) const;

 private:
  int n_, chi_m_;
};

// Band piece with translation folded into the spectral multiplier:
//   out = F^{-1}[ phi_tilde(xi - nu) e^{i k . xi} fhat(xi) ],
// i.e. the nu-band of f translated by the (arbitrary real) vector k. Exact
// for band-limited grid data; the band confinement is asserted internally.
LatticeField frequency_piece(const LatticeField& f, const PartitionSet& parts,
                             std::span<const int> nu, std::span<const double> k);

struct DecomposeOptions {
  int k_radius = 8;        // retained |k|_inf per axis of the k-sum
  int L = 4;               // (I - Laplacian)^L decay order in k
  int min_quad_points = 32;
  int max_quad_points = 512;
  double target_defect = 1e-8;  // escalate quadrature until below this
  double defect_error = 1e-6;   // throw if still above this at max resolution
  std::optional<GridSpec> xgrid;  // required for x-dependent symbols
};

// Coefficient family of the nu/k/ell decomposition. For x-independent symbols
// each (nu, k) carries a single ell = 0 scalar (the x-spectrum of a constant
// is a delta at zero and phi(-ell) kills every other offset); x-dependent
// symbols carry per-ell fields on the declared x grid.
class DecomposedSymbol {
 public:
  int n() const { return n_; }
  int arity() const { return N_; }
  int nu_radius() const { return nu_radius_; }
  int k_radius() const { return k_radius_; }
  int L() const { return L_; }
  int chi_order() const { return chi_m_; }
  bool x_independent() const { return x_independent_; }
  const GridSpec& xgrid() const;  // throws if x-independent
  double parseval_defect() const { return defect_; }
  int quad_points() const { return quad_points_; }
  const SymbolOrder& order() const { return *order_; }

  std::int64_t nu_count() const { return nu_count_; }
  std::int64_t k_count() const { return k_count_; }
  // decode flat indices into signed lattice vectors (length n*N)
  void nu_vector(std::int64_t nu_flat, std::span<int> out) const;
  void k_vector(std::int64_t k_flat, std::span<int> out) const;
  std::int64_t nu_flat(std::span<const int> nu) const;  // -1 if outside box
  std::int64_t k_flat(std::span<const int> k) const;    // -1 if outside box

  cplx q_value(std::int64_t nu_flat, std::int64_t k_flat) const;  // x-independent
  struct XBlock {
    std::array<int, 3> ell;
    std::vector<cplx> values;  // x-grid samples
  };
  const std::vector<XBlock>& x_blocks(std::int64_t nu_flat, std::int64_t k_flat) const;

  friend DecomposedSymbol decompose(const SymbolSpec&, const PartitionSet&,
                                    int nu_radius, const DecomposeOptions&);

 private:
  DecomposedSymbol() = default;
  int n_ = 0, N_ = 0, nu_radius_ = 0, k_radius_ = 0, L_ = 0, chi_m_ = 0;
  bool x_independent_ = true;
  std::optional<GridSpec> xgrid_;
  double defect_ = 0.0;
  int quad_points_ = 0;
  std::optional<SymbolOrder> order_;
  std::int64_t nu_count_ = 0, k_count_ = 0;
  std::vector<cplx> q_const_;                     // [nu_flat * k_count + k_flat]
  std::vector<std::vector<XBlock>> q_x_;          // same indexing
};

DecomposedSymbol decompose(const SymbolSpec& symbol, const PartitionSet& parts,
                           int nu_radius, const DecomposeOptions& opts = {});

// Cross-check of one coefficient through integration by parts: applies
// (I - Laplacian_eta)^L to sigma_nu by finite differences and quadratures
// against the stored <k>^{2L}-scaled coefficient. x-independent symbols only.
cplx q_coefficient_by_parts(const SymbolSpec& symbol, const PartitionSet& parts,
                            std::span<const int> nu, std::span<const int> k,
                            int L, int quad_points);

// Uniform coefficient bound sup_x |Q_{nu,k,ell}| <= C * weight(nu) across all
// retained blocks; returns the measured C and where it is attained. The
// one-argument form uses the order the symbol was declared with.
struct CoefficientBound {
  double constant = 0.0;
  std::int64_t argmax_nu = -1, argmax_k = -1;
  std::array<int, 3> argmax_ell{0, 0, 0};
};
CoefficientBound coefficient_bound_check(const DecomposedSymbol& d);
CoefficientBound coefficient_bound_check(const DecomposedSymbol& d,
                                         const SymbolOrder& order);

// sup-norm diagnostic for the chi family: ||F^{-1} chi_ell||_{L^1} computed
// on the given grid for every |ell|_inf <= ell_max; returns the largest
// value. chi_ell(. + ell) is sampled near zero so the translation costs only
// a modulation, which the L^1 norm ignores.
double chi_kernel_l1_constant(const PartitionSet& parts, int ell_max,
                              const GridSpec& grid);

}  // namespace pdlab
