#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace pdlab {

using cplx = std::complex<double>;

// Uniform periodic grid on a cube of side `period` with a power-of-two point
// count per axis. Periods are 2*pi*R for integer R >= 1 so that the integer
// frequency lattice is representable exactly (frequency spacing 1/R).
struct GridSpec {
  int n = 1;
  int points_per_axis = 0;
  double period = 0.0;

  // Convenience constructor with period = 2*pi*radius_factor.
  static GridSpec make(int n, int points_per_axis, int radius_factor);

  void validate() const;  // throws std::invalid_argument on any violation

  std::int64_t size() const;
  double spacing() const { return period / points_per_axis; }
  double freq_spacing() const { return 2.0 * M_PI / period; }
  double nyquist() const { return freq_spacing() * (points_per_axis / 2); }

  // Storage index s in [0, M) represents the signed index s (s < M/2) or
  // s - M (s >= M/2); both the space and the frequency lattice use it.
  int signed_index(int s) const {
    return s < points_per_axis / 2 ? s : s - points_per_axis;
  }
  int storage_index(int signed_idx) const {
    return signed_idx >= 0 ? signed_idx : signed_idx + points_per_axis;
  }
  double coord(int s) const { return spacing() * signed_index(s); }
  double freq(int s) const { return freq_spacing() * signed_index(s); }

  bool operator==(const GridSpec&) const = default;
};

enum class Domain { space, frequency };

const char* domain_name(Domain d);

// Complex samples over a GridSpec, row-major with axis 0 slowest, tagged with
// the domain they live in. Space samples sit at the signed coordinates
// spacing*s~ and frequency samples at freq_spacing*m~ (s~, m~ signed indices).
class LatticeField {
 public:
  LatticeField(GridSpec grid, Domain domain);
  LatticeField(GridSpec grid, Domain domain, std::vector<cplx> values);

  static LatticeField sample(
      const GridSpec& grid, Domain domain,
      const std::function<cplx(std::span<const double>)>& fn);

  const GridSpec& grid() const { return grid_; }
  Domain domain() const { return domain_; }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }
  cplx& operator[](std::int64_t i) { return values_[i]; }
  const cplx& operator[](std::int64_t i) const { return values_[i]; }
  std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }

  std::int64_t flatten(std::span<const int> idx) const;
  void unflatten(std::int64_t flat, std::span<int> idx) const;
  // Physical axis values (coordinates or frequencies per the domain tag).
  void axis_values(std::int64_t flat, std::span<double> out) const;

 private:
  GridSpec grid_;
  Domain domain_;
  std::vector<cplx> values_;
};

// Continuum-normalized transforms:
//   forward:  fhat(xi_m) = spacing^n * sum_s f(x_s) exp(-i xi_m . x_s)
//   inverse:  f(x_s) = period^-n * sum_m fhat(xi_m) exp(+i xi_m . x_s)
// They are exact inverses of each other, and for band-limited data they agree
// with the continuum integrals on the cell.
LatticeField forward_transform(const LatticeField& f);   // space -> frequency
LatticeField inverse_transform(const LatticeField& f);   // frequency -> space

// g = exp(i modulate . y) * f(y - translate). `translate` must be a lattice
// vector (integer multiple of the field's own spacing; array rotation), and
// `modulate` a dual-lattice vector so the phase is periodic; violations throw
// std::invalid_argument. Works in either domain with the roles read on that
// domain's lattice.
LatticeField modulate_translate(const LatticeField& f,
                                std::span<const double> translate,
                                std::span<const double> modulate);

// Text serialization: one header line "n=.. points_per_axis=.. period=..
// domain=..", then one "re,im" line per value in storage order, %.17g so
// round-trips are bit-exact.
void save_field(const LatticeField& f, const std::string& path);
LatticeField load_field(const std::string& path);

// Frequency-domain complex Gaussian coefficients on |xi|_inf <= band_radius,
// zero outside, returned in the requested domain. Deterministic in (seed).
LatticeField random_band_limited(const GridSpec& grid, double band_radius,
                                 std::uint64_t seed, Domain domain = Domain::space);

}  // namespace pdlab
