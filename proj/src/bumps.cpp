#include "pdlab/bumps.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace pdlab {

double bump(double t) {
  double s = 1.0 - t * t;
  if (s <= 0.0) return 0.0;
  return std::exp(1.0 - 1.0 / s);
}

namespace {
double decay(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }
}  // namespace

double smooth_step(double u) {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  double a = decay(1.0 - u), b = decay(u);
  return a / (a + b);
}

double plateau_window(double u, double support_lo, double plateau_lo,
                      double plateau_hi, double support_hi) {
  if (!(support_lo < plateau_lo && plateau_lo <= plateau_hi &&
        plateau_hi < support_hi))
    throw std::invalid_argument("plateau_window: edges out of order");
  if (u <= support_lo || u >= support_hi) return 0.0;
  if (u < plateau_lo) return smooth_ramp_up(u, support_lo, plateau_lo);
  if (u > plateau_hi) return 1.0 - smooth_ramp_up(u, plateau_hi, support_hi);
  return 1.0;
}

namespace {

constexpr int kCdfCells = 1 << 14;  // Simpson cells over [-1, 1]

double bump_deriv(double t) {
  double b = bump(t);
  if (b == 0.0) return 0.0;
  double s = 1.0 - t * t;
  return b * (-2.0 * t) / (s * s);
}

struct CdfTable {
  std::vector<double> value;  // kCdfCells + 1 knots
  std::vector<double> slope;  // normalized bump at the knots
  std::vector<double> curve;  // normalized bump' at the knots
  double step;

  CdfTable() {
    value.resize(kCdfCells + 1);
    slope.resize(kCdfCells + 1);
    curve.resize(kCdfCells + 1);
    step = 2.0 / kCdfCells;
    std::vector<double> mid(kCdfCells);
    value[0] = 0.0;
    for (int i = 0; i < kCdfCells; ++i) {
      double a = -1.0 + i * step, b = a + step;
      mid[i] = bump(0.5 * (a + b));
      value[i + 1] = value[i] + step / 6.0 * (bump(a) + 4.0 * mid[i] + bump(b));
    }
    double total = value[kCdfCells];
    for (int i = 0; i <= kCdfCells; ++i) {
      value[i] /= total;
      slope[i] = bump(-1.0 + i * step) / total;
      curve[i] = bump_deriv(-1.0 + i * step) / total;
    }
    value[kCdfCells] = 1.0;  // pin the endpoints against rounding
    value[0] = 0.0;
  }
};

const CdfTable& cdf_table() {
  static CdfTable table;
  return table;
}

}  // namespace

double bump_cdf(double t) {
  if (t <= -1.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const CdfTable& tab = cdf_table();
  double u = (t + 1.0) / tab.step;
  int cell = static_cast<int>(u);
  if (cell >= kCdfCells) cell = kCdfCells - 1;
  double w = u - cell;
  // Quintic Hermite on [cell, cell+1] with exact first and second
  // derivatives at the knots, so the interpolant is C^2 across cells and its
  // spectral noise floor sits far below the quadrature tolerances downstream.
  double w2 = w * w, w3 = w2 * w, w4 = w3 * w, w5 = w4 * w;
  double H0 = 1 - 10 * w3 + 15 * w4 - 6 * w5;
  double H1 = w - 6 * w3 + 8 * w4 - 3 * w5;
  double H2 = 0.5 * w2 - 1.5 * w3 + 1.5 * w4 - 0.5 * w5;
  double H3 = 10 * w3 - 15 * w4 + 6 * w5;
  double H4 = -4 * w3 + 7 * w4 - 3 * w5;
  double H5 = 0.5 * w3 - w4 + 0.5 * w5;
  const double h = tab.step;
  return H0 * tab.value[cell] + H1 * h * tab.slope[cell] +
         H2 * h * h * tab.curve[cell] + H3 * tab.value[cell + 1] +
         H4 * h * tab.slope[cell + 1] + H5 * h * h * tab.curve[cell + 1];
}

}  // namespace pdlab
