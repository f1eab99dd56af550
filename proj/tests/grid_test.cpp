#include "pdlab/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

using namespace pdlab;

namespace {

double max_abs_diff(const LatticeField& a, const LatticeField& b) {
  double m = 0.0;
  for (std::int64_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double l2_grid(const LatticeField& f) {
  double cell = f.domain() == Domain::space
                    ? std::pow(f.grid().spacing(), f.grid().n)
                    : std::pow(f.grid().freq_spacing(), f.grid().n);
  double s = 0.0;
  for (const auto& v : f.values()) s += std::norm(v);
  return std::sqrt(s * cell);
}

}  // namespace

TEST_CASE("grid spec validation") {
  CHECK_THROWS_AS((GridSpec{1, 100, 2 * M_PI}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((GridSpec{1, 2, 2 * M_PI}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((GridSpec{0, 64, 2 * M_PI}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((GridSpec{1, 64, 7.0}.validate()), std::invalid_argument);  // not 2*pi*R
  CHECK_NOTHROW(GridSpec::make(2, 64, 4).validate());
  GridSpec g = GridSpec::make(1, 256, 4);
  CHECK(g.period == doctest::Approx(8 * M_PI));
  CHECK(g.freq_spacing() == doctest::Approx(0.25));
  CHECK(g.nyquist() == doctest::Approx(32.0));
  CHECK(g.signed_index(255) == -1);
  CHECK(g.coord(128) == doctest::Approx(-4 * M_PI));
}

TEST_CASE("transform of a pure wave is a scaled delta") {
  GridSpec g = GridSpec::make(1, 128, 2);
  // e^{i k x} with k = 3 on the frequency lattice (spacing 1/2)
  double k = 3.0;
  auto f = LatticeField::sample(g, Domain::space, [&](std::span<const double> x) {
    return std::polar(1.0, k * x[0]);
  });
  LatticeField fh = forward_transform(f);
  std::vector<int> idx{g.storage_index(static_cast<int>(k / g.freq_spacing()))};
  for (std::int64_t i = 0; i < fh.size(); ++i) {
    cplx expect = (i == fh.flatten(idx)) ? cplx(g.period, 0.0) : cplx(0.0, 0.0);
    CHECK(std::abs(fh[i] - expect) < 1e-9 * g.period);
  }
}

TEST_CASE("transforms invert each other and preserve the L2 pairing") {
  GridSpec g = GridSpec::make(2, 32, 2);
  LatticeField f = random_band_limited(g, 4.0, 99);
  LatticeField back = inverse_transform(forward_transform(f));
  CHECK(max_abs_diff(f, back) < 1e-13);

  // Plancherel with this normalization: ||f||_2 = (2 pi)^{-n/2} ||fhat||_2
  LatticeField fh = forward_transform(f);
  CHECK(l2_grid(f) ==
        doctest::Approx(l2_grid(fh) / std::pow(2 * M_PI, g.n / 2.0)).epsilon(1e-12));
}

TEST_CASE("gaussian transforms to the closed form") {
  GridSpec g = GridSpec::make(1, 256, 4);
  auto f = LatticeField::sample(g, Domain::space, [](std::span<const double> x) {
    return cplx(std::exp(-0.5 * x[0] * x[0]), 0.0);
  });
  LatticeField fh = forward_transform(f);
  double worst = 0.0;
  for (std::int64_t i = 0; i < fh.size(); ++i) {
    double xi = g.freq(static_cast<int>(i));
    double expect = std::sqrt(2 * M_PI) * std::exp(-0.5 * xi * xi);
    worst = std::max(worst, std::abs(fh[i] - cplx(expect, 0)));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("modulate_translate: rotation plus phase, duality with transform") {
  GridSpec g = GridSpec::make(1, 64, 2);
  LatticeField f = random_band_limited(g, 3.0, 7);

  // translate by 5 grid steps, modulate by 2 frequency steps
  std::vector<double> shift{5 * g.spacing()}, mod{2 * g.freq_spacing()};
  LatticeField moved = modulate_translate(f, shift, mod);

  // pointwise oracle
  for (int s = 0; s < g.points_per_axis; ++s) {
    int src = (s - 5 + g.points_per_axis) % g.points_per_axis;
    cplx expect = std::polar(1.0, mod[0] * g.coord(s)) * f[src];
    CHECK(std::abs(moved[s] - expect) < 1e-12);
  }

  // transform(translate f) == modulate(transform f) with the dual phase
  std::vector<double> zero{0.0};
  LatticeField lhs = forward_transform(modulate_translate(f, shift, zero));
  std::vector<double> dual_mod{-shift[0]};
  LatticeField rhs = modulate_translate(forward_transform(f), zero, dual_mod);
  CHECK(max_abs_diff(lhs, rhs) < 1e-11);

  std::vector<double> bad_shift{0.3 * g.spacing()}, bad_mod{0.4 * g.freq_spacing()};
  CHECK_THROWS_WITH_AS(modulate_translate(f, bad_shift, zero),
                       doctest::Contains("not grid-aligned"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(modulate_translate(f, zero, bad_mod),
                       doctest::Contains("dual lattice"), std::invalid_argument);
}

TEST_CASE("field serialization round-trips bit-exactly") {
  GridSpec g = GridSpec::make(1, 16, 1);
  LatticeField f = random_band_limited(g, 2.0, 1234);
  auto path = std::filesystem::temp_directory_path() / "pdlab_field_test.txt";
  save_field(f, path.string());
  LatticeField back = load_field(path.string());
  REQUIRE(back.grid() == f.grid());
  CHECK(back.domain() == f.domain());
  for (std::int64_t i = 0; i < f.size(); ++i) {
    CHECK(back[i].real() == f[i].real());
    CHECK(back[i].imag() == f[i].imag());
  }
  std::filesystem::remove(path);

  CHECK_THROWS_AS(load_field("/nonexistent/prefix/field.txt"), std::runtime_error);
}

TEST_CASE("random_band_limited honors the band and the seed") {
  GridSpec g = GridSpec::make(1, 64, 2);
  LatticeField a = random_band_limited(g, 4.0, 42, Domain::frequency);
  LatticeField b = random_band_limited(g, 4.0, 42, Domain::frequency);
  LatticeField c = random_band_limited(g, 4.0, 43, Domain::frequency);
  CHECK(max_abs_diff(a, b) == 0.0);
  CHECK(max_abs_diff(a, c) > 0.0);
  for (std::int64_t i = 0; i < a.size(); ++i) {
    if (std::abs(g.freq(static_cast<int>(i))) > 4.0) CHECK(a[i] == cplx(0, 0));
  }
}
