#include "pdlab/grid.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pdlab/fft.hpp"
#include "pdlab/random.hpp"

namespace pdlab {

GridSpec GridSpec::make(int n, int points_per_axis, int radius_factor) {
  if (radius_factor < 1)
    throw std::invalid_argument("grid radius factor must be a positive integer");
  GridSpec g{n, points_per_axis, 2.0 * M_PI * radius_factor};
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (n < 1 || n > 3) throw std::invalid_argument("grid dimension must be 1..3");
  if (points_per_axis < 4 || (points_per_axis & (points_per_axis - 1)) != 0)
    throw std::invalid_argument("points_per_axis must be a power of two >= 4");
  if (!(period > 0.0)) throw std::invalid_argument("grid period must be positive");
  double r = period / (2.0 * M_PI);
  if (std::abs(r - std::round(r)) > 1e-9 * r || std::round(r) < 1.0)
    throw std::invalid_argument("grid period must be 2*pi*R for integer R >= 1");
}

std::int64_t GridSpec::size() const {
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) total *= points_per_axis;
  return total;
}

const char* domain_name(Domain d) {
  return d == Domain::space ? "space" : "frequency";
}

LatticeField::LatticeField(GridSpec grid, Domain domain)
    : grid_(grid), domain_(domain), values_(grid.size()) {
  grid_.validate();
}

LatticeField::LatticeField(GridSpec grid, Domain domain, std::vector<cplx> values)
    : grid_(grid), domain_(domain), values_(std::move(values)) {
  grid_.validate();
  if (static_cast<std::int64_t>(values_.size()) != grid_.size())
    throw std::invalid_argument("value count does not match grid size");
}

LatticeField LatticeField::sample(
    const GridSpec& grid, Domain domain,
    const std::function<cplx(std::span<const double>)>& fn) {
  LatticeField out(grid, domain);
  std::vector<int> idx(grid.n, 0);
  std::vector<double> pt(grid.n);
  for (std::int64_t flat = 0; flat < out.size(); ++flat) {
    for (int a = 0; a < grid.n; ++a)
      pt[a] = domain == Domain::space ? grid.coord(idx[a]) : grid.freq(idx[a]);
    out[flat] = fn(pt);
    for (int a = grid.n - 1; a >= 0; --a) {
      if (++idx[a] < grid.points_per_axis) break;
      idx[a] = 0;
    }
  }
  return out;
}

std::int64_t LatticeField::flatten(std::span<const int> idx) const {
  std::int64_t flat = 0;
  for (int a = 0; a < grid_.n; ++a) {
    int i = idx[a];
    if (i < 0 || i >= grid_.points_per_axis)
      throw std::out_of_range("lattice index out of range");
    flat = flat * grid_.points_per_axis + i;
  }
  return flat;
}

void LatticeField::unflatten(std::int64_t flat, std::span<int> idx) const {
  for (int a = grid_.n - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % grid_.points_per_axis);
    flat /= grid_.points_per_axis;
  }
}

void LatticeField::axis_values(std::int64_t flat, std::span<double> out) const {
  for (int a = grid_.n - 1; a >= 0; --a) {
    int s = static_cast<int>(flat % grid_.points_per_axis);
    flat /= grid_.points_per_axis;
    out[a] = domain_ == Domain::space ? grid_.coord(s) : grid_.freq(s);
  }
}

namespace {

std::vector<int> fft_dims(const GridSpec& g) {
  return std::vector<int>(g.n, g.points_per_axis);
}

}  // namespace

LatticeField forward_transform(const LatticeField& f) {
  if (f.domain() != Domain::space)
    throw std::invalid_argument("forward_transform expects a space-domain field");
  std::vector<cplx> data(f.values().begin(), f.values().end());
  fft::dft(data.data(), fft_dims(f.grid()), /*inverse=*/false);
  double w = std::pow(f.grid().spacing(), f.grid().n);
  for (auto& v : data) v *= w;
  return LatticeField(f.grid(), Domain::frequency, std::move(data));
}

LatticeField inverse_transform(const LatticeField& f) {
  if (f.domain() != Domain::frequency)
    throw std::invalid_argument("inverse_transform expects a frequency-domain field");
  std::vector<cplx> data(f.values().begin(), f.values().end());
  fft::dft(data.data(), fft_dims(f.grid()), /*inverse=*/true);
  double w = std::pow(f.grid().period, -f.grid().n);
  for (auto& v : data) v *= w;
  return LatticeField(f.grid(), Domain::space, std::move(data));
}

LatticeField modulate_translate(const LatticeField& f,
                                std::span<const double> translate,
                                std::span<const double> modulate) {
  const GridSpec& g = f.grid();
  if (static_cast<int>(translate.size()) != g.n ||
      static_cast<int>(modulate.size()) != g.n)
    throw std::invalid_argument("modulate_translate: argument dimension mismatch");

  double step = f.domain() == Domain::space ? g.spacing() : g.freq_spacing();
  double dual = 2.0 * M_PI / (step * g.points_per_axis);
  std::vector<int> steps(g.n);
  for (int a = 0; a < g.n; ++a) {
    double s = translate[a] / step;
    if (std::abs(s - std::round(s)) > 1e-9)
      throw std::invalid_argument(
          "modulate_translate: translation is not grid-aligned");
    steps[a] = static_cast<int>(std::llround(s)) % g.points_per_axis;
    if (steps[a] < 0) steps[a] += g.points_per_axis;
    double q = modulate[a] / dual;
    if (std::abs(q - std::round(q)) > 1e-9)
      throw std::invalid_argument(
          "modulate_translate: modulation is not on the dual lattice");
  }

  LatticeField out(g, f.domain());
  std::vector<int> idx(g.n), src(g.n);
  std::vector<double> pt(g.n);
  for (std::int64_t flat = 0; flat < out.size(); ++flat) {
    out.unflatten(flat, idx);
    for (int a = 0; a < g.n; ++a) {
      src[a] = idx[a] - steps[a];
      if (src[a] < 0) src[a] += g.points_per_axis;
      pt[a] = step * g.signed_index(idx[a]);
    }
    double phase = 0.0;
    for (int a = 0; a < g.n; ++a) phase += modulate[a] * pt[a];
    out[flat] = std::polar(1.0, phase) * f[f.flatten(src)];
  }
  return out;
}

void save_field(const LatticeField& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  char buf[128];
  std::snprintf(buf, sizeof buf, "n=%d points_per_axis=%d period=%.17g domain=%s\n",
                f.grid().n, f.grid().points_per_axis, f.grid().period,
                domain_name(f.domain()));
  os << buf;
  for (const cplx& v : f.values()) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", v.real(), v.imag());
    os << buf;
  }
  if (!os) throw std::runtime_error("write failed for " + path);
}

LatticeField load_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error(path + ": missing header");

  GridSpec g;
  char domain_tag[16] = {0};
  if (std::sscanf(header.c_str(), "n=%d points_per_axis=%d period=%lg domain=%15s",
                  &g.n, &g.points_per_axis, &g.period, domain_tag) != 4)
    throw std::runtime_error(path + ": malformed header '" + header + "'");
  Domain dom;
  if (std::strcmp(domain_tag, "space") == 0)
    dom = Domain::space;
  else if (std::strcmp(domain_tag, "frequency") == 0)
    dom = Domain::frequency;
  else
    throw std::runtime_error(path + ": unknown domain tag '" + domain_tag + "'");
  g.validate();

  std::vector<cplx> values;
  values.reserve(g.size());
  std::string line;
  std::int64_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    double re, im;
    if (std::sscanf(line.c_str(), "%lg,%lg", &re, &im) != 2)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed value line");
    values.emplace_back(re, im);
  }
  if (static_cast<std::int64_t>(values.size()) != g.size())
    throw std::runtime_error(path + ": expected " + std::to_string(g.size()) +
                             " values, got " + std::to_string(values.size()));
  return LatticeField(g, dom, std::move(values));
}

LatticeField random_band_limited(const GridSpec& grid, double band_radius,
                                 std::uint64_t seed, Domain domain) {
  grid.validate();
  LatticeField spec(grid, Domain::frequency);
  std::vector<int> idx(grid.n);
  for (std::int64_t flat = 0; flat < spec.size(); ++flat) {
    spec.unflatten(flat, idx);
    bool inside = true;
    for (int a = 0; a < grid.n && inside; ++a)
      inside = std::abs(grid.freq(idx[a])) <= band_radius;
    if (!inside) continue;
    double g0, g1;
    normal_pair(mix(seed, static_cast<std::uint64_t>(flat)), g0, g1);
    spec[flat] = cplx(g0, g1) * M_SQRT1_2;
  }
  return domain == Domain::frequency ? spec : inverse_transform(spec);
}

}  // namespace pdlab
