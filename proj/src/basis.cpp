#include "besov/basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace besov {

std::string to_string(BasisFamily f) {
  switch (f) {
    case BasisFamily::HaarPeriodic: return "haar";
    case BasisFamily::Fourier: return "fourier";
  }
  return "?";
}

BasisFamily basis_family_from_string(const std::string& s) {
  if (s == "haar" || s == "HaarPeriodic") return BasisFamily::HaarPeriodic;
  if (s == "fourier" || s == "Fourier") return BasisFamily::Fourier;
  throw std::invalid_argument("unknown basis family: " + s);
}

double BasisSpec::regularity() const {
  if (family == BasisFamily::HaarPeriodic) return 1.0 - 1e-9;
  return std::numeric_limits<double>::infinity();
}

void BasisSpec::validate() const {
  if (dim < 1 || dim > 3) throw std::invalid_argument("basis dim must be in {1,2,3}");
  if (family == BasisFamily::Fourier && dim != 1)
    throw std::invalid_argument("Fourier basis is only shipped for d=1");
}

std::int64_t pow_int(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

namespace {
bool is_pow2(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

GridFunction::GridFunction(int d, int n) : dim(d), n_per_axis(n) {
  values.assign(pow_int(n, d), 0.0);
  validate();
}

double GridFunction::mean() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

void GridFunction::validate() const {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dim must be in {1,2,3}");
  if (!is_pow2(n_per_axis)) throw std::invalid_argument("n_per_axis must be a power of two");
  if (static_cast<std::int64_t>(values.size()) != pow_int(n_per_axis, dim))
    throw std::invalid_argument("grid value count does not match n_per_axis^dim");
}

std::int64_t GridFunction::flat(std::array<std::int64_t, 3> cell) const {
  const std::int64_t n = n_per_axis;
  std::int64_t idx = 0;
  for (int a = dim - 1; a >= 0; --a) {
    std::int64_t c = ((cell[a] % n) + n) % n;
    idx = idx * n + c;
  }
  return idx;
}

WaveletIndex index_to_level(std::int64_t l, int d) {
  if (l < 1) throw std::invalid_argument("basis index l must be >= 1");
  if (d < 1 || d > 3) throw std::invalid_argument("dim must be in {1,2,3}");
  WaveletIndex w;
  if (l == 1) {
    w.scaling = true;
    return w;
  }
  // level j holds l in (2^{jd}, 2^{(j+1)d}]
  int j = 0;
  while (l > pow_int(2, (j + 1) * d)) ++j;
  const std::int64_t block = pow_int(2, j * d);  // shifts per type
  std::int64_t off = l - block - 1;              // 0-based within the level
  w.level = j;
  w.type = static_cast<int>(off / block) + 1;
  std::int64_t rem = off % block;
  // k lexicographic: k_1 most significant
  const std::int64_t side = pow_int(2, j);
  for (int a = d - 1; a >= 0; --a) {
    w.shift[a] = rem % side;
    rem /= side;
  }
  return w;
}

std::int64_t level_to_index(const WaveletIndex& w, int d) {
  if (d < 1 || d > 3) throw std::invalid_argument("dim must be in {1,2,3}");
  if (w.scaling) return 1;
  if (w.level < 0) throw std::invalid_argument("wavelet level must be >= 0");
  if (w.type < 1 || w.type > pow_int(2, d) - 1)
    throw std::invalid_argument("wavelet type m out of range");
  const std::int64_t side = pow_int(2, w.level);
  std::int64_t rem = 0;
  for (int a = 0; a < d; ++a) {
    if (w.shift[a] < 0 || w.shift[a] >= side)
      throw std::invalid_argument("wavelet shift k out of range for level");
    rem = rem * side + w.shift[a];
  }
  const std::int64_t block = pow_int(2, w.level * d);
  return block + static_cast<std::int64_t>(w.type - 1) * block + rem + 1;
}

namespace {

// Accumulate c * psi_l onto the grid (Haar). The wavelet at level j is
// constant on half-cells of size 2^{-(j+1)} along axes where the type bit
// is set, so cell averages at any matching resolution are exact values.
void add_haar(GridFunction& g, std::int64_t l, double c) {
  const int d = g.dim;
  const std::int64_t n = g.n_per_axis;
  if (l == 1) {  // phi == 1 on T^d
    for (double& v : g.values) v += c;
    return;
  }
  const WaveletIndex w = index_to_level(l, d);
  const std::int64_t side = pow_int(2, w.level);
  const std::int64_t span = n / side;  // cells per wavelet support per axis
  if (span < 2) throw std::invalid_argument("grid too coarse to resolve wavelet level");
  const double amp = c * std::pow(2.0, 0.5 * w.level * d);
  std::array<std::int64_t, 3> cell{0, 0, 0};
  std::array<std::int64_t, 3> off{0, 0, 0};
  const std::int64_t ncells = pow_int(span, d);
  for (std::int64_t t = 0; t < ncells; ++t) {
    std::int64_t tt = t;
    double sign = 1.0;
    for (int a = 0; a < d; ++a) {
      off[a] = tt % span;
      tt /= span;
      cell[a] = w.shift[a] * span + off[a];
      if ((w.type >> a) & 1) {
        // +1 on the left half of the support
        if (off[a] >= span / 2) sign = -sign;
      }
    }
    g.values[g.flat(cell)] += amp * sign;
  }
}

double haar_inner(const GridFunction& f, std::int64_t l) {
  const int d = f.dim;
  const std::int64_t n = f.n_per_axis;
  const double h_d = 1.0 / static_cast<double>(pow_int(n, d));
  if (l == 1) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return s * h_d;
  }
  const WaveletIndex w = index_to_level(l, d);
  const std::int64_t side = pow_int(2, w.level);
  const std::int64_t span = n / side;
  if (span < 2) throw std::invalid_argument("grid too coarse to resolve wavelet level");
  const double amp = std::pow(2.0, 0.5 * w.level * d);
  std::array<std::int64_t, 3> cell{0, 0, 0};
  const std::int64_t ncells = pow_int(span, d);
  double s = 0.0;
  for (std::int64_t t = 0; t < ncells; ++t) {
    std::int64_t tt = t;
    double sign = 1.0;
    for (int a = 0; a < d; ++a) {
      std::int64_t off = tt % span;
      tt /= span;
      cell[a] = w.shift[a] * span + off;
      if (((w.type >> a) & 1) && off >= span / 2) sign = -sign;
    }
    s += sign * f.values[f.flat(cell)];
  }
  return s * amp * h_d;
}

// Real Fourier basis on T^1, ordered 1, sqrt2*cos(2pi x), sqrt2*sin(2pi x),
// sqrt2*cos(4pi x), ... sampled at cell centers.
double fourier_eval(std::int64_t l, double x) {
  if (l == 1) return 1.0;
  const std::int64_t m = l / 2;
  const double arg = 2.0 * std::numbers::pi * static_cast<double>(m) * x;
  const double r = std::numbers::sqrt2;
  return (l % 2 == 0) ? r * std::cos(arg) : r * std::sin(arg);
}

}  // namespace

GridFunction synthesize(const CoefVector& coefs, const BasisSpec& basis, int n_per_axis) {
  basis.validate();
  GridFunction g(basis.dim, n_per_axis);
  const std::int64_t N = static_cast<std::int64_t>(coefs.size());
  if (N > g.size()) throw std::invalid_argument("truncation N exceeds grid resolution");
  if (basis.family == BasisFamily::HaarPeriodic) {
    for (std::int64_t l = 1; l <= N; ++l)
      if (coefs[l - 1] != 0.0) add_haar(g, l, coefs[l - 1]);
  } else {
    const std::int64_t n = n_per_axis;
    for (std::int64_t i = 0; i < n; ++i) {
      const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      double s = 0.0;
      for (std::int64_t l = 1; l <= N; ++l) s += coefs[l - 1] * fourier_eval(l, x);
      g.values[i] = s;
    }
  }
  return g;
}

CoefVector analyze(const GridFunction& f, const BasisSpec& basis, std::int64_t N) {
  basis.validate();
  f.validate();
  if (basis.dim != f.dim) throw std::invalid_argument("basis/grid dimension mismatch");
  if (N > f.size()) throw std::invalid_argument("truncation N exceeds grid resolution");
  CoefVector c(N, 0.0);
  if (basis.family == BasisFamily::HaarPeriodic) {
    for (std::int64_t l = 1; l <= N; ++l) c[l - 1] = haar_inner(f, l);
  } else {
    const std::int64_t n = f.n_per_axis;
    const double h = 1.0 / static_cast<double>(n);
    for (std::int64_t l = 1; l <= N; ++l) {
      double s = 0.0;
      for (std::int64_t i = 0; i < n; ++i) {
        const double x = (static_cast<double>(i) + 0.5) * h;
        s += f.values[i] * fourier_eval(l, x);
      }
      c[l - 1] = s * h;
    }
  }
  return c;
}

namespace {
constexpr char kGridMagic[8] = {'B', 'S', 'V', 'G', 'R', 'I', 'D', '1'};
}

void write_grid_binary(const GridFunction& f, const std::string& path) {
  f.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  char header[32] = {0};
  std::memcpy(header, kGridMagic, 8);
  std::uint32_t d = static_cast<std::uint32_t>(f.dim);
  std::uint32_t n = static_cast<std::uint32_t>(f.n_per_axis);
  std::memcpy(header + 8, &d, 4);
  std::memcpy(header + 12, &n, 4);
  out.write(header, 32);
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write failed: " + path);
}

GridFunction read_grid_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for read: " + path);
  char header[32];
  in.read(header, 32);
  if (!in || std::memcmp(header, kGridMagic, 8) != 0)
    throw std::runtime_error("bad grid file header: " + path);
  std::uint32_t d = 0, n = 0;
  std::memcpy(&d, header + 8, 4);
  std::memcpy(&n, header + 12, 4);
  GridFunction f(static_cast<int>(d), static_cast<int>(n));
  in.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!in) throw std::runtime_error("truncated grid file: " + path);
  return f;
}

void write_grid_csv(const GridFunction& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << "cell,value\n";
  char buf[64];
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, f.values[i]);
    out << buf;
  }
}

}  // namespace besov
