#ifndef BESOV_BASIS_HPP
#define BESOV_BASIS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace besov {

/// Truncated coefficient sequence (u_1, ..., u_N) of a function in an
/// orthonormal basis of L^2(T^d).
using CoefVector = std::vector<double>;

enum class BasisFamily { HaarPeriodic, Fourier };

std::string to_string(BasisFamily f);
BasisFamily basis_family_from_string(const std::string& s);

/// A periodic orthonormal basis of L^2(T^d), T^d = (0,1]^d.
struct BasisSpec {
  BasisFamily family = BasisFamily::HaarPeriodic;
  int dim = 1;  // d in {1,2,3}

  /// Holder regularity of the family: just under 1 for Haar,
  /// infinity (represented large) for Fourier.
  double regularity() const;

  void validate() const;  // throws std::invalid_argument
};

/// Wavelet label (j, m, k): level j >= 0, type m in {1,...,2^d-1},
/// shift k in {0,...,2^j-1}^d. l = 1 is the scaling function phi.
struct WaveletIndex {
  bool scaling = false;
  int level = 0;
  int type = 1;
  std::array<std::int64_t, 3> shift{0, 0, 0};

  bool operator==(const WaveletIndex&) const = default;
};

/// Values of a periodic function on the uniform dyadic grid of T^d.
/// Cell i covers (i/n, (i+1)/n] per axis; values are cell averages for
/// Haar work and cell-center samples for Fourier work.
struct GridFunction {
  int dim = 1;
  int n_per_axis = 1;  // power of two
  std::vector<double> values;  // size n_per_axis^dim, axis 0 fastest

  GridFunction() = default;
  GridFunction(int d, int n);

  std::int64_t size() const { return static_cast<std::int64_t>(values.size()); }
  double mean() const;
  double max_abs() const;
  void validate() const;

  /// Flat index from per-axis cell indices (periodic wrap applied).
  std::int64_t flat(std::array<std::int64_t, 3> cell) const;
};

std::int64_t pow_int(std::int64_t base, int exp);

/// Decode the one-dimensional basis numbering: l = 1 is the scaling
/// function; level j occupies l in [2^{jd}+1, 2^{(j+1)d}], with m outer
/// and k in lexicographic order inside each level.
WaveletIndex index_to_level(std::int64_t l, int d);

/// Exact inverse of index_to_level.
std::int64_t level_to_index(const WaveletIndex& w, int d);

/// Evaluate sum_l coefs[l-1] * psi_l on the grid. Exact for Haar when the
/// truncation fits the grid resolution.
GridFunction synthesize(const CoefVector& coefs, const BasisSpec& basis, int n_per_axis);

/// First N discrete inner products (<f, psi_l>)_{l=1..N}.
CoefVector analyze(const GridFunction& f, const BasisSpec& basis, std::int64_t N);

// Grid function serialization: flat little-endian float64 payload behind a
// 32-byte header (magic, d, n_per_axis, reserved), plus CSV for inspection.
void write_grid_binary(const GridFunction& f, const std::string& path);
GridFunction read_grid_binary(const std::string& path);
void write_grid_csv(const GridFunction& f, const std::string& path);

}  // namespace besov

#endif
