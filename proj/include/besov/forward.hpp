#ifndef BESOV_FORWARD_HPP
#define BESOV_FORWARD_HPP

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "besov/basis.hpp"
#include "besov/prior.hpp"

namespace besov {

/// Thrown when the conjugate-gradient iteration does not reach the requested
/// residual within the iteration cap.
struct SolverFailure : std::runtime_error {
  double residual;
  explicit SolverFailure(double res)
      : std::runtime_error("elliptic solver failed to converge"), residual(res) {}
};

/// -div(e^u grad p) = f + div g on T^d, periodic, d in {1,2}.
struct EllipticProblem {
  int dim = 1;
  int n_per_axis = 64;
  GridFunction f;                    // scalar source, mean zero
  std::vector<GridFunction> g;       // optional vector source, one per axis
  double solver_tol = 1e-10;         // relative residual
  int max_iter_factor = 20;          // iteration cap = factor * n_per_axis

  /// Zero-source problem at the given resolution.
  static EllipticProblem zero_source(int dim, int n_per_axis);

  void validate() const;
};

struct ObservationSetup {
  int dim = 1;
  std::vector<std::array<double, 3>> points;  // x_j in (0,1]^d
  std::vector<double> gamma;                  // K x K SPD noise covariance, row-major
  std::optional<std::vector<double>> y;       // data, when present

  std::size_t num_obs() const { return points.size(); }

  /// Diagonal covariance sigma^2 I at the given points.
  static ObservationSetup iso(int dim, std::vector<std::array<double, 3>> points,
                              double sigma);

  void validate() const;

  /// Lower Cholesky factor of gamma (computed on demand, cached).
  const std::vector<double>& chol() const;

  /// L^{-1} v where gamma = L L^T.
  std::vector<double> whiten(const std::vector<double>& v) const;

 private:
  mutable std::vector<double> chol_;
};

/// Mean-zero solution of the conservative finite-volume discretization with
/// harmonic-mean face coefficients, via Jacobi-preconditioned CG on the
/// mean-zero subspace.
GridFunction solve_elliptic(const GridFunction& u, const EllipticProblem& prob);

/// Matrix-vector product of the assembled operator (exposed for tests).
GridFunction apply_elliptic_operator(const GridFunction& u, const GridFunction& p);

/// Assembled right-hand side f + div g with centered face differences of g.
GridFunction elliptic_rhs(const EllipticProblem& prob);

/// Multilinear periodic interpolation of p at each observation point.
std::vector<double> observe(const GridFunction& p, const ObservationSetup& obs);

/// G(u): synthesize u from coefficients (optionally truncated to the first
/// `truncation` entries), exponentiate, solve, observe.
std::vector<double> forward_G(const CoefVector& c, const PriorParams& p,
                              const EllipticProblem& prob, const ObservationSetup& obs,
                              std::optional<std::int64_t> truncation = std::nullopt);

}  // namespace besov

#endif
