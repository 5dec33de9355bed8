#ifndef BESOV_METRICS_HPP
#define BESOV_METRICS_HPP

#include <functional>
#include <vector>

#include "besov/inference.hpp"

namespace besov {

using PotentialFn = std::function<double(const CoefVector&)>;

struct HellingerEstimate {
  double value = 0.0;      // in [0,1]
  double std_error = 0.0;  // delta-method
  std::int64_t n_samples = 0;
  std::uint64_t shared_seed = 0;  // common-random-number seed
  bool clamped = false;           // d^2 fell outside [0,1] before clamping
};

/// Bhattacharyya-type estimate from paired potential evaluations under
/// common prior draws: d^2 = 1 - E[e^{-(Phi_a+Phi_b)/2}] / sqrt(Z_a Z_b).
/// Potentials differing by a constant give exactly zero.
HellingerEstimate hellinger_from_potentials(const std::vector<double>& phi_a,
                                            const std::vector<double>& phi_b);

/// Monte Carlo Hellinger distance between the posteriors defined by two
/// potentials over the same prior, using M common prior draws at
/// truncation N. Requires M >= 100.
HellingerEstimate hellinger_prior_mc(const PotentialFn& phi_a, const PotentialFn& phi_b,
                                     const PriorParams& prior, std::int64_t N,
                                     std::int64_t M, std::uint64_t seed);

struct ConvergenceRow {
  std::int64_t n;
  double d_hell;
  double std_error;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;       // fitted log-log slope of d_hell vs N
  std::int64_t n_ref = 0;
  double proxy_bias = 0.0;  // d(N_ref/2, N_ref)
};

/// Hellinger distance between mu^{y,N} and the reference mu^{y,N_ref}
/// (N_ref = spec.n_coef) over common prior draws, for each N in N_list.
ConvergenceTable truncation_convergence(const PosteriorSpec& spec,
                                        const std::vector<std::int64_t>& N_list,
                                        std::int64_t M, std::uint64_t seed);

struct LipschitzRow {
  double delta;       // |y - y'|
  double d_hell;
  double std_error;
  double ratio;       // d / delta
};

struct LipschitzTable {
  std::vector<LipschitzRow> rows;
  double slope = 0.0;      // fitted log-log slope
  double max_ratio = 0.0;
};

/// d_Hell(mu^y, mu^{y + delta e}) with forward solves shared across all
/// perturbations (common random numbers).
LipschitzTable data_lipschitz(const PosteriorSpec& spec, const std::vector<double>& deltas,
                              const std::vector<double>& direction, std::int64_t M,
                              std::uint64_t seed);

struct MgfRow {
  double alpha;
  double mean;            // sample mean of exp(alpha * ||u||_{C^t} proxy)
  double half_drift;      // relative change of the running mean over the last half
  bool stable;            // half_drift < 0.05
  std::vector<std::pair<std::int64_t, double>> trajectory;  // checkpointed running mean
};

/// Empirical moment generating function of the C^t proxy norm; draws are
/// shared across all alpha values.
std::vector<MgfRow> empirical_mgf(const PriorParams& prior, double t,
                                  const std::vector<double>& alpha_list, std::int64_t N,
                                  std::int64_t M, std::uint64_t seed);

struct DichotomyRow {
  double t;
  std::int64_t n;
  double median_norm;
};

/// Median truncated X^{t,q} norms over M draws for each (t, N); stabilizes
/// below the t = s - d/q threshold and diverges above it.
std::vector<DichotomyRow> prop22_dichotomy(const PriorParams& prior,
                                           const std::vector<double>& t_list,
                                           const std::vector<std::int64_t>& N_list,
                                           std::int64_t M, std::uint64_t seed);

struct WeakErrorReport {
  double mean_sup_error = 0.0;      // sup-norm gap of posterior mean pressure
  double mean_sup_std_error = 0.0;  // MC s.e. at the argmax cell
  double cov_diag_sup_error = 0.0;  // sup-norm gap of pointwise posterior variance
  bool converged_inputs = true;     // acceptance diagnostics of both chains
};

/// Weak-error functionals of the pressure field from MCMC output under the
/// reference posterior and the truncated one. Samples from `chain_n` are
/// truncated to `n` coefficients before the forward solve.
WeakErrorReport weak_errors(const PriorParams& prior, const EllipticProblem& prob,
                            const ChainSummary& chain_ref, const ChainSummary& chain_n,
                            std::int64_t n);

/// Least-squares slope of log(y) against log(x), skipping non-positive y.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace besov

#endif
