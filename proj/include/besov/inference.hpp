#ifndef BESOV_INFERENCE_HPP
#define BESOV_INFERENCE_HPP

#include <functional>
#include <optional>
#include <vector>

#include "besov/forward.hpp"

namespace besov {

/// Observation operator on coefficient space; defaults to the elliptic
/// forward map, replaceable by surrogates in test harnesses.
using ForwardFn = std::function<std::vector<double>(const CoefVector&)>;

/// Prior + forward setup + data, defining Phi and the unnormalized posterior
/// on the N-dimensional coefficient marginal.
struct PosteriorSpec {
  PriorParams prior;
  std::int64_t n_coef = 1;                        // truncation N
  std::optional<std::int64_t> forward_truncation;  // M <= N for G^M
  ObservationSetup obs;                            // must carry data y
  ForwardFn forward;                               // maps coefficients to K-vector

  /// Wire the elliptic forward map G (or G^M via forward_truncation).
  static PosteriorSpec elliptic(PriorParams prior, std::int64_t n_coef,
                                EllipticProblem prob, ObservationSetup obs,
                                std::optional<std::int64_t> forward_truncation = std::nullopt);

  void validate() const;
};

/// Phi(u; y) = |Gamma^{-1/2}(y - G(u))|^2 / 2 - |Gamma^{-1/2} y|^2 / 2.
double potential_phi(const CoefVector& c, const PosteriorSpec& spec);

/// -Phi(c) + log prior density of the first N coefficients.
double log_posterior_unnorm(const CoefVector& c, const PosteriorSpec& spec);

struct ChainState {
  std::vector<double> xi;  // whitened coordinates
  double phi = 0.0;
  double log_prior_xi = 0.0;  // -sum |xi_l|^q / 2
  std::int64_t step = 0;
  std::int64_t accepted = 0;
  std::int64_t solver_rejects = 0;

  CoefVector coefs(const PriorParams& prior) const;
};

ChainState chain_init(const PosteriorSpec& spec, Rng& rng);

/// One random-walk Metropolis step in whitened xi coordinates. The prior
/// ratio uses the exact generalized-Gaussian log-density; solver failures
/// on the proposal count as rejections.
void rwm_step(ChainState& state, const PosteriorSpec& spec, double step_size, Rng& rng);

struct ChainSummary {
  std::vector<std::int64_t> steps;          // thinned step indices
  std::vector<CoefVector> samples;          // thinned coefficient samples
  std::vector<double> phis;                 // per thinned sample
  std::vector<double> log_priors;           // coefficient-space log prior
  std::vector<double> running_mean;         // final running mean of coefficients
  double acceptance_rate = 0.0;
  std::int64_t solver_rejects = 0;
  double step_size = 0.0;                   // possibly tuned
  bool acceptance_warning = false;          // outside [0.1, 0.5]
};

struct ChainOptions {
  std::int64_t n_steps = 1000;
  double step_size = 0.1;
  std::int64_t thin = 1;
  bool tune = false;       // pre-run doubling/halving toward 25% acceptance
  std::int64_t tune_rounds = 12;
  std::int64_t tune_batch = 200;
};

/// Deterministic given the seed of `rng`; tuning (when enabled) runs before
/// and never during the measured chain.
ChainSummary run_chain(const PosteriorSpec& spec, const ChainOptions& opt, Rng& rng);

void write_chain_csv(const ChainSummary& s, const std::string& path);

}  // namespace besov

#endif
