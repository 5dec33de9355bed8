#ifndef BESOV_PRIOR_HPP
#define BESOV_PRIOR_HPP

#include <cstdint>

#include "besov/basis.hpp"
#include "besov/rng.hpp"

namespace besov {

/// Parameters of the (kappa, X^{s,q}) measure over coefficients in `basis`.
struct PriorParams {
  double s = 1.0;      // smoothness, s > 0
  double q = 2.0;      // integrability, q >= 1
  double kappa = 1.0;  // scale
  int dim = 1;
  BasisSpec basis;

  void validate() const;  // throws std::invalid_argument

  /// True when draws land in C^t for t = 0, i.e. s > d/q.
  bool continuous_draws() const { return s > static_cast<double>(dim) / q; }
};

/// One draw from the density proportional to exp(-|x|^q / 2).
/// |xi| = (2 G)^{1/q} with G ~ Gamma(1/q, 1) and an independent sign.
double sample_xi(double q, Rng& rng);

/// gamma_l = l^{-(s/d + 1/2 - 1/q)} * kappa^{-1/q}.
double coefficient_weight(std::int64_t l, const PriorParams& p);

/// Draw (u_l)_{l<=N} with u_l = gamma_l * xi_l.
CoefVector sample_prior(const PriorParams& p, std::int64_t N, Rng& rng);

/// Truncated X^{t,q} norm: (sum_l l^{tq/d + q/2 - 1} |u_l|^q)^{1/q}.
double norm_Xtq(const CoefVector& c, double t, double q, int d);

/// Coefficient form of the B^t_{inf,inf} (Holder) norm for wavelet bases:
/// sup_l l^{t/d + 1/2} |u_l|. Throws for Fourier bases.
double norm_Ct_proxy(const CoefVector& c, double t, const PriorParams& p);

/// Unnormalized log-density of the first N coefficients:
/// -(kappa/2) ||u||_{X^{s,q}}^q.
double log_prior_density(const CoefVector& c, const PriorParams& p);

// --- Fernique constants -------------------------------------------------

/// Surface constant c_d = 2 pi^{d/2} / Gamma(d/2).
double surface_constant(int d);

/// c_0 = integral over R^d of exp(-|x|^q / 2); closed form
/// c_d 2^{d/q} Gamma(d/q) / q.
double c0_constant(double q, int d);

/// Branch selector for c_{q,d}: 0 for 1 <= q < 1.75, 1 for q >= 1.75.
int cqd_branch(double q);

/// Two-branch constant c_{q,d}.
double cqd_constant(double q, int d);

/// Smallest r such that the tail integrals
/// int_r^inf x^{(d-k) beta} exp(-x^beta / 2) dx, beta = (s-t)/d - 1/q,
/// fall below their per-k thresholds for all k = 0..d. Found by bisection
/// with adaptive quadrature.
double fernique_r1(double s, double t, double q, int d);

/// r* = ln(2) * max{r_1, c_{q,d}}; the moment generating function of
/// ||u||_{C^t} is finite for alpha < kappa / (2 r*). Requires t < s - d/q.
double fernique_rstar(double s, double t, double q, int d);

enum class KappaContext { WellDefined, WellPosed, Approximation };

/// Admissibility threshold on kappa:
/// 2 c_e r* alpha_1, 2 c_e r* (alpha_1 + 2 alpha_2), or
/// 2 c_e r* (alpha_1 + 2 alpha_3) depending on context.
double kappa_star(double alpha1, double alpha2, double alpha3, double c_e,
                  double rstar, KappaContext context);

}  // namespace besov

#endif
