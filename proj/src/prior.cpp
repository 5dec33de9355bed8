#include "besov/prior.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace besov {

void PriorParams::validate() const {
  if (q < 1.0) throw std::invalid_argument("prior q must be >= 1");
  if (s <= 0.0) throw std::invalid_argument("prior s must be > 0");
  if (kappa <= 0.0) throw std::invalid_argument("prior kappa must be > 0");
  if (dim < 1 || dim > 3) throw std::invalid_argument("prior dim must be in {1,2,3}");
  if (basis.dim != dim) throw std::invalid_argument("prior dim does not match basis dim");
  basis.validate();
}

double sample_xi(double q, Rng& rng) {
  if (q < 1.0) throw std::invalid_argument("sample_xi requires q >= 1");
  const double g = rng.gamma(1.0 / q);
  const double mag = std::pow(2.0 * g, 1.0 / q);
  return rng.coin() ? mag : -mag;
}

double coefficient_weight(std::int64_t l, const PriorParams& p) {
  const double d = static_cast<double>(p.dim);
  const double expo = p.s / d + 0.5 - 1.0 / p.q;
  return std::pow(static_cast<double>(l), -expo) * std::pow(p.kappa, -1.0 / p.q);
}

CoefVector sample_prior(const PriorParams& p, std::int64_t N, Rng& rng) {
  p.validate();
  if (N < 1) throw std::invalid_argument("truncation N must be >= 1");
  CoefVector c(N);
  for (std::int64_t l = 1; l <= N; ++l)
    c[l - 1] = coefficient_weight(l, p) * sample_xi(p.q, rng);
  return c;
}

double norm_Xtq(const CoefVector& c, double t, double q, int d) {
  if (q < 1.0) throw std::invalid_argument("norm_Xtq requires q >= 1");
  const double dd = static_cast<double>(d);
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double l = static_cast<double>(i + 1);
    s += std::pow(l, t * q / dd + q / 2.0 - 1.0) * std::pow(std::abs(c[i]), q);
  }
  return std::pow(s, 1.0 / q);
}

double norm_Ct_proxy(const CoefVector& c, double t, const PriorParams& p) {
  if (p.basis.family == BasisFamily::Fourier)
    throw std::invalid_argument("C^t proxy norm is a wavelet-basis statement");
  const double dd = static_cast<double>(p.dim);
  double m = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double l = static_cast<double>(i + 1);
    m = std::max(m, std::pow(l, t / dd + 0.5) * std::abs(c[i]));
  }
  return m;
}

double log_prior_density(const CoefVector& c, const PriorParams& p) {
  const double nrm = norm_Xtq(c, p.s, p.q, p.dim);
  return -(p.kappa / 2.0) * std::pow(nrm, p.q);
}

double surface_constant(int d) {
  return 2.0 * std::pow(std::acos(-1.0), 0.5 * d) / std::tgamma(0.5 * d);
}

double c0_constant(double q, int d) {
  const double dd = static_cast<double>(d);
  return surface_constant(d) * std::pow(2.0, dd / q) * std::tgamma(dd / q) / q;
}

int cqd_branch(double q) { return q < 1.75 ? 0 : 1; }

double cqd_constant(double q, int d) {
  const double ratio = c0_constant(q, d) / surface_constant(d);  // c_0 / c_d
  if (cqd_branch(q) == 0) {
    const double denom = static_cast<double>(d) - q + 1.0;
    return std::pow(std::pow(2.0, d) * q * ratio, 1.0 / denom);
  }
  return std::max(1.0, std::pow(2.0, d + 2) * q * ratio);
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double scale = std::max(std::abs(whole), 1e-300);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol * scale, 48);
}

// int_r^inf x^a exp(-x^beta / 2) dx via the substitution v = x^beta / 2,
// giving (2^{(a+1)/beta} / beta) int_{v_r}^inf v^{(a+1)/beta - 1} e^{-v} dv.
double tail_integral(double a, double beta, double r) {
  const double c = (a + 1.0) / beta;
  const double vr = std::pow(std::max(r, 0.0), beta) / 2.0;
  const double vend = std::max(vr, c) + 250.0;
  auto g = [c](double v) { return std::pow(v, c - 1.0) * std::exp(-v); };
  double lo = vr;
  if (lo == 0.0 && c < 1.0) lo = 1e-12;  // integrable endpoint singularity
  const double val = integrate(g, lo, vend, 1e-8);
  return std::pow(2.0, c) / beta * val;
}

}  // namespace

double fernique_r1(double s, double t, double q, int d) {
  const double dd = static_cast<double>(d);
  const double beta = (s - t) / dd - 1.0 / q;
  if (beta <= 0.0) throw std::invalid_argument("fernique constants require t < s - d/q");
  // c01 = (1/c_d) int_{R^d} exp(-|x|/2) dx = 2^d Gamma(d)
  const double c01 = std::pow(2.0, d) * std::tgamma(dd);
  auto admissible = [&](double r) {
    double binom = 1.0;
    for (int k = 0; k <= d; ++k) {
      const double bound = c01 / (4.0 * (dd + 1.0)) / (std::pow(2.0, k + 1) * binom);
      if (tail_integral((dd - k) * beta, beta, r) >= bound) return false;
      binom = binom * static_cast<double>(d - k) / static_cast<double>(k + 1);
    }
    return true;
  };
  double lo = 0.0, hi = 1.0;
  while (!admissible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw std::runtime_error("fernique r_1 bisection bracket exceeded 1e6");
  }
  for (int it = 0; it < 120 && hi - lo > 1e-10 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (admissible(mid) ? hi : lo) = mid;
  }
  return hi;
}

double fernique_rstar(double s, double t, double q, int d) {
  if (q < 1.0) throw std::invalid_argument("fernique constants require q >= 1");
  const double r1 = fernique_r1(s, t, q, d);  // validates t < s - d/q
  return std::log(2.0) * std::max(r1, cqd_constant(q, d));
}

double kappa_star(double alpha1, double alpha2, double alpha3, double c_e,
                  double rstar, KappaContext context) {
  switch (context) {
    case KappaContext::WellDefined: return 2.0 * c_e * rstar * alpha1;
    case KappaContext::WellPosed: return 2.0 * c_e * rstar * (alpha1 + 2.0 * alpha2);
    case KappaContext::Approximation: return 2.0 * c_e * rstar * (alpha1 + 2.0 * alpha3);
  }
  return 0.0;
}

}  // namespace besov
