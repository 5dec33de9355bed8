#include <doctest.h>

#include <cmath>

#include "besov/metrics.hpp"

using namespace besov;

namespace {

PriorParams gauss_prior(double s = 1.0) {
  PriorParams p;
  p.s = s;
  p.q = 2.0;
  p.kappa = 1.0;
  p.dim = 1;
  p.basis = {BasisFamily::HaarPeriodic, 1};
  return p;
}

PosteriorSpec linear_spec(const PriorParams& prior, std::int64_t N,
                          const std::vector<double>& A, std::vector<double> y,
                          double sigma) {
  const std::size_t K = y.size();
  PosteriorSpec spec;
  spec.prior = prior;
  spec.n_coef = N;
  std::vector<std::array<double, 3>> pts(K, {0.5, 0.0, 0.0});
  spec.obs = ObservationSetup::iso(prior.dim, pts, sigma);
  spec.obs.y = std::move(y);
  spec.forward = [A, K, N](const CoefVector& c) {
    const std::int64_t m = std::min<std::int64_t>(N, c.size());
    std::vector<double> out(K, 0.0);
    for (std::size_t j = 0; j < K; ++j)
      for (std::int64_t i = 0; i < m; ++i)
        out[j] += A[j * N + i] * c[i];
    return out;
  };
  return spec;
}

}  // namespace

TEST_CASE("hellinger exactness for matching and shifted potentials") {
  std::vector<double> a{0.3, -0.2, 1.4, 0.0, 2.2};
  HellingerEstimate eq = hellinger_from_potentials(a, a);
  CHECK(eq.value == 0.0);
  CHECK(eq.std_error == 0.0);
  CHECK(!eq.clamped);

  std::vector<double> b(a);
  for (double& v : b) v += 3.75;
  HellingerEstimate shifted = hellinger_from_potentials(a, b);
  CHECK(shifted.value == 0.0);
  CHECK(!shifted.clamped);
}

TEST_CASE("hellinger symmetry is bit exact") {
  std::vector<double> a{0.3, -0.2, 1.4, 0.0, 2.2, -1.1};
  std::vector<double> b{0.1, 0.7, -0.4, 0.9, 1.3, 0.2};
  HellingerEstimate ab = hellinger_from_potentials(a, b);
  HellingerEstimate ba = hellinger_from_potentials(b, a);
  CHECK(ab.value == ba.value);
  CHECK(ab.std_error == ba.std_error);
  CHECK(ab.value > 0.0);
  CHECK(!ab.clamped);
}

TEST_CASE("gaussian surrogate oracle") {
  // prior N(0,1) on one coefficient; Phi_a = 0, Phi_b = -x + 1/2 give
  // posteriors N(0,1) and N(1,1): d^2 = 1 - exp(-1/8)
  PriorParams prior = gauss_prior();
  auto phi_a = [](const CoefVector&) { return 0.0; };
  auto phi_b = [](const CoefVector& c) { return -c[0] + 0.5; };
  HellingerEstimate est = hellinger_prior_mc(phi_a, phi_b, prior, 1, 20000, 2024);
  const double exact = std::sqrt(1.0 - std::exp(-1.0 / 8.0));
  CHECK(std::abs(est.value - exact) < 3.0 * est.std_error);
  CHECK(est.std_error < 0.01);
  CHECK(est.n_samples == 20000);
  CHECK(est.shared_seed == 2024);
  CHECK(!est.clamped);

  CHECK_THROWS_AS(hellinger_prior_mc(phi_a, phi_b, prior, 1, 50, 1),
                  std::invalid_argument);
}

TEST_CASE("truncation convergence on a linear surrogate") {
  PriorParams prior = gauss_prior(1.2);
  const std::int64_t N_ref = 64;
  std::vector<double> A(2 * N_ref);
  for (std::int64_t i = 0; i < N_ref; ++i) {
    A[i] = 1.0 / (i + 1.0);
    A[N_ref + i] = (i % 2 ? -1.0 : 1.0) / (i + 1.0);
  }
  PosteriorSpec spec = linear_spec(prior, N_ref, A, {0.6, -0.3}, 0.3);

  ConvergenceTable t =
      truncation_convergence(spec, {4, 8, 16, 32, 64}, 4000, 99);
  REQUIRE(t.rows.size() == 5);
  CHECK(t.n_ref == N_ref);
  CHECK(t.rows.back().d_hell == 0.0);  // d(N_ref, N_ref)
  CHECK(t.slope < 0.0);
  CHECK(t.proxy_bias >= 0.0);
  for (std::size_t k = 0; k + 2 < t.rows.size(); ++k) {
    const double se = std::hypot(t.rows[k].std_error, t.rows[k + 1].std_error);
    CHECK(t.rows[k + 1].d_hell <= t.rows[k].d_hell + 2.0 * se);
  }

  CHECK_THROWS_AS(truncation_convergence(spec, {128}, 4000, 99), std::invalid_argument);
}

TEST_CASE("data lipschitz on a linear surrogate") {
  PriorParams prior = gauss_prior(1.2);
  PosteriorSpec spec = linear_spec(prior, 8,
                                   {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.0, 0.0},
                                   {0.4}, 0.5);
  LipschitzTable t = data_lipschitz(spec, {0.0, 1e-3, 1e-2, 1e-1}, {1.0}, 4000, 7);
  REQUIRE(t.rows.size() == 4);
  CHECK(t.rows[0].d_hell == 0.0);
  CHECK(t.slope == doctest::Approx(1.0).epsilon(0.2));
  for (const auto& r : t.rows) CHECK(r.ratio <= t.max_ratio);
  CHECK(t.max_ratio < 10.0);

  CHECK_THROWS_AS(data_lipschitz(spec, {1e-2, 2e-2}, {1.0}, 200, 7),
                  std::invalid_argument);
  CHECK_THROWS_AS(data_lipschitz(spec, {1e-3, 1e-1}, {0.0}, 200, 7),
                  std::invalid_argument);
}

TEST_CASE("empirical mgf basics") {
  PriorParams prior = gauss_prior(2.0);
  prior.q = 1.5;
  auto rows = empirical_mgf(prior, 0.5, {0.0, 0.05, 0.1}, 256, 2000, 31);
  REQUIRE(rows.size() == 3);
  for (const auto& [i, v] : rows[0].trajectory) CHECK(v == doctest::Approx(1.0));
  CHECK(rows[0].mean == doctest::Approx(1.0));
  CHECK(rows[0].half_drift == doctest::Approx(0.0));
  CHECK(rows[0].stable);
  CHECK(rows[0].mean <= rows[1].mean);
  CHECK(rows[1].mean <= rows[2].mean);
  CHECK(!rows[1].trajectory.empty());

  CHECK_THROWS_AS(empirical_mgf(prior, 2.0, {0.1}, 64, 500, 1), std::invalid_argument);
}

TEST_CASE("prop22 collapse for very negative t") {
  PriorParams prior = gauss_prior(1.2);
  prior.q = 1.5;
  auto rows = prop22_dichotomy(prior, {-50.0}, {64, 256, 1024}, 200, 5);
  REQUIRE(rows.size() == 3);
  // weight collapse: the l=1 term dominates and the median stops moving
  CHECK(rows[1].median_norm == doctest::Approx(rows[0].median_norm).epsilon(1e-9));
  CHECK(rows[2].median_norm == doctest::Approx(rows[0].median_norm).epsilon(1e-9));
  CHECK(rows[0].median_norm > 0.0);
}

TEST_CASE("weak errors vanish when comparing a chain with itself") {
  PriorParams prior = gauss_prior(1.5);
  EllipticProblem prob = EllipticProblem::zero_source(1, 16);
  const double tp = 2.0 * std::acos(-1.0);
  for (int i = 0; i < 16; ++i)
    prob.f.values[i] = tp * tp * std::sin(tp * (i + 0.5) / 16.0);

  PosteriorSpec spec = linear_spec(prior, 8, std::vector<double>(8, 0.0), {0.0}, 1.0);
  ChainOptions opt;
  opt.n_steps = 400;
  opt.step_size = 1.0;
  opt.thin = 4;
  Rng rng(61);
  ChainSummary chain = run_chain(spec, opt, rng);

  WeakErrorReport rep = weak_errors(prior, prob, chain, chain, 8);
  CHECK(rep.mean_sup_error == 0.0);
  CHECK(rep.cov_diag_sup_error == 0.0);
  CHECK(rep.converged_inputs == !chain.acceptance_warning);

  // truncating to fewer coefficients produces a nonzero gap
  WeakErrorReport rep4 = weak_errors(prior, prob, chain, chain, 4);
  CHECK(rep4.mean_sup_error > 0.0);
}

TEST_CASE("loglog slope recovers exact power laws") {
  std::vector<double> x{1.0, 2.0, 4.0, 8.0}, y;
  for (double v : x) y.push_back(5.0 * std::pow(v, -2.0));
  CHECK(loglog_slope(x, y) == doctest::Approx(-2.0).epsilon(1e-12));
  // non-positive entries are skipped
  x.push_back(16.0);
  y.push_back(0.0);
  CHECK(loglog_slope(x, y) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(loglog_slope({1.0}, {2.0}) == 0.0);
}
