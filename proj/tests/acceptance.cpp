// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "besov/experiment.hpp"
#include "besov/metrics.hpp"
#include "besov/parallel.hpp"

using namespace besov;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& what, bool ok, const std::string& detail) {
  std::printf("criterion %2d [%s] %s (%s)\n", id, ok ? "PASS" : "FAIL", what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

PriorParams make_prior(double s, double q, double kappa = 1.0, int d = 1) {
  PriorParams p;
  p.s = s;
  p.q = q;
  p.kappa = kappa;
  p.dim = d;
  p.basis = {BasisFamily::HaarPeriodic, d};
  return p;
}

EllipticProblem sin_problem(int dim, int n) {
  EllipticProblem prob = EllipticProblem::zero_source(dim, n);
  const double tp = 2.0 * std::numbers::pi;
  const double amp = dim * tp * tp;
  for (std::int64_t i = 0; i < prob.f.size(); ++i) {
    std::int64_t rem = i;
    double v = amp;
    for (int a = 0; a < dim; ++a) {
      v *= std::sin(tp * (rem % n + 0.5) / n);
      rem /= n;
    }
    prob.f.values[i] = v;
  }
  return prob;
}

// --- criterion 1: generalized-Gaussian moments ---------------------------
void criterion_moments() {
  const std::int64_t M = 1000000;
  bool ok = true;
  std::string detail;
  for (double q : {1.0, 1.5, 2.0, 3.0}) {
    std::vector<double> mq(M), m1(M), m2(M);
    parallel_for(M, [&](std::int64_t i) {
      Rng rng(4001, static_cast<std::uint64_t>(i));
      const double x = sample_xi(q, rng);
      m1[i] = x;
      m2[i] = x * x;
      mq[i] = std::pow(std::abs(x), q);
    });
    const double eq = pairwise_sum(mq) / M;
    const double rel = std::abs(eq - 2.0 / q) / (2.0 / q);
    if (rel > 0.01) ok = false;
    detail += fmt("q=%.1f rel=%.4f ", q, rel);
    if (q == 2.0) {
      const double mean = pairwise_sum(m1) / M;
      const double var = pairwise_sum(m2) / M - mean * mean;
      if (std::abs(mean) > 0.01 || std::abs(var - 1.0) > 0.01) ok = false;
      detail += fmt("(normal mean=%.4f var=%.4f) ", mean, var);
    }
  }
  report(1, "E|xi|^q = 2/q within 1% over 1e6 draws", ok, detail);
}

// --- criterion 2: density identity ---------------------------------------
void criterion_density() {
  const PriorParams p = make_prior(1.2, 1.5, 2.0);
  const std::int64_t N = 1024;
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    Rng rng(4002, static_cast<std::uint64_t>(rep));
    CoefVector xi(N), u(N);
    double direct = 0.0;
    for (std::int64_t l = 1; l <= N; ++l) {
      xi[l - 1] = sample_xi(p.q, rng);
      u[l - 1] = coefficient_weight(l, p) * xi[l - 1];
      direct += -0.5 * std::pow(std::abs(xi[l - 1]), p.q);
    }
    const double viaNorm = log_prior_density(u, p);
    worst = std::max(worst, std::abs(viaNorm - direct) / std::abs(direct));
  }
  report(2, "exp(log density) = prod exp(-|xi|^q/2) to rel 1e-10, N=1024", worst <= 1e-10,
         fmt("max rel err = %.3e", worst));
}

// --- criterion 3: Proposition 2.2 dichotomy ------------------------------
void criterion_dichotomy() {
  const PriorParams p = make_prior(1.2, 1.5);
  const double thr = p.s - 1.0 / p.q;  // 1.2 - 2/3
  const std::vector<double> ts{thr - 0.3, thr + 0.3};
  const auto rows = prop22_dichotomy(p, ts, {1 << 12, 1 << 14}, 100, 4003);
  // rows: (t0,N0),(t0,N1),(t1,N0),(t1,N1)
  const double below = (rows[1].median_norm - rows[0].median_norm) / rows[0].median_norm;
  const double above = (rows[3].median_norm - rows[2].median_norm) / rows[2].median_norm;
  const bool ok = std::abs(below) < 0.01 && above > 0.20;
  report(3, "median X^{t,q} norm: <1% change below threshold, >20% growth above", ok,
         fmt("below=%.4f above=%.4f", below, above));
}

// --- criterion 4: Fernique moment stabilization --------------------------
void criterion_fernique() {
  const PriorParams p = make_prior(2.0, 1.5);
  const double t = 0.5;
  const double rstar = fernique_rstar(p.s, t, p.q, p.dim);
  const double alpha = p.kappa / (4.0 * rstar);
  const auto rows = empirical_mgf(p, t, {alpha}, 1024, 100000, 4004);
  report(4, "running mean of exp(alpha ||u||_{C^t}) stabilizes at alpha = kappa/(4 r*)",
         rows[0].stable,
         fmt("r*=%.4f alpha=%.4f half-drift=%.4f", rstar, alpha, rows[0].half_drift));
}

// --- criterion 5: elliptic solver order ----------------------------------
void criterion_solver_order() {
  bool ok = true;
  std::string detail;
  for (int dim : {1, 2}) {
    auto max_err = [&](int n) {
      EllipticProblem prob = sin_problem(dim, n);
      GridFunction u(dim, n);
      GridFunction sol = solve_elliptic(u, prob);
      const double tp = 2.0 * std::numbers::pi;
      double e = 0.0;
      for (std::int64_t i = 0; i < sol.size(); ++i) {
        std::int64_t rem = i;
        double exact = 1.0;
        for (int a = 0; a < dim; ++a) {
          exact *= std::sin(tp * (rem % n + 0.5) / n);
          rem /= n;
        }
        e = std::max(e, std::abs(sol.values[i] - exact));
      }
      return e;
    };
    const double ratio = max_err(64) / max_err(128);
    if (std::abs(ratio - 4.0) > 0.3) ok = false;
    detail += fmt("d=%.0f ratio=%.3f ", static_cast<double>(dim), ratio);
  }
  report(5, "manufactured-solution error ratio 64->128 is 4 +/- 0.3 in d=1,2", ok, detail);
}

// --- criterion 6: Hellinger estimator oracle ------------------------------
void criterion_hellinger_oracle() {
  const PriorParams p = make_prior(1.0, 2.0);
  auto phi_a = [](const CoefVector&) { return 0.0; };
  auto phi_b = [](const CoefVector& c) { return -c[0] + 0.5; };
  const HellingerEstimate est = hellinger_prior_mc(phi_a, phi_b, p, 1, 100000, 4006);
  const double exact = std::sqrt(1.0 - std::exp(-1.0 / 8.0));
  const bool ok = std::abs(est.value - exact) <= 3.0 * est.std_error && !est.clamped;
  report(6, "Gaussian surrogate gives d = 0.3425 within 3 s.e. at M=1e5", ok,
         fmt("d=%.4f exact=%.4f se=%.5f", est.value, exact, est.std_error));
}

// --- criterion 7: conjugate-posterior oracle ------------------------------
void criterion_conjugate() {
  const PriorParams p = make_prior(1.0, 2.0);  // u_l ~ N(0, l^{-2})
  const std::int64_t N = 3;
  const std::size_t K = 2;
  const std::vector<double> A{1.0, 0.5, -0.2, 0.3, -0.7, 0.4};
  const std::vector<double> y{1.0, 0.5};
  const double sigma = 0.3;

  PosteriorSpec spec;
  spec.prior = p;
  spec.n_coef = N;
  spec.obs = ObservationSetup::iso(1, {{0.25, 0, 0}, {0.75, 0, 0}}, sigma);
  spec.obs.y = y;
  spec.forward = [&](const CoefVector& c) {
    std::vector<double> out(K, 0.0);
    for (std::size_t j = 0; j < K; ++j)
      for (std::int64_t i = 0; i < N; ++i) out[j] += A[j * N + i] * c[i];
    return out;
  };

  // closed form: Sigma = (A^T A / sigma^2 + D^{-1})^{-1}, m = Sigma A^T y / sigma^2
  double H[9], Sig[9], rhs[3], mex[3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < K; ++k) s += A[k * 3 + i] * A[k * 3 + j];
      H[i * 3 + j] = s / (sigma * sigma);
    }
  for (int i = 0; i < 3; ++i)
    H[i * 3 + i] += std::pow(static_cast<double>(i + 1), 2.0);  // D^{-1} = diag(l^2)
  // 3x3 inverse via adjugate
  const double det = H[0] * (H[4] * H[8] - H[5] * H[7]) -
                     H[1] * (H[3] * H[8] - H[5] * H[6]) +
                     H[2] * (H[3] * H[7] - H[4] * H[6]);
  Sig[0] = (H[4] * H[8] - H[5] * H[7]) / det;
  Sig[1] = (H[2] * H[7] - H[1] * H[8]) / det;
  Sig[2] = (H[1] * H[5] - H[2] * H[4]) / det;
  Sig[3] = (H[5] * H[6] - H[3] * H[8]) / det;
  Sig[4] = (H[0] * H[8] - H[2] * H[6]) / det;
  Sig[5] = (H[2] * H[3] - H[0] * H[5]) / det;
  Sig[6] = (H[3] * H[7] - H[4] * H[6]) / det;
  Sig[7] = (H[1] * H[6] - H[0] * H[7]) / det;
  Sig[8] = (H[0] * H[4] - H[1] * H[3]) / det;
  for (int i = 0; i < 3; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) s += A[k * 3 + i] * y[k];
    rhs[i] = s / (sigma * sigma);
  }
  for (int i = 0; i < 3; ++i)
    mex[i] = Sig[i * 3] * rhs[0] + Sig[i * 3 + 1] * rhs[1] + Sig[i * 3 + 2] * rhs[2];

  ChainOptions opt;
  opt.n_steps = 100000;
  opt.step_size = 0.4;
  opt.tune = true;
  Rng rng(4007);
  const ChainSummary chain = run_chain(spec, opt, rng);

  double mhat[3] = {0, 0, 0}, vhat[3] = {0, 0, 0};
  for (const auto& smp : chain.samples)
    for (int i = 0; i < 3; ++i) mhat[i] += smp[i];
  for (int i = 0; i < 3; ++i) mhat[i] /= chain.samples.size();
  for (const auto& smp : chain.samples)
    for (int i = 0; i < 3; ++i) vhat[i] += (smp[i] - mhat[i]) * (smp[i] - mhat[i]);
  for (int i = 0; i < 3; ++i) vhat[i] /= chain.samples.size();

  bool ok = true;
  std::string detail = fmt("acc=%.2f ", chain.acceptance_rate);
  for (int i = 0; i < 3; ++i) {
    const double sd = std::sqrt(Sig[i * 3 + i]);
    const double em = std::abs(mhat[i] - mex[i]) / std::max(std::abs(mex[i]), sd);
    const double ev = std::abs(vhat[i] - Sig[i * 3 + i]) / Sig[i * 3 + i];
    if (em > 0.02 || ev > 0.02) ok = false;
    detail += fmt("c%.0f: em=%.3f ev=%.3f ", static_cast<double>(i + 1), em, ev);
  }
  report(7, "RWM matches the conjugate Gaussian posterior within 2% at 1e5 steps", ok,
         detail);
}

// shared setup for the elliptic posterior used by criteria 8 and 9
PosteriorSpec elliptic_posterior(const PriorParams& prior, int n, std::int64_t N,
                                 const std::vector<double>& xs, double sigma,
                                 std::uint64_t truth_seed) {
  // synthetic data on a 2x finer grid with a 4x larger truncation
  std::vector<std::array<double, 3>> pts;
  for (double x : xs) pts.push_back({x, 0.0, 0.0});
  ObservationSetup obs = ObservationSetup::iso(1, pts, sigma);

  Rng trng(truth_seed);
  const std::int64_t n_fine = 2 * n;
  const CoefVector truth =
      sample_prior(prior, std::min<std::int64_t>(4 * N, n_fine), trng);
  EllipticProblem fine = sin_problem(1, static_cast<int>(n_fine));
  std::vector<double> y = forward_G(truth, prior, fine, obs);
  Rng nrng(truth_seed + 1);
  for (double& v : y) v += sigma * nrng.normal();
  obs.y = std::move(y);

  return PosteriorSpec::elliptic(prior, N, sin_problem(1, n), std::move(obs));
}

// --- criterion 8: Theorem 4.2 truncation rate -----------------------------
void criterion_truncation_rate() {
  const PriorParams prior = make_prior(1.2, 1.5);
  std::vector<double> xs;
  for (int j = 1; j <= 8; ++j) xs.push_back(j / 8.0);
  PosteriorSpec spec = elliptic_posterior(prior, 512, 512, xs, 0.1, 4008);

  const std::vector<std::int64_t> N_list{8, 16, 32, 64, 128};
  const ConvergenceTable t = truncation_convergence(spec, N_list, 20000, 4018);

  bool mono = true;
  for (std::size_t k = 0; k + 1 < t.rows.size(); ++k) {
    const double se = std::hypot(t.rows[k].std_error, t.rows[k + 1].std_error);
    if (t.rows[k + 1].d_hell > t.rows[k].d_hell + 2.0 * se) mono = false;
  }
  const bool ok = t.slope <= -0.1 && mono;
  std::string detail = fmt("slope=%.3f proxy-bias=%.4f d(N)=", t.slope, t.proxy_bias);
  for (const auto& r : t.rows) detail += fmt("%.4f ", r.d_hell);
  report(8, "Hellinger truncation slope <= -0.1, nonincreasing within 2 s.e.", ok, detail);
}

// --- criterion 9: Lipschitz continuity in the data ------------------------
void criterion_lipschitz() {
  const PriorParams prior = make_prior(1.2, 1.5);
  PosteriorSpec spec =
      elliptic_posterior(prior, 64, 64, {0.2, 0.4, 0.6, 0.8}, 0.1, 4009);
  std::vector<double> dir(4, 0.5);  // unit vector
  const LipschitzTable t = data_lipschitz(spec, {1e-3, 1e-2, 1e-1}, dir, 20000, 4019);
  const bool ok = std::abs(t.slope - 1.0) <= 0.2 && t.max_ratio < 50.0;
  std::string detail = fmt("slope=%.3f max-ratio=%.3f d=", t.slope, t.max_ratio);
  for (const auto& r : t.rows) detail += fmt("%.5f ", r.d_hell);
  report(9, "Hellinger-vs-data slope 1.0 +/- 0.2 over three decades", ok, detail);
}

// --- criterion 10: experiment determinism ---------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool rerun_identical(Json cfg, const std::string& tag, std::string& detail) {
  ExperimentConfig c = ExperimentConfig::from_json(std::move(cfg));
  const fs::path d1 = fs::temp_directory_path() / ("besov_acc_" + tag + "_1");
  const fs::path d2 = fs::temp_directory_path() / ("besov_acc_" + tag + "_2");
  fs::remove_all(d1);
  fs::remove_all(d2);
  c.output_dir = d1.string();
  run_experiment(c);
  c.output_dir = d2.string();
  run_experiment(c);
  bool same = true;
  int n_csv = 0;
  for (const auto& e : fs::directory_iterator(d1)) {
    if (e.path().extension() != ".csv") continue;
    ++n_csv;
    if (slurp(e.path()) != slurp(d2 / e.path().filename())) same = false;
  }
  if (n_csv == 0) same = false;
  detail += fmt((tag + (same ? ":ok(%.0f) " : ":DIFF(%.0f) ")).c_str(),
                static_cast<double>(n_csv));
  fs::remove_all(d1);
  fs::remove_all(d2);
  return same;
}

void criterion_determinism() {
  const Json prior = {{"s", 1.2}, {"q", 1.5}, {"kappa", 1.0}, {"dim", 1}, {"basis", "haar"}};
  const Json grid16 = {{"n_per_axis", 16}, {"source", "sin"}};
  const Json obs = {{"points", {{0.25}, {0.5}, {0.75}}}, {"sigma", 0.2}};
  bool ok = true;
  std::string detail;

  Json j;
  j["experiment"] = "sample-prior";
  j["seed"] = 7;
  j["prior"] = prior;
  j["N"] = 256;
  j["n_samples"] = 4;
  ok &= rerun_identical(j, "sample-prior", detail);

  j = Json{{"experiment", "solve-forward"}, {"seed", 1}, {"prior", prior},
           {"grid", grid16}, {"manufactured", true}};
  ok &= rerun_identical(j, "solve-forward", detail);

  j = Json{{"experiment", "make-data"}, {"seed", 3}, {"prior", prior}, {"grid", grid16},
           {"N", 8}, {"truth", {{"seed", 11}}}, {"observation", obs}};
  ok &= rerun_identical(j, "make-data", detail);

  j = Json{{"experiment", "run-chain"}, {"seed", 5}, {"prior", prior}, {"grid", grid16},
           {"N", 8}, {"truth", {{"seed", 11}}}, {"observation", obs},
           {"mcmc", {{"n_steps", 150}, {"step_size", 0.3}, {"thin", 5}}}};
  ok &= rerun_identical(j, "run-chain", detail);

  j = Json{{"experiment", "conv-n"}, {"seed", 5}, {"prior", prior}, {"grid", grid16},
           {"N", 16}, {"t", 0.4}, {"truth", {{"seed", 11}}}, {"observation", obs},
           {"N_list", {4, 8}}, {"M", 300}};
  ok &= rerun_identical(j, "conv-n", detail);

  j = Json{{"experiment", "lipschitz-y"}, {"seed", 5}, {"prior", prior},
           {"grid", grid16}, {"N", 16}, {"truth", {{"seed", 11}}},
           {"observation", obs}, {"delta_list", {1e-2, 1e-1}}, {"M", 300}};
  ok &= rerun_identical(j, "lipschitz-y", detail);

  j = Json{{"experiment", "fernique"}, {"seed", 5},
           {"prior", {{"s", 2.0}, {"q", 1.5}, {"dim", 1}, {"basis", "haar"}}},
           {"t", 0.5}, {"N", 128}, {"M", 2000}};
  ok &= rerun_identical(j, "fernique", detail);

  j = Json{{"experiment", "prop22"}, {"seed", 5}, {"prior", prior},
           {"t_list", {0.2, 0.8}}, {"N_list", {256, 1024}}, {"M", 50}};
  ok &= rerun_identical(j, "prop22", detail);

  j = Json{{"experiment", "weak-errors"}, {"seed", 5},
           {"prior", {{"s", 1.5}, {"q", 1.5}, {"dim", 1}, {"basis", "haar"}}},
           {"grid", grid16}, {"N", 8}, {"t", 0.4}, {"truth", {{"seed", 11}}},
           {"observation", obs}, {"N_list", {4, 8}},
           {"mcmc", {{"n_steps", 120}, {"step_size", 0.3}, {"thin", 4}}}};
  ok &= rerun_identical(j, "weak-errors", detail);

  report(10, "every experiment rerun is byte-identical on its CSV artifacts", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  // optional arguments select individual criteria by number
  auto wanted = [&](int id) {
    if (argc < 2) return true;
    for (int i = 1; i < argc; ++i)
      if (std::atoi(argv[i]) == id) return true;
    return false;
  };
  if (wanted(1)) criterion_moments();
  if (wanted(2)) criterion_density();
  if (wanted(3)) criterion_dichotomy();
  if (wanted(4)) criterion_fernique();
  if (wanted(5)) criterion_solver_order();
  if (wanted(6)) criterion_hellinger_oracle();
  if (wanted(7)) criterion_conjugate();
  if (wanted(8)) criterion_truncation_rate();
  if (wanted(9)) criterion_lipschitz();
  if (wanted(10)) criterion_determinism();
  if (failures > 0) {
    std::printf("%d criterion(s) FAILED\n", failures);
    return 1;
  }
  std::printf("all 10 criteria PASS\n");
  return 0;
}
