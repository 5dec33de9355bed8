#include "besov/inference.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

namespace besov {

PosteriorSpec PosteriorSpec::elliptic(PriorParams prior, std::int64_t n_coef,
                                      EllipticProblem prob, ObservationSetup obs,
                                      std::optional<std::int64_t> forward_truncation) {
  PosteriorSpec spec;
  spec.prior = std::move(prior);
  spec.n_coef = n_coef;
  spec.forward_truncation = forward_truncation;
  spec.obs = std::move(obs);
  auto prob_shared = std::make_shared<EllipticProblem>(std::move(prob));
  auto obs_copy = spec.obs;
  auto prior_copy = spec.prior;
  spec.forward = [prob_shared, obs_copy, prior_copy, forward_truncation](const CoefVector& c) {
    return forward_G(c, prior_copy, *prob_shared, obs_copy, forward_truncation);
  };
  return spec;
}

void PosteriorSpec::validate() const {
  prior.validate();
  if (n_coef < 1) throw std::invalid_argument("posterior truncation N must be >= 1");
  if (forward_truncation && (*forward_truncation < 1 || *forward_truncation > n_coef))
    throw std::invalid_argument("forward_truncation must satisfy 1 <= M <= N");
  obs.validate();
  if (!obs.y) throw std::invalid_argument("posterior spec requires data y");
  if (!forward) throw std::invalid_argument("posterior spec requires a forward map");
}

double potential_phi(const CoefVector& c, const PosteriorSpec& spec) {
  const std::vector<double> G = spec.forward(c);
  const std::vector<double>& y = *spec.obs.y;
  std::vector<double> resid(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) resid[j] = y[j] - G[j];
  const std::vector<double> wr = spec.obs.whiten(resid);
  const std::vector<double> wy = spec.obs.whiten(y);
  double a = 0.0, b = 0.0;
  for (double v : wr) a += v * v;
  for (double v : wy) b += v * v;
  return 0.5 * a - 0.5 * b;
}

double log_posterior_unnorm(const CoefVector& c, const PosteriorSpec& spec) {
  return -potential_phi(c, spec) + log_prior_density(c, spec.prior);
}

CoefVector ChainState::coefs(const PriorParams& prior) const {
  CoefVector c(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i)
    c[i] = coefficient_weight(static_cast<std::int64_t>(i) + 1, prior) * xi[i];
  return c;
}

namespace {

double log_prior_xi_of(const std::vector<double>& xi, double q) {
  double s = 0.0;
  for (double v : xi) s += std::pow(std::abs(v), q);
  return -0.5 * s;
}

}  // namespace

ChainState chain_init(const PosteriorSpec& spec, Rng& rng) {
  spec.validate();
  ChainState st;
  st.xi.resize(spec.n_coef);
  for (auto& v : st.xi) v = sample_xi(spec.prior.q, rng);
  st.log_prior_xi = log_prior_xi_of(st.xi, spec.prior.q);
  st.phi = potential_phi(st.coefs(spec.prior), spec);
  return st;
}

void rwm_step(ChainState& state, const PosteriorSpec& spec, double step_size, Rng& rng) {
  if (step_size <= 0.0) throw std::invalid_argument("step_size must be positive");
  std::vector<double> prop(state.xi.size());
  for (std::size_t i = 0; i < prop.size(); ++i)
    prop[i] = state.xi[i] + step_size * rng.normal();
  const double lp_prop = log_prior_xi_of(prop, spec.prior.q);

  ChainState trial = state;
  trial.xi = std::move(prop);
  double phi_prop;
  bool solver_ok = true;
  try {
    phi_prop = potential_phi(trial.coefs(spec.prior), spec);
  } catch (const SolverFailure&) {
    solver_ok = false;
    phi_prop = 0.0;
  }
  // Draw the acceptance uniform unconditionally so the random stream is
  // identical whether or not the solve succeeded.
  const double uu = rng.uniform();
  state.step += 1;
  if (!solver_ok) {
    state.solver_rejects += 1;
    return;
  }
  const double log_ratio = (-phi_prop + lp_prop) - (-state.phi + state.log_prior_xi);
  if (std::log(uu) < log_ratio) {
    state.xi = std::move(trial.xi);
    state.phi = phi_prop;
    state.log_prior_xi = lp_prop;
    state.accepted += 1;
  }
}

ChainSummary run_chain(const PosteriorSpec& spec, const ChainOptions& opt, Rng& rng) {
  if (opt.n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  const std::int64_t thin = std::max<std::int64_t>(1, opt.thin);
  double h = opt.step_size;

  if (opt.tune) {
    ChainState st = chain_init(spec, rng);
    for (std::int64_t round = 0; round < opt.tune_rounds; ++round) {
      const std::int64_t acc0 = st.accepted;
      for (std::int64_t i = 0; i < opt.tune_batch; ++i) rwm_step(st, spec, h, rng);
      const double acc = static_cast<double>(st.accepted - acc0) /
                         static_cast<double>(opt.tune_batch);
      if (acc > 0.30)
        h *= 2.0;
      else if (acc < 0.20)
        h *= 0.5;
    }
  }

  ChainState st = chain_init(spec, rng);
  ChainSummary out;
  out.step_size = h;
  const std::int64_t N = spec.n_coef;
  out.running_mean.assign(N, 0.0);
  for (std::int64_t k = 1; k <= opt.n_steps; ++k) {
    rwm_step(st, spec, h, rng);
    const CoefVector c = st.coefs(spec.prior);
    for (std::int64_t i = 0; i < N; ++i)
      out.running_mean[i] += (c[i] - out.running_mean[i]) / static_cast<double>(k);
    if (k % thin == 0) {
      out.steps.push_back(k);
      out.samples.push_back(c);
      out.phis.push_back(st.phi);
      out.log_priors.push_back(log_prior_density(c, spec.prior));
    }
  }
  out.acceptance_rate =
      static_cast<double>(st.accepted) / static_cast<double>(opt.n_steps);
  out.solver_rejects = st.solver_rejects;
  out.acceptance_warning = out.acceptance_rate < 0.1 || out.acceptance_rate > 0.5;
  return out;
}

void write_chain_csv(const ChainSummary& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  const std::size_t N = s.samples.empty() ? 0 : s.samples.front().size();
  out << "step,phi,log_prior";
  for (std::size_t i = 1; i <= N; ++i) out << ",coef_" << i;
  out << "\n";
  char buf[64];
  for (std::size_t r = 0; r < s.samples.size(); ++r) {
    out << s.steps[r];
    std::snprintf(buf, sizeof buf, ",%.17g", s.phis[r]);
    out << buf;
    std::snprintf(buf, sizeof buf, ",%.17g", s.log_priors[r]);
    out << buf;
    for (double v : s.samples[r]) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace besov
