#include "besov/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "besov/parallel.hpp"

namespace besov {

namespace {

double log_mean_exp(const std::vector<double>& a) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : a) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  std::vector<double> w(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) w[i] = std::exp(a[i] - m);
  return m + std::log(pairwise_sum(w) / static_cast<double>(a.size()));
}

double covariance(const std::vector<double>& x, double mx, const std::vector<double>& y,
                  double my) {
  std::vector<double> t(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) t[i] = (x[i] - mx) * (y[i] - my);
  return pairwise_sum(t) / static_cast<double>(x.size());
}

double gaussian_potential(const ObservationSetup& obs, const std::vector<double>& y,
                          const std::vector<double>& G) {
  std::vector<double> resid(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) resid[j] = y[j] - G[j];
  const std::vector<double> wr = obs.whiten(resid);
  const std::vector<double> wy = obs.whiten(y);
  double a = 0.0, b = 0.0;
  for (double v : wr) a += v * v;
  for (double v : wy) b += v * v;
  return 0.5 * (a - b);
}

}  // namespace

HellingerEstimate hellinger_from_potentials(const std::vector<double>& phi_a,
                                            const std::vector<double>& phi_b) {
  if (phi_a.size() != phi_b.size() || phi_a.empty())
    throw std::invalid_argument("potential arrays must be non-empty and equally sized");
  const std::int64_t M = static_cast<std::int64_t>(phi_a.size());
  HellingerEstimate est;
  est.n_samples = M;

  // Potentials equal up to a constant: the distance vanishes identically,
  // before any Monte Carlo averaging.
  bool const_diff = true;
  const double d0 = phi_b[0] - phi_a[0];
  for (std::size_t i = 1; i < phi_a.size() && const_diff; ++i)
    if (phi_b[i] - phi_a[i] != d0) const_diff = false;
  if (const_diff) return est;

  std::vector<double> na(phi_a.size()), nb(phi_a.size()), nc(phi_a.size());
  for (std::size_t i = 0; i < phi_a.size(); ++i) {
    na[i] = -phi_a[i];
    nb[i] = -phi_b[i];
    nc[i] = 0.5 * (na[i] + nb[i]);
  }
  const double la = log_mean_exp(na);
  const double lb = log_mean_exp(nb);
  if (!std::isfinite(la) || !std::isfinite(lb))
    throw std::runtime_error("degenerate Hellinger estimate: all importance weights vanish");
  const double lab = log_mean_exp(nc);
  const double R = std::exp(lab - 0.5 * (la + lb));
  double d2 = 1.0 - R;

  // delta-method variance of R = m_g / sqrt(m_a m_b) at (m_a, m_b) = (1, 1)
  std::vector<double> wa(phi_a.size()), wb(phi_a.size()), g(phi_a.size());
  for (std::size_t i = 0; i < phi_a.size(); ++i) {
    wa[i] = std::exp(na[i] - la);
    wb[i] = std::exp(nb[i] - lb);
    g[i] = std::exp(nc[i] - 0.5 * (la + lb));
  }
  const double var_g = covariance(g, R, g, R);
  const double var_a = covariance(wa, 1.0, wa, 1.0);
  const double var_b = covariance(wb, 1.0, wb, 1.0);
  const double cov_ga = covariance(g, R, wa, 1.0);
  const double cov_gb = covariance(g, R, wb, 1.0);
  const double cov_ab = covariance(wa, 1.0, wb, 1.0);
  double var_R = (var_g + 0.25 * R * R * (var_a + var_b) - R * (cov_ga + cov_gb) +
                  0.5 * R * R * cov_ab) /
                 static_cast<double>(M);
  var_R = std::max(var_R, 0.0);
  const double se_d2 = std::sqrt(var_R);

  if (d2 < -1e-12 || d2 > 1.0 + 1e-12) {
    est.clamped = true;
    std::fprintf(stderr, "[metrics] hellinger d^2 = %.3e clamped to [0,1]\n", d2);
  }
  d2 = std::clamp(d2, 0.0, 1.0);
  est.value = std::sqrt(d2);
  est.std_error = est.value > 1e-8 ? se_d2 / (2.0 * est.value) : std::sqrt(se_d2);
  return est;
}

HellingerEstimate hellinger_prior_mc(const PotentialFn& phi_a, const PotentialFn& phi_b,
                                     const PriorParams& prior, std::int64_t N,
                                     std::int64_t M, std::uint64_t seed) {
  if (M < 100) throw std::invalid_argument("hellinger_prior_mc requires M >= 100");
  std::vector<double> pa(M), pb(M);
  parallel_for(M, [&](std::int64_t i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    const CoefVector c = sample_prior(prior, N, rng);
    pa[i] = phi_a(c);
    pb[i] = phi_b(c);
  });
  HellingerEstimate est = hellinger_from_potentials(pa, pb);
  est.shared_seed = seed;
  return est;
}

ConvergenceTable truncation_convergence(const PosteriorSpec& spec,
                                        const std::vector<std::int64_t>& N_list,
                                        std::int64_t M, std::uint64_t seed) {
  spec.validate();
  const std::int64_t n_ref = spec.n_coef;
  for (std::int64_t n : N_list)
    if (n < 1 || n > n_ref)
      throw std::invalid_argument("N_list entries must lie in [1, reference truncation]");
  std::vector<std::int64_t> ns = N_list;
  const std::int64_t n_half = n_ref / 2;
  if (std::find(ns.begin(), ns.end(), n_half) == ns.end()) ns.push_back(n_half);
  ns.push_back(n_ref);

  const std::size_t cols = ns.size();
  std::vector<std::vector<double>> phi(cols, std::vector<double>(M));
  parallel_for(M, [&](std::int64_t i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    const CoefVector c = sample_prior(spec.prior, n_ref, rng);
    for (std::size_t k = 0; k < cols; ++k) {
      CoefVector ck(c.begin(), c.begin() + ns[k]);
      const std::vector<double> G = spec.forward(ck);
      phi[k][i] = gaussian_potential(spec.obs, *spec.obs.y, G);
    }
  });

  ConvergenceTable table;
  table.n_ref = n_ref;
  const std::vector<double>& phi_ref = phi[cols - 1];
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < N_list.size(); ++k) {
    HellingerEstimate est = hellinger_from_potentials(phi_ref, phi[k]);
    est.shared_seed = seed;
    table.rows.push_back({N_list[k], est.value, est.std_error});
    xs.push_back(static_cast<double>(N_list[k]));
    ys.push_back(est.value);
  }
  // proxy bias: distance between the half-reference and the reference
  for (std::size_t k = 0; k < cols - 1; ++k)
    if (ns[k] == n_half)
      table.proxy_bias = hellinger_from_potentials(phi_ref, phi[k]).value;
  table.slope = loglog_slope(xs, ys);
  return table;
}

LipschitzTable data_lipschitz(const PosteriorSpec& spec, const std::vector<double>& deltas,
                              const std::vector<double>& direction, std::int64_t M,
                              std::uint64_t seed) {
  spec.validate();
  const std::size_t K = spec.obs.num_obs();
  if (direction.size() != K) throw std::invalid_argument("direction must be a K-vector");
  double pos_min = std::numeric_limits<double>::infinity(), pos_max = 0.0;
  for (double d : deltas)
    if (d > 0.0) {
      pos_min = std::min(pos_min, d);
      pos_max = std::max(pos_max, d);
    }
  if (!(pos_max >= 10.0 * pos_min))
    throw std::invalid_argument("perturbation deltas must span at least a decade");

  double nrm = 0.0;
  for (double v : direction) nrm += v * v;
  nrm = std::sqrt(nrm);
  if (nrm == 0.0) throw std::invalid_argument("direction must be nonzero");
  std::vector<double> e(direction);
  for (double& v : e) v /= nrm;

  // one forward solve per draw, shared across all perturbed data vectors
  std::vector<std::vector<double>> G(M);
  parallel_for(M, [&](std::int64_t i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    G[i] = spec.forward(sample_prior(spec.prior, spec.n_coef, rng));
  });

  const std::vector<double>& y = *spec.obs.y;
  auto potentials_for = [&](const std::vector<double>& yy) {
    std::vector<double> phi(M);
    for (std::int64_t i = 0; i < M; ++i) phi[i] = gaussian_potential(spec.obs, yy, G[i]);
    return phi;
  };
  const std::vector<double> phi_base = potentials_for(y);

  LipschitzTable table;
  std::vector<double> xs, ys;
  for (double delta : deltas) {
    std::vector<double> yy(y);
    for (std::size_t j = 0; j < K; ++j) yy[j] += delta * e[j];
    HellingerEstimate est = hellinger_from_potentials(phi_base, potentials_for(yy));
    est.shared_seed = seed;
    const double ratio = delta > 0.0 ? est.value / delta : 0.0;
    table.rows.push_back({delta, est.value, est.std_error, ratio});
    table.max_ratio = std::max(table.max_ratio, ratio);
    if (delta > 0.0 && est.value > 0.0) {
      xs.push_back(delta);
      ys.push_back(est.value);
    }
  }
  table.slope = loglog_slope(xs, ys);
  return table;
}

std::vector<MgfRow> empirical_mgf(const PriorParams& prior, double t,
                                  const std::vector<double>& alpha_list, std::int64_t N,
                                  std::int64_t M, std::uint64_t seed) {
  prior.validate();
  const double gap = prior.s - static_cast<double>(prior.dim) / prior.q;
  if (!(t < gap))
    throw std::invalid_argument("empirical_mgf requires t < s - d/q");
  std::vector<double> norms(M);
  parallel_for(M, [&](std::int64_t i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    norms[i] = norm_Ct_proxy(sample_prior(prior, N, rng), t, prior);
  });

  std::vector<MgfRow> rows;
  const std::int64_t ckpt = std::max<std::int64_t>(1, M / 100);
  for (double alpha : alpha_list) {
    MgfRow row;
    row.alpha = alpha;
    double rm = 0.0, rm_half = 0.0;
    for (std::int64_t i = 0; i < M; ++i) {
      rm += (std::exp(alpha * norms[i]) - rm) / static_cast<double>(i + 1);
      if (i + 1 == M / 2) rm_half = rm;
      if ((i + 1) % ckpt == 0 || i + 1 == M)
        row.trajectory.emplace_back(i + 1, rm);
    }
    row.mean = rm;
    row.half_drift = rm != 0.0 ? std::abs(rm - rm_half) / std::abs(rm) : 0.0;
    row.stable = row.half_drift < 0.05;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<DichotomyRow> prop22_dichotomy(const PriorParams& prior,
                                           const std::vector<double>& t_list,
                                           const std::vector<std::int64_t>& N_list,
                                           std::int64_t M, std::uint64_t seed) {
  prior.validate();
  std::vector<std::int64_t> ns = N_list;
  std::sort(ns.begin(), ns.end());
  const std::int64_t n_max = ns.back();
  const std::size_t nt = t_list.size(), nn = ns.size();
  // per-draw truncated norms, one slot per (t, N)
  std::vector<std::vector<double>> vals(nt * nn, std::vector<double>(M));
  const double q = prior.q, dd = static_cast<double>(prior.dim);
  parallel_for(M, [&](std::int64_t i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    const CoefVector c = sample_prior(prior, n_max, rng);
    for (std::size_t ti = 0; ti < nt; ++ti) {
      double acc = 0.0;
      std::size_t ni = 0;
      for (std::int64_t l = 1; l <= n_max && ni < nn; ++l) {
        acc += std::pow(static_cast<double>(l), t_list[ti] * q / dd + q / 2.0 - 1.0) *
               std::pow(std::abs(c[l - 1]), q);
        if (l == ns[ni]) {
          vals[ti * nn + ni][i] = std::pow(acc, 1.0 / q);
          ++ni;
        }
      }
    }
  });

  std::vector<DichotomyRow> rows;
  for (std::size_t ti = 0; ti < nt; ++ti)
    for (std::size_t ni = 0; ni < nn; ++ni) {
      std::vector<double>& v = vals[ti * nn + ni];
      std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
      rows.push_back({t_list[ti], ns[ni], v[v.size() / 2]});
    }
  return rows;
}

WeakErrorReport weak_errors(const PriorParams& prior, const EllipticProblem& prob,
                            const ChainSummary& chain_ref, const ChainSummary& chain_n,
                            std::int64_t n) {
  WeakErrorReport rep;
  rep.converged_inputs = !chain_ref.acceptance_warning && !chain_n.acceptance_warning;
  if (!rep.converged_inputs)
    std::fprintf(stderr, "[metrics] weak_errors: chain acceptance outside [0.1,0.5]\n");

  auto field_moments = [&](const std::vector<CoefVector>& samples, std::int64_t trunc,
                           std::vector<double>& mean, std::vector<double>& var) {
    const std::int64_t S = static_cast<std::int64_t>(samples.size());
    const std::int64_t cells = pow_int(prob.n_per_axis, prob.dim);
    std::vector<std::vector<double>> fields(S);
    parallel_for(S, [&](std::int64_t i) {
      CoefVector c = samples[i];
      if (trunc > 0 && static_cast<std::int64_t>(c.size()) > trunc) c.resize(trunc);
      GridFunction u = synthesize(c, prior.basis, prob.n_per_axis);
      fields[i] = solve_elliptic(u, prob).values;
    });
    mean.assign(cells, 0.0);
    var.assign(cells, 0.0);
    for (std::int64_t i = 0; i < S; ++i)
      for (std::int64_t j = 0; j < cells; ++j) mean[j] += fields[i][j];
    for (double& m : mean) m /= static_cast<double>(S);
    for (std::int64_t i = 0; i < S; ++i)
      for (std::int64_t j = 0; j < cells; ++j) {
        const double dlt = fields[i][j] - mean[j];
        var[j] += dlt * dlt;
      }
    for (double& v : var) v /= static_cast<double>(S);
  };

  std::vector<double> mean_ref, var_ref, mean_n, var_n;
  field_moments(chain_ref.samples, 0, mean_ref, var_ref);
  field_moments(chain_n.samples, n, mean_n, var_n);

  std::size_t argmax = 0;
  for (std::size_t j = 0; j < mean_ref.size(); ++j) {
    const double gap = std::abs(mean_ref[j] - mean_n[j]);
    if (gap > rep.mean_sup_error) {
      rep.mean_sup_error = gap;
      argmax = j;
    }
    rep.cov_diag_sup_error =
        std::max(rep.cov_diag_sup_error, std::abs(var_ref[j] - var_n[j]));
  }
  const double s_ref = static_cast<double>(chain_ref.samples.size());
  const double s_n = static_cast<double>(chain_n.samples.size());
  rep.mean_sup_std_error = std::sqrt(var_ref[argmax] / s_ref + var_n[argmax] / s_n);
  return rep;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) return 0.0;
  const double mm = static_cast<double>(m);
  return (mm * sxy - sx * sy) / (mm * sxx - sx * sx);
}

}  // namespace besov
