#include "besov/forward.hpp"

#include <cmath>
#include <numeric>

namespace besov {

EllipticProblem EllipticProblem::zero_source(int dim, int n_per_axis) {
  EllipticProblem prob;
  prob.dim = dim;
  prob.n_per_axis = n_per_axis;
  prob.f = GridFunction(dim, n_per_axis);
  return prob;
}

void EllipticProblem::validate() const {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("elliptic solver ships d in {1,2} only");
  GridFunction probe(dim, n_per_axis);  // checks power-of-two resolution
  f.validate();
  if (f.dim != dim || f.n_per_axis != n_per_axis)
    throw std::invalid_argument("source f resolution mismatch");
  if (!g.empty()) {
    if (static_cast<int>(g.size()) != dim)
      throw std::invalid_argument("vector source g needs one component per axis");
    for (const auto& gc : g) {
      gc.validate();
      if (gc.dim != dim || gc.n_per_axis != n_per_axis)
        throw std::invalid_argument("source g resolution mismatch");
    }
  }
  if (solver_tol <= 0.0) throw std::invalid_argument("solver_tol must be positive");
}

ObservationSetup ObservationSetup::iso(int dim, std::vector<std::array<double, 3>> points,
                                       double sigma) {
  ObservationSetup obs;
  obs.dim = dim;
  obs.points = std::move(points);
  const std::size_t K = obs.points.size();
  obs.gamma.assign(K * K, 0.0);
  for (std::size_t j = 0; j < K; ++j) obs.gamma[j * K + j] = sigma * sigma;
  return obs;
}

void ObservationSetup::validate() const {
  const std::size_t K = points.size();
  if (K < 1) throw std::invalid_argument("need at least one observation point");
  for (const auto& x : points)
    for (int a = 0; a < dim; ++a)
      if (!(x[a] > 0.0 && x[a] <= 1.0))
        throw std::invalid_argument("observation point outside (0,1]^d");
  if (gamma.size() != K * K) throw std::invalid_argument("gamma must be K x K");
  chol_.clear();  // gamma may have changed since the factor was cached
  chol();         // SPD check
  if (y && y->size() != K) throw std::invalid_argument("data y must have K entries");
}

const std::vector<double>& ObservationSetup::chol() const {
  const std::size_t K = points.size();
  if (chol_.size() == K * K && K > 0) return chol_;
  std::vector<double> L(K * K, 0.0);
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = gamma[i * K + j];
      for (std::size_t k = 0; k < j; ++k) s -= L[i * K + k] * L[j * K + k];
      if (i == j) {
        if (s <= 0.0)
          throw std::invalid_argument("noise covariance gamma is not positive definite");
        L[i * K + i] = std::sqrt(s);
      } else {
        L[i * K + j] = s / L[j * K + j];
      }
    }
  }
  chol_ = std::move(L);
  return chol_;
}

std::vector<double> ObservationSetup::whiten(const std::vector<double>& v) const {
  const std::size_t K = points.size();
  const auto& L = chol();
  std::vector<double> w(K);
  for (std::size_t i = 0; i < K; ++i) {
    double s = v[i];
    for (std::size_t k = 0; k < i; ++k) s -= L[i * K + k] * w[k];
    w[i] = s / L[i * K + i];
  }
  return w;
}

namespace {

inline std::int64_t wrap(std::int64_t i, std::int64_t n) { return (i + n) % n; }

// harmonic mean of the permeability across a face
inline double face_coef(double a, double b) { return 2.0 / (1.0 / a + 1.0 / b); }

struct Stencil {
  int dim;
  std::int64_t n;
  std::vector<double> a;  // e^u per cell

  double coef(std::int64_t i, std::int64_t j) const { return face_coef(a[i], a[j]); }
};

void apply_op(const Stencil& st, const std::vector<double>& p, std::vector<double>& out) {
  const std::int64_t n = st.n;
  const double inv_h2 = static_cast<double>(n) * static_cast<double>(n);
  if (st.dim == 1) {
    for (std::int64_t i = 0; i < n; ++i) {
      const std::int64_t ip = wrap(i + 1, n), im = wrap(i - 1, n);
      out[i] = inv_h2 * (st.coef(i, ip) * (p[i] - p[ip]) + st.coef(i, im) * (p[i] - p[im]));
    }
  } else {
    for (std::int64_t j = 0; j < n; ++j) {
      const std::int64_t jp = wrap(j + 1, n) * n, jm = wrap(j - 1, n) * n, j0 = j * n;
      for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t c = j0 + i;
        const std::int64_t e = j0 + wrap(i + 1, n), w = j0 + wrap(i - 1, n);
        const std::int64_t no = jp + i, so = jm + i;
        out[c] = inv_h2 * (st.coef(c, e) * (p[c] - p[e]) + st.coef(c, w) * (p[c] - p[w]) +
                           st.coef(c, no) * (p[c] - p[no]) + st.coef(c, so) * (p[c] - p[so]));
      }
    }
  }
}

void diag_op(const Stencil& st, std::vector<double>& diag) {
  const std::int64_t n = st.n;
  const double inv_h2 = static_cast<double>(n) * static_cast<double>(n);
  if (st.dim == 1) {
    for (std::int64_t i = 0; i < n; ++i)
      diag[i] = inv_h2 * (st.coef(i, wrap(i + 1, n)) + st.coef(i, wrap(i - 1, n)));
  } else {
    for (std::int64_t j = 0; j < n; ++j)
      for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t c = j * n + i;
        diag[c] = inv_h2 * (st.coef(c, j * n + wrap(i + 1, n)) +
                            st.coef(c, j * n + wrap(i - 1, n)) +
                            st.coef(c, wrap(j + 1, n) * n + i) +
                            st.coef(c, wrap(j - 1, n) * n + i));
      }
  }
}

void subtract_mean(std::vector<double>& v) {
  double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= m;
}

}  // namespace

GridFunction elliptic_rhs(const EllipticProblem& prob) {
  GridFunction b = prob.f;
  if (prob.g.empty()) return b;
  const std::int64_t n = prob.n_per_axis;
  const double inv_h = static_cast<double>(n);
  // div g with centered face differences; faces carry the average of the
  // two adjacent cell values, so (g_{i+1/2} - g_{i-1/2})/h telescopes to
  // (g_{i+1} - g_{i-1}) / (2h).
  if (prob.dim == 1) {
    const auto& g = prob.g[0].values;
    for (std::int64_t i = 0; i < n; ++i)
      b.values[i] += 0.5 * inv_h * (g[wrap(i + 1, n)] - g[wrap(i - 1, n)]);
  } else {
    const auto& gx = prob.g[0].values;
    const auto& gy = prob.g[1].values;
    for (std::int64_t j = 0; j < n; ++j)
      for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t c = j * n + i;
        b.values[c] += 0.5 * inv_h *
                       (gx[j * n + wrap(i + 1, n)] - gx[j * n + wrap(i - 1, n)] +
                        gy[wrap(j + 1, n) * n + i] - gy[wrap(j - 1, n) * n + i]);
      }
  }
  return b;
}

GridFunction apply_elliptic_operator(const GridFunction& u, const GridFunction& p) {
  if (u.dim != p.dim || u.n_per_axis != p.n_per_axis)
    throw std::invalid_argument("operator: u and p resolution mismatch");
  Stencil st{u.dim, u.n_per_axis, {}};
  st.a.resize(u.values.size());
  for (std::size_t i = 0; i < u.values.size(); ++i) st.a[i] = std::exp(u.values[i]);
  GridFunction out(p.dim, p.n_per_axis);
  apply_op(st, p.values, out.values);
  return out;
}

GridFunction solve_elliptic(const GridFunction& u, const EllipticProblem& prob) {
  prob.validate();
  if (u.dim != prob.dim || u.n_per_axis != prob.n_per_axis)
    throw std::invalid_argument("log-permeability resolution mismatch");
  for (double v : u.values)
    if (!std::isfinite(v)) throw std::invalid_argument("log-permeability has non-finite values");

  GridFunction bgrid = elliptic_rhs(prob);
  std::vector<double>& b = bgrid.values;
  const double bmean = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(b.size());
  const double bscale = std::max(1.0, bgrid.max_abs());
  if (std::abs(bmean) > 1e-10 * bscale)
    throw std::invalid_argument("right-hand side must have zero mean (periodic solvability)");
  subtract_mean(b);  // remove round-off component of the kernel direction

  Stencil st{prob.dim, prob.n_per_axis, {}};
  st.a.resize(u.values.size());
  for (std::size_t i = 0; i < u.values.size(); ++i) st.a[i] = std::exp(u.values[i]);

  const std::size_t m = b.size();
  std::vector<double> diag(m);
  diag_op(st, diag);

  std::vector<double> p(m, 0.0), r = b, z(m), q(m);
  double bnorm = 0.0;
  for (double v : b) bnorm += v * v;
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) {
    GridFunction out(prob.dim, prob.n_per_axis);
    return out;
  }

  auto precond = [&](const std::vector<double>& rr, std::vector<double>& zz) {
    for (std::size_t i = 0; i < m; ++i) zz[i] = rr[i] / diag[i];
    subtract_mean(zz);
  };

  precond(r, z);
  std::vector<double> dir = z;
  double rz = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
  const int cap = prob.max_iter_factor * prob.n_per_axis;
  double resid = 1.0;
  for (int it = 0; it < cap; ++it) {
    apply_op(st, dir, q);
    const double dq = std::inner_product(dir.begin(), dir.end(), q.begin(), 0.0);
    const double alpha = rz / dq;
    for (std::size_t i = 0; i < m; ++i) {
      p[i] += alpha * dir[i];
      r[i] -= alpha * q[i];
    }
    double rn = 0.0;
    for (double v : r) rn += v * v;
    resid = std::sqrt(rn) / bnorm;
    if (resid <= prob.solver_tol) {
      subtract_mean(p);
      GridFunction out(prob.dim, prob.n_per_axis);
      out.values = std::move(p);
      return out;
    }
    precond(r, z);
    const double rz_new = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < m; ++i) dir[i] = z[i] + beta * dir[i];
  }
  throw SolverFailure(resid);
}

std::vector<double> observe(const GridFunction& p, const ObservationSetup& obs) {
  p.validate();
  if (obs.dim != p.dim) throw std::invalid_argument("observation dimension mismatch");
  const std::int64_t n = p.n_per_axis;
  const double nn = static_cast<double>(n);
  std::vector<double> out;
  out.reserve(obs.points.size());
  for (const auto& x : obs.points) {
    // values live at cell centers (i + 1/2)/n; periodic multilinear
    std::array<std::int64_t, 3> i0{0, 0, 0};
    std::array<double, 3> w{0.0, 0.0, 0.0};
    for (int a = 0; a < p.dim; ++a) {
      const double t = x[a] * nn - 0.5;
      const double fl = std::floor(t);
      i0[a] = static_cast<std::int64_t>(fl);
      w[a] = t - fl;
    }
    double acc = 0.0;
    const int corners = 1 << p.dim;
    for (int c = 0; c < corners; ++c) {
      std::array<std::int64_t, 3> cell{0, 0, 0};
      double weight = 1.0;
      for (int a = 0; a < p.dim; ++a) {
        const int bit = (c >> a) & 1;
        cell[a] = i0[a] + bit;
        weight *= bit ? w[a] : (1.0 - w[a]);
      }
      acc += weight * p.values[p.flat(cell)];
    }
    out.push_back(acc);
  }
  return out;
}

std::vector<double> forward_G(const CoefVector& c, const PriorParams& p,
                              const EllipticProblem& prob, const ObservationSetup& obs,
                              std::optional<std::int64_t> truncation) {
  CoefVector cc = c;
  if (truncation && static_cast<std::int64_t>(cc.size()) > *truncation)
    cc.resize(*truncation);
  GridFunction u = synthesize(cc, p.basis, prob.n_per_axis);
  GridFunction press = solve_elliptic(u, prob);
  return observe(press, obs);
}

}  // namespace besov
