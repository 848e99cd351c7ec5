#include "jkolab/ot1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace jkolab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Piecewise-linear CDF of a cellwise-constant density, normalized to end at 1.
struct PlCdf {
  ArrayXd edges;  // n+1
  ArrayXd F;      // n+1, F[0] = 0, F[n] = 1

  double rank(double x) const {
    const int n = static_cast<int>(edges.size()) - 1;
    if (x <= edges[0]) return 0.0;
    if (x >= edges[n]) return 1.0;
    const double h = edges[1] - edges[0];
    int i = std::clamp(static_cast<int>((x - edges[0]) / h), 0, n - 1);
    while (x < edges[i]) --i;
    while (x > edges[i + 1]) ++i;
    return F[i] + (F[i + 1] - F[i]) * (x - edges[i]) / h;
  }

  // Left-continuous inverse: smallest x with F(x) >= s.
  double inverse(double s) const {
    const int n = static_cast<int>(edges.size()) - 1;
    s = std::clamp(s, 0.0, 1.0);
    // First i with F[i+1] >= s.
    int lo = 0, hi = n - 1;
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (F[mid + 1] >= s)
        hi = mid;
      else
        lo = mid + 1;
    }
    const double df = F[lo + 1] - F[lo];
    if (df <= 1e-300) return edges[lo];
    const double h = edges[1] - edges[0];
    return std::clamp(edges[lo] + (s - F[lo]) * h / df, edges[lo], edges[lo + 1]);
  }
};

PlCdf make_cdf(const GridDensity& rho) {
  const Grid& g = rho.grid;
  const int n = g.n[0];
  PlCdf c;
  c.edges.resize(n + 1);
  c.F.resize(n + 1);
  c.F[0] = 0.0;
  for (int i = 0; i <= n; ++i) c.edges[i] = g.edge(0, i);
  for (int i = 0; i < n; ++i) c.F[i + 1] = c.F[i] + rho.values[i] * g.h[0];
  if (!(c.F[n] > 0.0)) throw std::invalid_argument("density has no mass");
  c.F /= c.F[n];
  c.F[n] = 1.0;
  return c;
}

ArrayXd sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  ArrayXd out(static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

// Cumulative trapezoid of a piecewise-linear function given at knots; exact.
ArrayXd prefix_trapezoid(const ArrayXd& x, const ArrayXd& f) {
  ArrayXd P(x.size());
  P[0] = 0.0;
  for (Eigen::Index k = 0; k + 1 < x.size(); ++k)
    P[k + 1] = P[k] + 0.5 * (f[k] + f[k + 1]) * (x[k + 1] - x[k]);
  return P;
}

// Integral from knots_x[0] to xq of the PL function (knots_x, f), using the
// precomputed prefix P.
double integral_to(const ArrayXd& knots_x, const ArrayXd& f, const ArrayXd& P,
                   double xq) {
  const Eigen::Index nk = knots_x.size();
  if (xq <= knots_x[0]) return 0.0;
  if (xq >= knots_x[nk - 1]) return P[nk - 1];
  Eigen::Index lo = 0, hi = nk - 1;
  while (lo + 1 < hi) {
    const Eigen::Index mid = (lo + hi) / 2;
    if (knots_x[mid] <= xq)
      lo = mid;
    else
      hi = mid;
  }
  const double dx = knots_x[lo + 1] - knots_x[lo];
  double fq = f[lo];
  if (dx > 0.0) fq = f[lo] + (f[lo + 1] - f[lo]) * (xq - knots_x[lo]) / dx;
  return P[lo] + 0.5 * (f[lo] + fq) * (xq - knots_x[lo]);
}

void require_same_line_grid(const GridDensity& a, const GridDensity& b) {
  if (a.grid.dim() != 1) throw std::invalid_argument("1D transport needs 1D grids");
  if (!a.grid.same_layout(b.grid))
    throw std::invalid_argument("densities must share one grid");
}

double wrapped_dist(double a, double b, double period) {
  double d = std::abs(a - b);
  d -= std::floor(d / period) * period;
  return std::min(d, period - d);
}

}  // namespace

TransportMap1D monotone_map(const GridDensity& rho, const GridDensity& mu) {
  require_same_line_grid(rho, mu);
  if (rho.grid.domain.is_periodic())
    throw std::invalid_argument("use circle_ot on periodic grids");
  const Grid& g = rho.grid;
  const int n = g.n[0];
  PlCdf Fr = make_cdf(rho);
  PlCdf Fm = make_cdf(mu);

  std::vector<double> xs;
  xs.reserve(static_cast<size_t>(3 * n + 2));
  for (int i = 0; i <= n; ++i) xs.push_back(Fr.edges[i]);
  for (int i = 0; i <= n; ++i) xs.push_back(Fr.inverse(Fm.F[i]));
  for (int i = 0; i < n; ++i) xs.push_back(g.center(0, i));
  ArrayXd kx = sorted_unique(std::move(xs));

  ArrayXd kt(kx.size());
  for (Eigen::Index k = 0; k < kx.size(); ++k) kt[k] = Fm.inverse(Fr.rank(kx[k]));

  ArrayXd image(n);
  for (int i = 0; i < n; ++i) image[i] = Fm.inverse(Fr.rank(g.center(0, i)));
  return TransportMap1D{g, image, kx, kt};
}

PotentialPair brenier_potential_from_map(const TransportMap1D& map) {
  const Grid& g = map.source;
  const int n = g.size;
  for (Eigen::Index k = 0; k + 1 < map.knots_t.size(); ++k)
    if (map.knots_t[k + 1] < map.knots_t[k] - 1e-12)
      throw std::invalid_argument("transport map is not monotone");
  ArrayXd P = prefix_trapezoid(map.knots_x, map.knots_t);
  PotentialPair out;
  out.u.resize(n);
  out.psi.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = g.center(0, i);
    out.u[i] = integral_to(map.knots_x, map.knots_t, P, x);
    out.psi[i] = 0.5 * x * x - out.u[i];
  }
  out.phi = c_transform(out.psi, g);
  out.v.resize(n);
  for (int i = 0; i < n; ++i) {
    const double y = g.center(0, i);
    out.v[i] = 0.5 * y * y - out.phi[i];
  }
  return out;
}

ArrayXd c_transform(const ArrayXd& psi, const Grid& grid) {
  const int n = grid.size;
  if (grid.dim() != 1) throw std::invalid_argument("c_transform is 1D only");
  if (static_cast<int>(psi.size()) != n)
    throw std::invalid_argument("psi size does not match grid");
  ArrayXd phi(n);
  for (int j = 0; j < n; ++j) phi[j] = c_transform_at(psi, grid, grid.center(0, j));
  return phi;
}

double c_transform_at(const ArrayXd& psi, const Grid& grid, double y) {
  const int n = grid.size;
  const bool per = grid.domain.is_periodic();
  const double L = grid.domain.length(0);
  double best = kInf;
  for (int i = 0; i < n; ++i) {
    const double x = grid.center(0, i);
    const double d = per ? wrapped_dist(x, y, L) : x - y;
    best = std::min(best, 0.5 * d * d - psi[i]);
  }
  return best;
}

double transport_cost_matrix(const MatrixXd& cost, const VectorXd& a, const VectorXd& b) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  if (cost.rows() != n || cost.cols() != m)
    throw std::invalid_argument("cost matrix shape mismatch");
  if ((a.array() < 0).any() || (b.array() < 0).any())
    throw std::invalid_argument("negative masses");
  const double total = a.sum();
  if (std::abs(total - b.sum()) > 1e-9 * std::max(1.0, total))
    throw std::invalid_argument("marginal masses differ");

  VectorXd rem_a = a, rem_b = b * (total / b.sum());
  MatrixXd gamma = MatrixXd::Zero(n, m);
  const double mass_floor = 1e-15 * std::max(1.0, total);
  const int V = n + m;

  // Successive shortest paths with node potentials: reduced arc costs stay
  // nonnegative (clamped against fp noise), so each search is a plain
  // Dijkstra and the parent pointers always form a tree.
  std::vector<double> pot(V, 0.0), dist(V);
  std::vector<int> par(V);  // parent node, -1 = path root (a source)
  std::vector<char> done(V);

  for (int iter = 0; iter < 100000; ++iter) {
    for (int v = 0; v < V; ++v) {
      par[v] = -2;
      dist[v] = kInf;
      done[v] = 0;
    }
    bool any_root = false;
    for (int i = 0; i < n; ++i)
      if (rem_a[i] > mass_floor) {
        dist[i] = 0.0;
        par[i] = -1;
        any_root = true;
      }
    if (!any_root) break;
    for (int step = 0; step < V; ++step) {
      int u = -1;
      for (int v = 0; v < V; ++v)
        if (!done[v] && dist[v] < kInf && (u < 0 || dist[v] < dist[u])) u = v;
      if (u < 0) break;
      done[u] = 1;
      if (u < n) {
        for (int j = 0; j < m; ++j) {
          if (done[n + j]) continue;
          const double rc = std::max(0.0, cost(u, j) + pot[u] - pot[n + j]);
          if (dist[u] + rc < dist[n + j]) {
            dist[n + j] = dist[u] + rc;
            par[n + j] = u;
          }
        }
      } else {
        const int j = u - n;
        for (int i = 0; i < n; ++i) {
          if (done[i] || gamma(i, j) <= 0.0) continue;
          const double rc = std::max(0.0, -cost(i, j) + pot[u] - pot[i]);
          if (dist[u] + rc < dist[i]) {
            dist[i] = dist[u] + rc;
            par[i] = u;
          }
        }
      }
    }
    int best_j = -1;
    for (int j = 0; j < m; ++j)
      if (rem_b[j] > mass_floor && dist[n + j] < kInf &&
          (best_j < 0 || dist[n + j] < dist[n + best_j]))
        best_j = j;
    if (best_j < 0) break;
    for (int v = 0; v < V; ++v)
      if (dist[v] < kInf) pot[v] += dist[v];

    // Trace the path back to a root source, find the bottleneck.
    double push = rem_b[best_j];
    int v = n + best_j;
    while (par[v] != -1) {
      const int p = par[v];
      if (v >= n) {
        // arc p -> v is forward: unbounded
      } else {
        push = std::min(push, gamma(v, p - n));
      }
      v = p;
    }
    push = std::min(push, rem_a[v]);
    if (push <= mass_floor) break;

    v = n + best_j;
    while (par[v] != -1) {
      const int p = par[v];
      if (v >= n)
        gamma(p, v - n) += push;
      else
        gamma(v, p - n) -= push;
      v = p;
    }
    rem_a[v] -= push;
    rem_b[best_j] -= push;
  }
  return (gamma.array() * cost.array()).sum();
}

namespace {

template <typename AtomT, typename DistSq>
double w2_atoms(const std::vector<AtomT>& a, const std::vector<AtomT>& b, DistSq d2) {
  if (a.size() > 32 || b.size() > 32)
    throw std::invalid_argument("brute-force W2 capped at 32 atoms");
  if (a.empty() || b.empty()) throw std::invalid_argument("empty atom list");
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  VectorXd wa(n), wb(m);
  MatrixXd C(n, m);
  for (int i = 0; i < n; ++i) {
    if (!(a[i].w > 0.0)) throw std::invalid_argument("atom weights must be positive");
    wa[i] = a[i].w;
  }
  for (int j = 0; j < m; ++j) {
    if (!(b[j].w > 0.0)) throw std::invalid_argument("atom weights must be positive");
    wb[j] = b[j].w;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) C(i, j) = d2(a[i].x, b[j].x);
  return std::sqrt(std::max(0.0, transport_cost_matrix(C, wa, wb)));
}

}  // namespace

double w2_bruteforce(const std::vector<Atom>& a, const std::vector<Atom>& b) {
  return w2_atoms(a, b, [](double x, double y) { return (x - y) * (x - y); });
}

double w2_bruteforce_torus1(const std::vector<Atom>& a, const std::vector<Atom>& b,
                            double period) {
  return w2_atoms(a, b, [period](double x, double y) {
    const double d = wrapped_dist(x, y, period);
    return d * d;
  });
}

double w2_bruteforce_2d(const std::vector<Atom2>& a, const std::vector<Atom2>& b) {
  return w2_atoms(a, b, [](const Vector2d& x, const Vector2d& y) {
    return (x - y).squaredNorm();
  });
}

double w2_bruteforce_torus2(const std::vector<Atom2>& a, const std::vector<Atom2>& b,
                            double period) {
  return w2_atoms(a, b, [period](const Vector2d& x, const Vector2d& y) {
    const double d0 = wrapped_dist(x[0], y[0], period);
    const double d1 = wrapped_dist(x[1], y[1], period);
    return d0 * d0 + d1 * d1;
  });
}

namespace {

// Lifted quantile interpolant of a circle measure: increasing PL function on
// all of R with Q(s+1) = Q(s) + L.
struct LiftedQuantile {
  ArrayXd q;  // samples at ranks (j+1/2)/N
  double L;

  double operator()(double s) const {
    const int N = static_cast<int>(q.size());
    const double r0 = 0.5 / N;
    const double k = std::floor(s - r0);
    const double frac = s - k;  // in [r0, r0+1)
    int j = std::clamp(static_cast<int>(std::floor((frac - r0) * N)), 0, N - 1);
    double sa = r0 + static_cast<double>(j) / N;
    double qa = q[j], qb;
    if (j + 1 < N)
      qb = q[j + 1];
    else
      qb = q[0] + L;  // wrap segment up to rank r0 + 1
    const double t = (frac - sa) * N;
    return qa + (qb - qa) * t + k * L;
  }
};

}  // namespace

CircleOtResult circle_ot(const GridDensity& rho, const GridDensity& mu, int N) {
  require_same_line_grid(rho, mu);
  if (!rho.grid.domain.is_periodic())
    throw std::invalid_argument("circle_ot needs a periodic grid");
  const Grid& g = rho.grid;
  const int n = g.n[0];
  if (N <= 0) N = 4 * n;
  const double L = g.domain.length(0);

  const ArrayXd qr = density_to_quantile(rho, N).samples;
  LiftedQuantile qm{density_to_quantile(mu, N).samples, L};

  ArrayXd ranks(N);
  for (int j = 0; j < N; ++j) ranks[j] = (j + 0.5) / N;

  auto mean_sq = [&](double c) {
    double s = 0.0;
    for (int j = 0; j < N; ++j) {
      const double d = qr[j] - qm(ranks[j] - c);
      s += d * d;
    }
    return s / N;
  };
  auto mean_disp = [&](double c) {
    double s = 0.0;
    for (int j = 0; j < N; ++j) s += qr[j] - qm(ranks[j] - c);
    return s / N;
  };

  // Center the search where the mean displacement vanishes (it is increasing
  // in the offset, gaining L per unit).
  double lo = -2.0, hi = 2.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mean_disp(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double c_center = 0.5 * (lo + hi);

  const int kScan = 256;
  double best_c = c_center, best_v = mean_sq(c_center);
  for (int i = 0; i <= kScan; ++i) {
    const double c = c_center - 0.5 + static_cast<double>(i) / kScan;
    const double v = mean_sq(c);
    if (v < best_v) {
      best_v = v;
      best_c = c;
    }
  }
  {
    double a = best_c - 1.0 / kScan, b = best_c + 1.0 / kScan;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = mean_sq(x1), f2 = mean_sq(x2);
    for (int it = 0; it < 120; ++it) {
      if (f1 > f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = mean_sq(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = mean_sq(x1);
      }
    }
    const double c_ref = 0.5 * (a + b);
    if (mean_sq(c_ref) < best_v) best_c = c_ref;
  }

  // Assemble the map x -> Qmu(F_rho(x) - c) on the fundamental interval.
  PlCdf Fr = make_cdf(rho);
  std::vector<double> xs;
  xs.reserve(static_cast<size_t>(3 * n + N + 2));
  for (int i = 0; i <= n; ++i) xs.push_back(Fr.edges[i]);
  for (int i = 0; i < n; ++i) xs.push_back(g.center(0, i));
  for (int j = 0; j < N; ++j) {
    double r = ranks[j] + best_c;
    r -= std::floor(r);
    if (r > 0.0 && r < 1.0) xs.push_back(Fr.inverse(r));
  }
  ArrayXd kx = sorted_unique(std::move(xs));
  ArrayXd kt(kx.size());
  for (Eigen::Index k = 0; k < kx.size(); ++k) kt[k] = qm(Fr.rank(kx[k]) - best_c);

  // psi' = x - T(x); distribute the circulation defect so psi is periodic.
  ArrayXd integrand = kx - kt;
  ArrayXd P = prefix_trapezoid(kx, integrand);
  const double defect = P[P.size() - 1];
  PotentialPair pot;
  pot.psi.resize(n);
  pot.u.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = g.center(0, i);
    const double raw = integral_to(kx, integrand, P, x);
    pot.psi[i] = raw - defect * (x - g.domain.lo[0]) / L;
    pot.u[i] = 0.5 * x * x - pot.psi[i];
  }
  pot.phi = c_transform(pot.psi, g);
  pot.v.resize(n);
  for (int i = 0; i < n; ++i) {
    const double y = g.center(0, i);
    pot.v[i] = 0.5 * y * y - pot.phi[i];
  }

  ArrayXd image(n);
  for (int i = 0; i < n; ++i) image[i] = qm(Fr.rank(g.center(0, i)) - best_c);

  CircleOtResult res;
  res.map = TransportMap1D{g, image, kx, kt};
  res.potentials = pot;
  res.cost = 0.5 * mean_sq(best_c);
  res.cut = best_c;
  res.periodic_defect = std::abs(defect);
  return res;
}

}  // namespace jkolab
