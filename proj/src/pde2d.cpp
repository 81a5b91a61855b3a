#include "layerlab/pde2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace layerlab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Q1 discretization of F on the boundary-fitted map
//   x(rho, theta) = (p rho cos theta, q rho sin theta),
// 2x2 Gauss quadrature per cell, with a cell-centered closure at the origin
// (inner cap of radius rho_0, where the field is exponentially flat).
struct Mesh {
  double p = 1.0, q = 1.0;
  std::vector<double> rho;    // ascending, back() == 1
  std::vector<double> theta;  // uniform [0, 2pi)
  int nr = 0, nt = 0;

  // Per (cell, gauss point): quadrature weight aW (with detJ), and the
  // inverse-metric coefficients scaled by aW.
  std::vector<double> aw, krr, krt, ktt;
  // Shape values per gauss point axis position: s0[g] = 1-xi, s1[g] = xi.
  double gxi[2];

  double cap_area = 0.0;  // inner disk, mapped

  int cells_r() const { return nr - 1; }
  size_t node(int i, int j) const { return size_t(i) * nt + j; }
  int jn(int j) const { return (j + 1) % nt; }

  void build(const BoundaryGeometry& geom, std::vector<double> rho_nodes,
             int n_theta) {
    if (geom.kind() == BoundaryGeometry::Kind::Sampled)
      throw std::invalid_argument("pde2d: disk or ellipse geometry required");
    p = geom.semi_axis_p();
    q = geom.semi_axis_q();
    rho = std::move(rho_nodes);
    nr = int(rho.size());
    nt = n_theta;
    theta.resize(nt);
    for (int j = 0; j < nt; ++j) theta[j] = kTwoPi * j / nt;
    gxi[0] = 0.5 * (1.0 - 1.0 / std::sqrt(3.0));
    gxi[1] = 0.5 * (1.0 + 1.0 / std::sqrt(3.0));

    const int ncell = cells_r() * nt;
    aw.assign(size_t(ncell) * 4, 0.0);
    krr.assign(size_t(ncell) * 4, 0.0);
    krt.assign(size_t(ncell) * 4, 0.0);
    ktt.assign(size_t(ncell) * 4, 0.0);
    const double dth = kTwoPi / nt;
    for (int i = 0; i < cells_r(); ++i) {
      const double dr = rho[i + 1] - rho[i];
      for (int j = 0; j < nt; ++j) {
        const int cell = i * nt + j;
        for (int ga = 0; ga < 2; ++ga) {
          for (int gb = 0; gb < 2; ++gb) {
            const int gp = ga * 2 + gb;
            const double r = rho[i] + gxi[ga] * dr;
            const double th = theta[j] + gxi[gb] * dth;
            const double c = std::cos(th), s = std::sin(th);
            // Metric of the map: G = J^T J, det J = p q rho.
            const double grr = p * p * c * c + q * q * s * s;
            const double grt = (q * q - p * p) * r * s * c;
            const double gtt = r * r * (p * p * s * s + q * q * c * c);
            const double detj = p * q * r;
            const double detg = detj * detj;
            const double A = 0.25 * dr * dth * detj;
            const size_t idx = size_t(cell) * 4 + gp;
            aw[idx] = A;
            krr[idx] = A * gtt / detg;
            krt[idx] = A * (-grt) / detg;
            ktt[idx] = A * grr / detg;
          }
        }
      }
    }
    cap_area = std::numbers::pi * p * q * rho.front() * rho.front();
  }

  // Bilinear data of one cell/gauss point.
  struct GpShape {
    double n[4];    // shape values, node order (i,j),(i+1,j),(i,j+1),(i+1,j+1)
    double dr[4];   // d/d rho
    double dt[4];   // d/d theta
  };
  GpShape shape(int i, int gp) const {
    const int ga = gp / 2, gb = gp % 2;
    const double xi = gxi[ga], eta = gxi[gb];
    const double dr_cell = rho[i + 1] - rho[i];
    const double dt_cell = kTwoPi / nt;
    GpShape sh;
    sh.n[0] = (1 - xi) * (1 - eta);
    sh.n[1] = xi * (1 - eta);
    sh.n[2] = (1 - xi) * eta;
    sh.n[3] = xi * eta;
    sh.dr[0] = -(1 - eta) / dr_cell;
    sh.dr[1] = (1 - eta) / dr_cell;
    sh.dr[2] = -eta / dr_cell;
    sh.dr[3] = eta / dr_cell;
    sh.dt[0] = -(1 - xi) / dt_cell;
    sh.dt[1] = -xi / dt_cell;
    sh.dt[2] = (1 - xi) / dt_cell;
    sh.dt[3] = xi / dt_cell;
    return sh;
  }

  void cell_nodes(int i, int j, size_t out[4]) const {
    out[0] = node(i, j);
    out[1] = node(i + 1, j);
    out[2] = node(i, jn(j));
    out[3] = node(i + 1, jn(j));
  }
};

double mesh_energy(const Mesh& m, const PotentialSpec& spec, double eps,
                   const std::vector<double>& u) {
  const double e2 = eps * eps;
  double sum = 0.0;
  size_t nodes[4];
  for (int i = 0; i < m.cells_r(); ++i) {
    for (int j = 0; j < m.nt; ++j) {
      m.cell_nodes(i, j, nodes);
      const double uv[4] = {u[nodes[0]], u[nodes[1]], u[nodes[2]],
                            u[nodes[3]]};
      const int cell = i * m.nt + j;
      for (int gp = 0; gp < 4; ++gp) {
        const auto sh = m.shape(i, gp);
        double uu = 0, ur = 0, ut = 0;
        for (int k = 0; k < 4; ++k) {
          uu += sh.n[k] * uv[k];
          ur += sh.dr[k] * uv[k];
          ut += sh.dt[k] * uv[k];
        }
        const size_t idx = size_t(cell) * 4 + gp;
        sum += m.aw[idx] * spec.w(uu) +
               e2 * (m.krr[idx] * ur * ur + 2.0 * m.krt[idx] * ur * ut +
                     m.ktt[idx] * ut * ut);
      }
    }
  }
  // Inner cap: the field is flat there; one W evaluation at the ring mean.
  double mean = 0.0;
  for (int j = 0; j < m.nt; ++j) mean += u[m.node(0, j)];
  mean /= m.nt;
  sum += m.cap_area * spec.w(mean);
  return sum;
}

void mesh_gradient(const Mesh& m, const PotentialSpec& spec, double eps,
                   const std::vector<double>& u, std::vector<double>& grad) {
  const double e2 = eps * eps;
  grad.assign(u.size(), 0.0);
  size_t nodes[4];
  for (int i = 0; i < m.cells_r(); ++i) {
    for (int j = 0; j < m.nt; ++j) {
      m.cell_nodes(i, j, nodes);
      const double uv[4] = {u[nodes[0]], u[nodes[1]], u[nodes[2]],
                            u[nodes[3]]};
      const int cell = i * m.nt + j;
      for (int gp = 0; gp < 4; ++gp) {
        const auto sh = m.shape(i, gp);
        double uu = 0, ur = 0, ut = 0;
        for (int k = 0; k < 4; ++k) {
          uu += sh.n[k] * uv[k];
          ur += sh.dr[k] * uv[k];
          ut += sh.dt[k] * uv[k];
        }
        const size_t idx = size_t(cell) * 4 + gp;
        const double wprime = m.aw[idx] * spec.dw(uu);
        const double fr = 2.0 * e2 * (m.krr[idx] * ur + m.krt[idx] * ut);
        const double ft = 2.0 * e2 * (m.ktt[idx] * ut + m.krt[idx] * ur);
        for (int k = 0; k < 4; ++k)
          grad[nodes[k]] += wprime * sh.n[k] + fr * sh.dr[k] + ft * sh.dt[k];
      }
    }
  }
  double mean = 0.0;
  for (int j = 0; j < m.nt; ++j) mean += u[m.node(0, j)];
  mean /= m.nt;
  const double cap_g = m.cap_area * spec.dw(mean) / m.nt;
  for (int j = 0; j < m.nt; ++j) grad[m.node(0, j)] += cap_g;
}

// Symmetric 9-point CSR operator on the product grid.
struct Csr {
  std::vector<int> ptr, col;
  std::vector<double> val;
  int n = 0;

  void build_pattern(const Mesh& m) {
    n = m.nr * m.nt;
    ptr.assign(n + 1, 0);
    col.clear();
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < m.nr; ++i) {
      for (int j = 0; j < m.nt; ++j) {
        auto& row = adj[m.node(i, j)];
        for (int di = -1; di <= 1; ++di) {
          const int ii = i + di;
          if (ii < 0 || ii >= m.nr) continue;
          for (int dj = -1; dj <= 1; ++dj) {
            const int jj = (j + dj + m.nt) % m.nt;
            row.push_back(int(m.node(ii, jj)));
          }
        }
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
      }
    }
    for (int k = 0; k < n; ++k) ptr[k + 1] = ptr[k] + int(adj[k].size());
    col.resize(ptr[n]);
    for (int k = 0; k < n; ++k)
      std::copy(adj[k].begin(), adj[k].end(), col.begin() + ptr[k]);
    val.assign(col.size(), 0.0);
  }

  void zero() { std::fill(val.begin(), val.end(), 0.0); }

  void add(int r, int c, double v) {
    for (int k = ptr[r]; k < ptr[r + 1]; ++k)
      if (col[k] == c) {
        val[k] += v;
        return;
      }
  }

  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(n, 0.0);
    for (int r = 0; r < n; ++r) {
      double s = 0.0;
      for (int k = ptr[r]; k < ptr[r + 1]; ++k) s += val[k] * x[col[k]];
      y[r] = s;
    }
  }

  double diag(int r) const {
    for (int k = ptr[r]; k < ptr[r + 1]; ++k)
      if (col[k] == r) return val[k];
    return 0.0;
  }
};

void assemble_stiffness(const Mesh& m, double eps, Csr& K) {
  const double e2 = eps * eps;
  K.zero();
  size_t nodes[4];
  for (int i = 0; i < m.cells_r(); ++i) {
    for (int j = 0; j < m.nt; ++j) {
      m.cell_nodes(i, j, nodes);
      const int cell = i * m.nt + j;
      for (int gp = 0; gp < 4; ++gp) {
        const auto sh = m.shape(i, gp);
        const size_t idx = size_t(cell) * 4 + gp;
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) {
            const double v =
                2.0 * e2 *
                (m.krr[idx] * sh.dr[a] * sh.dr[b] +
                 m.krt[idx] * (sh.dr[a] * sh.dt[b] + sh.dt[a] * sh.dr[b]) +
                 m.ktt[idx] * sh.dt[a] * sh.dt[b]);
            K.add(int(nodes[a]), int(nodes[b]), v);
          }
        }
      }
    }
  }
}

void assemble_wmass(const Mesh& m, const PotentialSpec& spec,
                    const std::vector<double>& u, Csr& M) {
  M.zero();
  size_t nodes[4];
  for (int i = 0; i < m.cells_r(); ++i) {
    for (int j = 0; j < m.nt; ++j) {
      m.cell_nodes(i, j, nodes);
      const double uv[4] = {u[nodes[0]], u[nodes[1]], u[nodes[2]],
                            u[nodes[3]]};
      const int cell = i * m.nt + j;
      for (int gp = 0; gp < 4; ++gp) {
        const auto sh = m.shape(i, gp);
        double uu = 0;
        for (int k = 0; k < 4; ++k) uu += sh.n[k] * uv[k];
        const size_t idx = size_t(cell) * 4 + gp;
        const double wpp = m.aw[idx] * spec.ddw(uu);
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            M.add(int(nodes[a]), int(nodes[b]), wpp * sh.n[a] * sh.n[b]);
      }
    }
  }
}

std::vector<double> lumped_mass(const Mesh& m) {
  std::vector<double> ml(size_t(m.nr) * m.nt, 0.0);
  size_t nodes[4];
  for (int i = 0; i < m.cells_r(); ++i) {
    for (int j = 0; j < m.nt; ++j) {
      m.cell_nodes(i, j, nodes);
      const int cell = i * m.nt + j;
      for (int gp = 0; gp < 4; ++gp) {
        const auto sh = m.shape(i, gp);
        const size_t idx = size_t(cell) * 4 + gp;
        for (int k = 0; k < 4; ++k) ml[nodes[k]] += m.aw[idx] * sh.n[k];
      }
    }
  }
  for (int j = 0; j < m.nt; ++j)
    ml[m.node(0, j)] += m.cap_area / m.nt;
  return ml;
}

// Jacobi-preconditioned CG on the free (non-boundary) dofs. Returns false on
// nonpositive curvature (indefinite operator).
template <class Apply>
bool pcg(const Apply& apply, const std::vector<double>& diag,
         const std::vector<bool>& fixed, const std::vector<double>& rhs,
         std::vector<double>& x, double rel_tol, int max_iter) {
  const size_t n = rhs.size();
  x.assign(n, 0.0);
  std::vector<double> r = rhs, z(n), pvec(n), Ap(n);
  for (size_t k = 0; k < n; ++k)
    if (fixed[k]) r[k] = 0.0;
  double rz = 0.0, rhs_norm = 0.0;
  for (size_t k = 0; k < n; ++k) {
    z[k] = fixed[k] ? 0.0 : r[k] / diag[k];
    rz += r[k] * z[k];
    rhs_norm += r[k] * r[k];
  }
  rhs_norm = std::sqrt(rhs_norm);
  if (rhs_norm == 0.0) return true;
  pvec = z;
  for (int it = 0; it < max_iter; ++it) {
    apply(pvec, Ap);
    for (size_t k = 0; k < n; ++k)
      if (fixed[k]) Ap[k] = pvec[k];
    double pAp = 0.0;
    for (size_t k = 0; k < n; ++k) pAp += pvec[k] * Ap[k];
    if (!(pAp > 0.0)) return false;
    const double alpha = rz / pAp;
    double rnorm = 0.0;
    for (size_t k = 0; k < n; ++k) {
      x[k] += alpha * pvec[k];
      r[k] -= alpha * Ap[k];
      rnorm += r[k] * r[k];
    }
    if (std::sqrt(rnorm) <= rel_tol * rhs_norm) return true;
    double rz_new = 0.0;
    for (size_t k = 0; k < n; ++k) {
      z[k] = fixed[k] ? 0.0 : r[k] / diag[k];
      rz_new += r[k] * z[k];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (size_t k = 0; k < n; ++k) pvec[k] = z[k] + beta * pvec[k];
  }
  return true;  // looser solves are still useful descent directions
}

}  // namespace

std::vector<double> radial_nodes(const BoundaryGeometry& geom, double eps,
                                 const GridSpec2D& gs) {
  // Physical layer spacing translated to map units via the radial metric
  // magnitude (p..q on the ellipse).
  const double metric = std::max(geom.semi_axis_p(), geom.semi_axis_q());
  const double h0 = gs.h0_over_eps * eps / metric;
  const double h_max = gs.h_max;
  std::vector<double> depth{0.0};
  double h = h0;
  while (depth.back() < 1.0 - 1.5 * h_max) {
    depth.push_back(depth.back() + h);
    h = std::min(h * gs.growth, h_max);
  }
  // Cell-centered closure at the origin.
  const double rho0 = std::max(0.25 * h_max, 0.5 * (1.0 - depth.back()));
  std::vector<double> rho;
  rho.push_back(rho0);
  for (size_t k = depth.size(); k-- > 0;) {
    const double r = 1.0 - depth[k];
    if (r > rho.back() + 1e-12) rho.push_back(r);
  }
  return rho;
}

std::vector<double> bisect_nodes(const std::vector<double>& rho) {
  std::vector<double> out;
  out.reserve(rho.size() * 2);
  for (size_t i = 0; i + 1 < rho.size(); ++i) {
    out.push_back(rho[i]);
    out.push_back(0.5 * (rho[i] + rho[i + 1]));
  }
  out.push_back(rho.back());
  return out;
}

DirichletData DirichletData::constant(double value) {
  DirichletData d;
  d.g = [value](double) { return value; };
  d.dg = [](double) { return 0.0; };
  d.g_min = d.g_max = value;
  return d;
}

DirichletData DirichletData::cosine(double base, double amplitude) {
  DirichletData d;
  d.g = [base, amplitude](double th) { return base + amplitude * std::cos(th); };
  d.dg = [amplitude](double th) { return -amplitude * std::sin(th); };
  d.g_min = base - std::abs(amplitude);
  d.g_max = base + std::abs(amplitude);
  return d;
}

Field2D minimize_f_epsilon(const PotentialSpec& spec,
                           const BoundaryGeometry& geom,
                           const DirichletData& data, double eps,
                           const GridSpec2D& gs, SolveInfo2D* info,
                           const Field2D* warm) {
  return minimize_on_nodes(spec, geom, data, eps,
                           radial_nodes(geom, eps, gs), gs.n_theta, info,
                           warm);
}

Field2D minimize_on_nodes(const PotentialSpec& spec,
                          const BoundaryGeometry& geom,
                          const DirichletData& data, double eps,
                          std::vector<double> rho_nodes, int n_theta,
                          SolveInfo2D* info, const Field2D* warm) {
  Mesh m;
  m.build(geom, std::move(rho_nodes), n_theta);

  Field2D f;
  f.geom = geom;
  f.rho = m.rho;
  f.theta = m.theta;
  f.eps = eps;
  const size_t N = size_t(m.nr) * m.nt;
  f.u.assign(N, spec.b);

  // Distances to the boundary per node.
  f.dist.assign(N, 0.0);
  for (int i = 0; i < m.nr; ++i) {
    for (int j = 0; j < m.nt; ++j) {
      if (geom.kind() == BoundaryGeometry::Kind::Circle) {
        f.dist[m.node(i, j)] = geom.radius() * (1.0 - m.rho[i]);
      } else {
        const double x = geom.semi_axis_p() * m.rho[i] * std::cos(m.theta[j]);
        const double y = geom.semi_axis_q() * m.rho[i] * std::sin(m.theta[j]);
        f.dist[m.node(i, j)] = geom.project({x, y}).dist;
      }
    }
  }

  // Initial guess: fiber-wise recovery field (falls back to the warm start
  // when provided, e.g. mesh-refinement continuation).
  if (warm) {
    if (warm->nr() * 2 - 1 == m.nr && warm->nt() * 2 == m.nt) {
      // Injection from the bisected parent.
      for (int i = 0; i < warm->nr(); ++i)
        for (int j = 0; j < warm->nt(); ++j)
          f.u[m.node(2 * i, 2 * j)] = warm->at(i, j);
      for (int i = 1; i < m.nr; i += 2)
        for (int j = 0; j < m.nt; j += 2)
          f.u[m.node(i, j)] =
              0.5 * (f.u[m.node(i - 1, j)] + f.u[m.node(i + 1, j)]);
      for (int i = 0; i < m.nr; ++i)
        for (int j = 1; j < m.nt; j += 2)
          f.u[m.node(i, j)] = 0.5 * (f.u[m.node(i, (j + m.nt - 1) % m.nt)] +
                                     f.u[m.node(i, (j + 1) % m.nt)]);
    } else if (int(warm->u.size()) == int(N)) {
      f.u = warm->u;
    } else {
      throw std::invalid_argument("minimize_f_epsilon: warm start mismatch");
    }
  } else {
    const double tube = geom.max_tubular_radius();
    auto rec = build_recovery_2d(spec, geom, data.g, data.dg, eps,
                                 DeltaSchedule::power(2.0), tube, m.nt);
    for (int i = 0; i < m.nr; ++i)
      for (int j = 0; j < m.nt; ++j)
        f.u[m.node(i, j)] = rec.value(m.theta[j], f.dist[m.node(i, j)]);
  }
  for (auto& v : f.u) v = std::clamp(v, spec.a, spec.b);
  // Exact boundary trace.
  for (int j = 0; j < m.nt; ++j)
    f.u[m.node(m.nr - 1, j)] = data.g(m.theta[j]);

  std::vector<bool> fixed(N, false);
  for (int j = 0; j < m.nt; ++j) fixed[m.node(m.nr - 1, j)] = true;

  Csr K;
  K.build_pattern(m);
  assemble_stiffness(m, eps, K);
  const auto ml = lumped_mass(m);

  // Stabilization shift >= max |W''| on [a, b].
  double shift = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double s = spec.a + (spec.b - spec.a) * i / 400;
    shift = std::max(shift, std::abs(spec.ddw(s)));
  }

  SolveInfo2D local;
  SolveInfo2D& si = info ? *info : local;

  std::vector<double> grad, rhs, delta, diag(N), Kx;
  auto scaled_residual = [&](const std::vector<double>& g) {
    double r = 0.0;
    for (size_t k = 0; k < N; ++k)
      if (!fixed[k]) r = std::max(r, std::abs(g[k]) / ml[k]);
    return r;
  };

  double E = mesh_energy(m, spec, eps, f.u);
  double dt = 0.25;
  const double dt_max = 4.0;
  const int max_flow_steps = 4000;
  const double grad_floor = 1e-13;

  for (int step = 0; step < max_flow_steps; ++step) {
    mesh_gradient(m, spec, eps, f.u, grad);
    if (scaled_residual(grad) <= grad_floor) break;
    const double mscale = (1.0 / dt + shift);
    for (size_t k = 0; k < N; ++k) diag[k] = ml[k] * mscale + K.diag(int(k));
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
      K.apply(x, y);
      for (size_t k = 0; k < N; ++k) y[k] += ml[k] * mscale * x[k];
    };
    rhs.assign(N, 0.0);
    for (size_t k = 0; k < N; ++k) rhs[k] = fixed[k] ? 0.0 : -grad[k];
    pcg(apply, diag, fixed, rhs, delta, 1e-10, 2000);
    std::vector<double> trial = f.u;
    for (size_t k = 0; k < N; ++k)
      if (!fixed[k]) trial[k] += delta[k];
    const double Et = mesh_energy(m, spec, eps, trial);
    ++si.flow_steps;
    if (Et <= E + 1e-15 * std::max(1.0, std::abs(E))) {
      const double decrement = E - Et;
      f.u.swap(trial);
      E = Et;
      dt = std::min(dt * 1.5, dt_max);
      if (decrement <= 1e-12 * std::max(std::abs(E), 1e-30)) break;
    } else {
      si.energy_descent_fault = true;
      dt *= 0.5;
      if (dt < 1e-8) break;
    }
  }

  // Damped Newton polish.
  Csr J;
  J.build_pattern(m);
  si.newton_converged = true;
  mesh_gradient(m, spec, eps, f.u, grad);
  double res = scaled_residual(grad);
  const double newton_tol = 1e-11;
  std::vector<double> u_flow = f.u;
  const double e_flow = E;
  for (int it = 0; it < 50 && res > newton_tol; ++it) {
    assemble_wmass(m, spec, f.u, J);
    for (size_t k = 0; k < J.val.size(); ++k) J.val[k] += K.val[k];
    for (size_t k = 0; k < N; ++k)
      diag[k] = std::max(J.diag(int(k)), 1e-30);
    auto applyJ = [&](const std::vector<double>& x, std::vector<double>& y) {
      J.apply(x, y);
    };
    rhs.assign(N, 0.0);
    for (size_t k = 0; k < N; ++k) rhs[k] = fixed[k] ? 0.0 : -grad[k];
    if (!pcg(applyJ, diag, fixed, rhs, delta, 1e-12, 4000)) {
      si.newton_converged = false;
      si.note = "newton: indefinite Jacobian, keeping flow iterate";
      break;
    }
    double damping = 1.0;
    bool improved = false;
    for (int half = 0; half < 30; ++half) {
      std::vector<double> trial = f.u;
      for (size_t k = 0; k < N; ++k)
        if (!fixed[k]) trial[k] += damping * delta[k];
      std::vector<double> gtrial;
      mesh_gradient(m, spec, eps, trial, gtrial);
      const double rt = scaled_residual(gtrial);
      if (rt < res) {
        f.u.swap(trial);
        grad.swap(gtrial);
        res = rt;
        improved = true;
        break;
      }
      damping *= 0.5;
    }
    ++si.newton_iterations;
    if (!improved) {
      si.newton_converged = res <= 10 * newton_tol;
      break;
    }
  }
  si.newton_converged = si.newton_converged && res <= 10 * newton_tol;
  if (!si.newton_converged) {
    // Keep whichever iterate carries the lower energy.
    const double e_newton = mesh_energy(m, spec, eps, f.u);
    if (e_flow < e_newton) {
      f.u = u_flow;
      si.note = "newton polish rejected, flow iterate kept";
    }
  }
  si.energy = mesh_energy(m, spec, eps, f.u);
  si.residual = res;
  return f;
}

double energy_f(const PotentialSpec& spec, const Field2D& field) {
  Mesh m;
  m.build(field.geom, field.rho, field.nt());
  return mesh_energy(m, spec, field.eps, field.u);
}

double f2_epsilon(const PotentialSpec& spec, const Field2D& field,
                  const DirichletData& data) {
  const double F = energy_f(spec, field);
  const double min_f1 = boundary_integral(field.geom, [&](double th) {
    return geodesic_distance(spec, spec.b, data.g(th));
  });
  return (F / field.eps - min_f1) / field.eps;
}

MaxPrincipleReport check_maximum_principle(const PotentialSpec& spec,
                                           const Field2D& field, double tol) {
  MaxPrincipleReport rep;
  rep.min_u = *std::min_element(field.u.begin(), field.u.end());
  rep.max_u = *std::max_element(field.u.begin(), field.u.end());
  rep.pass = rep.min_u >= spec.a - tol && rep.max_u <= spec.b + tol;
  return rep;
}

DecayFitReport check_exponential_decay(const PotentialSpec& spec,
                                       const Field2D& field, double delta) {
  DecayFitReport rep;
  std::vector<double> xs, ys;
  int floor_hits = 0;
  for (size_t k = 0; k < field.u.size(); ++k) {
    if (field.dist[k] < 2.0 * delta) continue;
    const double gap = spec.b - field.u[k];
    if (gap <= 1e-14) {
      ++floor_hits;
      continue;
    }
    xs.push_back(field.dist[k] / field.eps);
    ys.push_back(std::log(gap));
  }
  rep.points = int(xs.size());
  if (xs.size() < 10) {
    rep.floor_case = floor_hits > 0;
    rep.pass = rep.floor_case;
    return rep;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  const double n = double(xs.size());
  const double denom = n * sxx - sx * sx;
  rep.slope = denom != 0 ? (n * sxy - sx * sy) / denom : 0.0;
  rep.mu_fit = -rep.slope;
  rep.pass = rep.slope < 0.0;
  return rep;
}

GradientBoundReport check_gradient_bound(const Field2D& field) {
  Mesh m;
  m.build(field.geom, field.rho, field.nt());
  GradientBoundReport rep;
  size_t nodes[4];
  for (int i = 0; i < m.cells_r(); ++i) {
    for (int j = 0; j < m.nt; ++j) {
      m.cell_nodes(i, j, nodes);
      const double uv[4] = {field.u[nodes[0]], field.u[nodes[1]],
                            field.u[nodes[2]], field.u[nodes[3]]};
      double dmin = 1e300;
      for (int k = 0; k < 4; ++k) dmin = std::min(dmin, field.dist[nodes[k]]);
      const int cell = i * m.nt + j;
      for (int gp = 0; gp < 4; ++gp) {
        const auto sh = m.shape(i, gp);
        double ur = 0, ut = 0;
        for (int k = 0; k < 4; ++k) {
          ur += sh.dr[k] * uv[k];
          ut += sh.dt[k] * uv[k];
        }
        const size_t idx = size_t(cell) * 4 + gp;
        // |grad u|^2 = metric form; aw carries the quadrature weight, so
        // divide it back out.
        const double g2 =
            (m.krr[idx] * ur * ur + 2 * m.krt[idx] * ur * ut +
             m.ktt[idx] * ut * ut) /
            m.aw[idx];
        const double gn = std::sqrt(std::max(0.0, g2));
        rep.eps_max_grad_global = std::max(rep.eps_max_grad_global,
                                           field.eps * gn);
        if (dmin >= field.eps)
          rep.eps_max_grad_interior =
              std::max(rep.eps_max_grad_interior, field.eps * gn);
      }
    }
  }
  return rep;
}

LevelSetReport check_level_set_confinement(const Field2D& field, double lambda,
                                           double delta) {
  LevelSetReport rep;
  rep.pass = true;
  for (size_t k = 0; k < field.u.size(); ++k) {
    if (field.u[k] <= lambda && field.dist[k] >= delta) {
      rep.pass = false;
      rep.deepest_violation = std::max(rep.deepest_violation, field.dist[k]);
    }
  }
  return rep;
}

RadialReductionReport radial_reduction_oracle(const PotentialSpec& spec,
                                              double radius, double g_value,
                                              double eps, const GridSpec2D& gs,
                                              const Field2D* solved) {
  RadialReductionReport rep;
  if (solved) {
    rep.f_2d = energy_f(spec, *solved);
  } else {
    auto geom = BoundaryGeometry::circle(radius);
    auto data = DirichletData::constant(g_value);
    auto f = minimize_f_epsilon(spec, geom, data, eps, gs);
    rep.f_2d = energy_f(spec, f);
  }

  WeightedProblem1D pb;
  pb.weight.T = radius;
  pb.weight.omega = [radius](double t) { return kTwoPi * (radius - t); };
  pb.weight.domega = [](double) { return -kTwoPi; };
  pb.eps = eps;
  pb.alpha_eps = pb.alpha = g_value;
  pb.beta_eps = pb.beta = spec.b;
  pb.natural_right_bc = true;
  GridSpec1D g1;
  g1.nodes_per_eps = std::max(64, int(4.0 / gs.h0_over_eps));
  auto cand = build_recovery_1d(spec, pb, DeltaSchedule::power(2.0));
  const auto grid = make_graded_grid(radius, eps, g1);
  std::vector<std::vector<double>> cands{cand.sample(grid)};
  auto sol = minimize_bvp(spec, pb, g1, nullptr, &cands);
  rep.f_1d = discrete_energy(spec, pb, sol.grid, sol.values);
  rep.rel_gap = std::abs(rep.f_2d - rep.f_1d) /
                std::max(std::abs(rep.f_1d), 1e-300);
  return rep;
}

}  // namespace layerlab
