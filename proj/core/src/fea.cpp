#include "aortamesh/fea.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "aortamesh/error.hpp"

namespace aorta::fea {

namespace {

constexpr double kGauss = 0.57735026918962576451;  // 1/sqrt(3)

using Mat6 = std::array<std::array<double, 6>, 6>;
using BMatrix = std::array<std::array<double, 24>, 6>;

struct GaussEval {
  BMatrix B;
  double det_j;
};

Mat3 jacobian(const std::array<Vec3, 8>& x, const ShapeHex8& s) {
  Mat3 j{};
  for (int a = 0; a < 8; ++a)
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) j[i][k] += x[a][i] * s.dN[a][k];
  return j;
}

double det3(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat3 inverse3(const Mat3& m, double det) {
  Mat3 r;
  r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return r;
}

const std::array<std::array<double, 3>, 8>& gauss_points() {
  static const auto pts = [] {
    std::array<std::array<double, 3>, 8> g;
    const auto& s = hex8_corner_signs();
    for (int a = 0; a < 8; ++a)
      for (int k = 0; k < 3; ++k) g[a][k] = s[a][k] * kGauss;
    return g;
  }();
  return pts;
}

// Strain-displacement matrix at a local point. Throws on det J <= 0.
GaussEval strain_matrix(const std::array<Vec3, 8>& x, const std::array<double, 3>& local) {
  const ShapeHex8 s = shape_hex8(local[0], local[1], local[2]);
  const Mat3 j = jacobian(x, s);
  const double det = det3(j);
  if (!(det > 0.0)) throw Error(ErrorKind::DegenerateElement, "non-positive Jacobian determinant");
  const Mat3 jinv = inverse3(j, det);
  GaussEval g{};
  g.det_j = det;
  for (int a = 0; a < 8; ++a) {
    std::array<double, 3> dx{};
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) dx[i] += s.dN[a][k] * jinv[k][i];
    const int c = 3 * a;
    g.B[0][c] = dx[0];
    g.B[1][c + 1] = dx[1];
    g.B[2][c + 2] = dx[2];
    g.B[3][c] = dx[1];
    g.B[3][c + 1] = dx[0];
    g.B[4][c + 1] = dx[2];
    g.B[4][c + 2] = dx[1];
    g.B[5][c] = dx[2];
    g.B[5][c + 2] = dx[0];
  }
  return g;
}

std::array<Vec3, 8> corners_of(const solid::HexMesh& mesh, std::size_t e) { return solid::hex_corners(mesh, e); }

ElementMatrix element_stiffness_checked(const solid::HexMesh& mesh, std::size_t e, const Material& mat) {
  try {
    return element_stiffness(corners_of(mesh, e), mat);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::DegenerateElement) throw;
    throw Error(ErrorKind::DegenerateElement, "hex " + std::to_string(e) + " has a non-positive Jacobian", {e});
  }
}

std::vector<bool> constrained_nodes(const solid::HexMesh& mesh, const BoundaryConditions& bcs) {
  std::vector<bool> fixed(mesh.nodes.size(), false);
  for (const auto& name : bcs.fixed_node_sets) {
    auto it = mesh.node_sets.find(name);
    if (it == mesh.node_sets.end()) throw Error(ErrorKind::UnknownSet, "node set '" + name + "' not in mesh");
    for (auto n : it->second) {
      if (n >= mesh.nodes.size()) throw Error(ErrorKind::InvalidArgument, "node set '" + name + "' index out of range");
      fixed[n] = true;
    }
  }
  return fixed;
}

}  // namespace

double FEAResult::equilibrium_error() const {
  if (applied_magnitude == 0.0) return norm(reaction_total);
  return norm(reaction_total + applied_total) / applied_magnitude;
}

void validate(const Material& mat) {
  if (!(mat.youngs_modulus > 0.0)) throw Error(ErrorKind::InvalidArgument, "Young's modulus must be > 0");
  if (!(mat.poisson_ratio >= 0.0 && mat.poisson_ratio < 0.5)) {
    throw Error(ErrorKind::InvalidArgument, "Poisson ratio must lie in [0, 0.5)");
  }
}

const std::array<std::array<double, 3>, 8>& hex8_corner_signs() {
  static constexpr std::array<std::array<double, 3>, 8> signs{{
      {-1, -1, -1},
      {1, -1, -1},
      {1, 1, -1},
      {-1, 1, -1},
      {-1, -1, 1},
      {1, -1, 1},
      {1, 1, 1},
      {-1, 1, 1},
  }};
  return signs;
}

ShapeHex8 shape_hex8(double xi, double eta, double zeta) {
  ShapeHex8 s;
  const auto& c = hex8_corner_signs();
  for (int a = 0; a < 8; ++a) {
    const double fx = 1.0 + c[a][0] * xi;
    const double fy = 1.0 + c[a][1] * eta;
    const double fz = 1.0 + c[a][2] * zeta;
    s.N[a] = 0.125 * fx * fy * fz;
    s.dN[a] = {0.125 * c[a][0] * fy * fz, 0.125 * c[a][1] * fx * fz, 0.125 * c[a][2] * fx * fy};
  }
  return s;
}

std::array<std::array<double, 6>, 6> elasticity_matrix(const Material& mat) {
  validate(mat);
  const double e = mat.youngs_modulus;
  const double nu = mat.poisson_ratio;
  const double lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  const double mu = e / (2.0 * (1.0 + nu));
  Mat6 d{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) d[i][j] = lambda;
    d[i][i] = lambda + 2.0 * mu;
    d[i + 3][i + 3] = mu;
  }
  return d;
}

ElementMatrix element_stiffness(const std::array<Vec3, 8>& x, const Material& mat) {
  const Mat6 d = elasticity_matrix(mat);
  ElementMatrix k{};
  for (const auto& gp : gauss_points()) {
    const GaussEval g = strain_matrix(x, gp);
    // DB, then accumulate B^T (DB) det J (unit Gauss weights).
    std::array<std::array<double, 24>, 6> db{};
    for (int i = 0; i < 6; ++i)
      for (int m = 0; m < 6; ++m) {
        const double dim = d[i][m];
        if (dim == 0.0) continue;
        for (int c = 0; c < 24; ++c) db[i][c] += dim * g.B[m][c];
      }
    for (int r = 0; r < 24; ++r) {
      for (int i = 0; i < 6; ++i) {
        const double bir = g.B[i][r] * g.det_j;
        if (bir == 0.0) continue;
        double* row = &k[static_cast<std::size_t>(r) * 24];
        for (int c = 0; c < 24; ++c) row[c] += bir * db[i][c];
      }
    }
  }
  // Symmetrize away rounding differences between the two triangles.
  for (int r = 0; r < 24; ++r)
    for (int c = r + 1; c < 24; ++c) {
      const double avg = 0.5 * (k[r * 24 + c] + k[c * 24 + r]);
      k[r * 24 + c] = avg;
      k[c * 24 + r] = avg;
    }
  return k;
}

double element_volume(const std::array<Vec3, 8>& x) {
  double v = 0.0;
  for (const auto& gp : gauss_points()) v += det3(jacobian(x, shape_hex8(gp[0], gp[1], gp[2])));
  return v;
}

double CsrMatrix::coeff(std::size_t i, std::size_t j) const {
  const auto begin = col.begin() + static_cast<long>(row_ptr[i]);
  const auto end = col.begin() + static_cast<long>(row_ptr[i + 1]);
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return val[static_cast<std::size_t>(it - col.begin())];
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

LinearSystem assemble_system(const solid::HexMesh& mesh, const Material& mat, const BoundaryConditions& bcs) {
  validate(mat);
  const std::size_t nn = mesh.nodes.size();
  const auto fixed = constrained_nodes(mesh, bcs);
  if (std::none_of(fixed.begin(), fixed.end(), [](bool b) { return b; })) {
    throw Error(ErrorKind::SingularSystem, "no constrained degrees of freedom");
  }

  LinearSystem sys;
  sys.n_nodes = nn;
  sys.free_index.assign(3 * nn, -1);
  for (std::size_t n = 0; n < nn; ++n) {
    if (fixed[n]) continue;
    for (int c = 0; c < 3; ++c) {
      sys.free_index[3 * n + c] = static_cast<long>(sys.free_dofs.size());
      sys.free_dofs.push_back(3 * n + c);
    }
  }

  // Node adjacency through shared hexes.
  std::vector<std::vector<std::size_t>> adj(nn);
  for (const auto& h : mesh.hexes)
    for (auto a : h)
      for (auto b : h) adj[a].push_back(b);
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }

  CsrMatrix& k = sys.K;
  k.n = sys.free_dofs.size();
  k.row_ptr.assign(k.n + 1, 0);
  for (std::size_t r = 0; r < k.n; ++r) {
    const std::size_t node = sys.free_dofs[r] / 3;
    std::size_t count = 0;
    for (auto nb : adj[node])
      if (!fixed[nb]) count += 3;
    k.row_ptr[r + 1] = k.row_ptr[r] + count;
  }
  k.col.resize(k.row_ptr.back());
  k.val.assign(k.row_ptr.back(), 0.0);
  for (std::size_t r = 0; r < k.n; ++r) {
    std::size_t pos = k.row_ptr[r];
    const std::size_t node = sys.free_dofs[r] / 3;
    for (auto nb : adj[node]) {
      if (fixed[nb]) continue;
      for (int c = 0; c < 3; ++c) k.col[pos++] = static_cast<std::size_t>(sys.free_index[3 * nb + c]);
    }
  }

  for (std::size_t e = 0; e < mesh.hexes.size(); ++e) {
    const ElementMatrix ke = element_stiffness_checked(mesh, e, mat);
    const auto& h = mesh.hexes[e];
    for (int a = 0; a < 24; ++a) {
      const long row = sys.free_index[3 * h[a / 3] + a % 3];
      if (row < 0) continue;
      const auto rbegin = k.col.begin() + static_cast<long>(k.row_ptr[static_cast<std::size_t>(row)]);
      const auto rend = k.col.begin() + static_cast<long>(k.row_ptr[static_cast<std::size_t>(row) + 1]);
      for (int b = 0; b < 24; ++b) {
        const long colidx = sys.free_index[3 * h[b / 3] + b % 3];
        if (colidx < 0) continue;
        const auto it = std::lower_bound(rbegin, rend, static_cast<std::size_t>(colidx));
        k.val[static_cast<std::size_t>(it - k.col.begin())] += ke[static_cast<std::size_t>(a) * 24 + b];
      }
    }
  }
  return sys;
}

std::vector<Vec3> pressure_loads(std::span<const Vec3> nodes, std::span<const solid::Face> faces, double pressure) {
  static constexpr std::array<std::array<double, 2>, 4> corner{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};
  std::vector<Vec3> f(nodes.size());
  for (const auto& face : faces) {
    for (double gx : {-kGauss, kGauss}) {
      for (double gy : {-kGauss, kGauss}) {
        std::array<double, 4> n;
        Vec3 xs;
        Vec3 xt;
        for (int a = 0; a < 4; ++a) {
          n[a] = 0.25 * (1.0 + corner[a][0] * gx) * (1.0 + corner[a][1] * gy);
          xs += nodes[face[a]] * (0.25 * corner[a][0] * (1.0 + corner[a][1] * gy));
          xt += nodes[face[a]] * (0.25 * corner[a][1] * (1.0 + corner[a][0] * gx));
        }
        const Vec3 traction = cross(xs, xt) * pressure;  // |J_surf| n, unit weights
        for (int a = 0; a < 4; ++a) f[face[a]] += traction * n[a];
      }
    }
  }
  return f;
}

std::vector<Vec3> pressure_loads(const solid::HexMesh& mesh, const std::string& face_set, double pressure) {
  auto it = mesh.face_sets.find(face_set);
  if (it == mesh.face_sets.end()) throw Error(ErrorKind::UnknownSet, "face set '" + face_set + "' not in mesh");
  return pressure_loads(mesh.nodes, it->second, pressure);
}

SolveResult solve_system(const LinearSystem& system, std::span<const Vec3> nodal_loads, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "solver tolerance must be > 0");
  if (nodal_loads.size() != system.n_nodes) throw Error(ErrorKind::InvalidArgument, "load vector size mismatch");
  const CsrMatrix& k = system.K;
  const std::size_t n = k.n;

  std::vector<double> b(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t dof = system.free_dofs[r];
    b[r] = nodal_loads[dof / 3][static_cast<int>(dof % 3)];
  }
  SolveResult out;
  out.displacements.assign(system.n_nodes, Vec3{});
  auto norm_of = [](const std::vector<double>& v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); };
  const double bnorm = norm_of(b);
  if (bnorm == 0.0 || n == 0) return out;

  std::vector<double> inv_diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = k.coeff(i, i);
    if (!(d > 0.0)) throw Error(ErrorKind::SingularSystem, "non-positive diagonal at free DOF " + std::to_string(i), {i});
    inv_diag[i] = 1.0 / d;
  }

  const auto cap = static_cast<std::size_t>(20.0 * std::sqrt(static_cast<double>(n))) + 1000;
  std::vector<double> x(n, 0.0), r = b, z(n), p(n), q(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
  double rel = 1.0;

  std::size_t it = 0;
  for (; it < cap; ++it) {
    k.multiply(p, q);
    const double pq = std::inner_product(p.begin(), p.end(), q.begin(), 0.0);
    if (!(pq > 0.0)) {
      throw SolverError("system is not positive definite (p'Kp = " + std::to_string(pq) + ")", out.residual_history);
    }
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    rel = norm_of(r) / bnorm;
    out.residual_history.push_back(rel);
    if (rel <= tol) {
      // Confirm with the true residual; restart from it if drift crept in.
      k.multiply(x, q);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
      rel = norm_of(r) / bnorm;
      if (rel <= tol) {
        ++it;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
      p = z;
      rz = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  if (rel > tol) {
    throw SolverError("conjugate gradient did not reach tolerance " + std::to_string(tol) + " in " +
                          std::to_string(cap) + " iterations (residual " + std::to_string(rel) + ")",
                      out.residual_history);
  }
  out.iterations = it;
  out.relative_residual = rel;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t dof = system.free_dofs[i];
    out.displacements[dof / 3][static_cast<int>(dof % 3)] = x[i];
  }
  return out;
}

std::vector<StressTensor> recover_stress(const solid::HexMesh& mesh, const Material& mat,
                                         std::span<const Vec3> u) {
  const Mat6 d = elasticity_matrix(mat);
  std::vector<StressTensor> out(mesh.hexes.size());
  for (std::size_t e = 0; e < mesh.hexes.size(); ++e) {
    const auto x = corners_of(mesh, e);
    std::array<double, 24> ue;
    for (int a = 0; a < 8; ++a)
      for (int c = 0; c < 3; ++c) ue[3 * a + c] = u[mesh.hexes[e][a]][c];
    std::array<double, 6> sig{};
    for (const auto& gp : gauss_points()) {
      GaussEval g;
      try {
        g = strain_matrix(x, gp);
      } catch (const Error&) {
        throw Error(ErrorKind::DegenerateElement, "hex " + std::to_string(e) + " has a non-positive Jacobian", {e});
      }
      std::array<double, 6> eps{};
      for (int i = 0; i < 6; ++i)
        for (int c = 0; c < 24; ++c) eps[i] += g.B[i][c] * ue[c];
      for (int i = 0; i < 6; ++i)
        for (int m = 0; m < 6; ++m) sig[i] += 0.125 * d[i][m] * eps[m];
    }
    out[e] = {{{sig[0], sig[3], sig[5]}, {sig[3], sig[1], sig[4]}, {sig[5], sig[4], sig[2]}}};
  }
  return out;
}

std::vector<Vec3> internal_forces(const solid::HexMesh& mesh, const Material& mat, std::span<const Vec3> u) {
  std::vector<Vec3> f(mesh.nodes.size());
  for (std::size_t e = 0; e < mesh.hexes.size(); ++e) {
    const ElementMatrix ke = element_stiffness_checked(mesh, e, mat);
    const auto& h = mesh.hexes[e];
    std::array<double, 24> ue;
    for (int a = 0; a < 8; ++a)
      for (int c = 0; c < 3; ++c) ue[3 * a + c] = u[h[a]][c];
    for (int r = 0; r < 24; ++r) {
      double s = 0.0;
      for (int c = 0; c < 24; ++c) s += ke[static_cast<std::size_t>(r) * 24 + c] * ue[c];
      f[h[r / 3]][r % 3] += s;
    }
  }
  return f;
}

std::array<double, 3> principal_stresses(const StressTensor& s) {
  double scale = 0.0;
  for (const auto& row : s)
    for (double v : row) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (!(std::abs(s[i][j] - s[j][i]) <= 1e-9 * scale)) {
        throw Error(ErrorKind::InvalidTensor, "stress tensor is not symmetric");
      }
    }
  }
  Mat3 sym = s;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) sym[i][j] = sym[j][i] = 0.5 * (s[i][j] + s[j][i]);
  return eigenvalues_symmetric(sym);
}

double principal_max_abs(const StressTensor& s) {
  const auto w = principal_stresses(s);
  return std::max({std::abs(w[0]), std::abs(w[1]), std::abs(w[2])});
}

FEAResult run_sda(const solid::HexMesh& mesh, double pressure, const Material& mat, const BoundaryConditions& bcs,
                  double tol) {
  validate(mat);
  const solid::HexQualityReport quality = solid::hex_quality(mesh);
  if (quality.inverted_count > 0) {
    std::vector<std::size_t> bad;
    std::string list;
    for (std::size_t e = 0; e < quality.scaled_jacobian.size(); ++e) {
      if (quality.scaled_jacobian[e] > 0.0) continue;
      bad.push_back(e);
      if (bad.size() <= 10) list += " " + std::to_string(e);
    }
    throw Error(ErrorKind::DegenerateElement, std::to_string(bad.size()) + " inverted hexes:" + list, bad);
  }

  const auto loads = pressure_loads(mesh, solid::kInnerSurface, pressure);
  const LinearSystem sys = assemble_system(mesh, mat, bcs);
  SolveResult sol = solve_system(sys, loads, tol);

  FEAResult res;
  res.displacements = std::move(sol.displacements);
  res.solver_stats = {sol.iterations, sol.relative_residual};
  res.element_stress = recover_stress(mesh, mat, res.displacements);
  res.max_abs_principal.resize(res.element_stress.size());
  for (std::size_t e = 0; e < res.element_stress.size(); ++e) {
    res.max_abs_principal[e] = principal_max_abs(res.element_stress[e]);
  }

  const auto fint = internal_forces(mesh, mat, res.displacements);
  for (std::size_t node = 0; node < mesh.nodes.size(); ++node) {
    res.applied_total += loads[node];
    res.applied_magnitude += norm(loads[node]);
    for (int c = 0; c < 3; ++c) {
      if (sys.free_index[3 * node + c] < 0) res.reaction_total[c] += fint[node][c] - loads[node][c];
    }
  }
  return res;
}

}  // namespace aorta::fea
