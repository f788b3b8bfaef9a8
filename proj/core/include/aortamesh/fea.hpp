#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "aortamesh/solidify.hpp"

namespace aorta::fea {

// Units: mm, kPa, mN (kPa * mm^2).

/// Isotropic linear-elastic surrogate. The default is deliberately stiff so
/// that displacements stay negligible and the stress field is set by
/// equilibrium alone.
struct Material {
  double youngs_modulus = 1.0e6;  // kPa
  double poisson_ratio = 0.3;
};

void validate(const Material& mat);

struct BoundaryConditions {
  /// Node sets fully clamped in x, y and z.
  std::vector<std::string> fixed_node_sets{solid::kInletRing, solid::kOutletRing, solid::kHoleRims};
};

using StressTensor = Mat3;

struct SolverStats {
  std::size_t iterations = 0;
  double final_residual = 0.0;
};

struct FEAResult {
  std::vector<Vec3> displacements;
  std::vector<StressTensor> element_stress;
  std::vector<double> max_abs_principal;
  SolverStats solver_stats;
  Vec3 applied_total;          // sum of nodal pressure loads
  Vec3 reaction_total;         // sum of support reactions
  double applied_magnitude = 0.0;  // sum of |nodal load|

  /// |sum(reactions) + sum(loads)| / sum |loads|; 0 for an unloaded model.
  double equilibrium_error() const;
};

struct ShapeHex8 {
  std::array<double, 8> N;
  std::array<std::array<double, 3>, 8> dN;  // d N_a / d(xi, eta, zeta)
};

/// Local coordinates of hex corner a (each component is -1 or +1).
const std::array<std::array<double, 3>, 8>& hex8_corner_signs();

ShapeHex8 shape_hex8(double xi, double eta, double zeta);

using ElementMatrix = std::array<double, 24 * 24>;  // row-major, dof = 3 * node + component

/// 6x6 isotropic elasticity matrix, Voigt order xx yy zz xy yz zx with
/// engineering shear strains.
std::array<std::array<double, 6>, 6> elasticity_matrix(const Material& mat);

/// 2x2x2 Gauss stiffness. Throws Error(DegenerateElement) if det J <= 0 at a
/// Gauss point.
ElementMatrix element_stiffness(const std::array<Vec3, 8>& corners, const Material& mat);

double element_volume(const std::array<Vec3, 8>& corners);

/// Compressed sparse row matrix. Both triangles of the symmetric system are
/// stored so products are a single pass over the rows.
struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::size_t> col;
  std::vector<double> val;

  double coeff(std::size_t i, std::size_t j) const;
  void multiply(std::span<const double> x, std::span<double> y) const;
};

/// Stiffness restricted to free DOFs. `free_index[dof]` is the row of a
/// free DOF or -1 for a constrained one.
struct LinearSystem {
  CsrMatrix K;
  std::vector<long> free_index;
  std::vector<std::size_t> free_dofs;
  std::size_t n_nodes = 0;
};

LinearSystem assemble_system(const solid::HexMesh& mesh, const Material& mat, const BoundaryConditions& bcs);

/// Consistent nodal forces of a uniform pressure on the faces of `face_set`,
/// acting along each face's winding normal.
std::vector<Vec3> pressure_loads(const solid::HexMesh& mesh, const std::string& face_set, double pressure);
std::vector<Vec3> pressure_loads(std::span<const Vec3> nodes, std::span<const solid::Face> faces, double pressure);

struct SolveResult {
  std::vector<Vec3> displacements;  // per node, zero on constrained DOFs
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> residual_history;
};

/// Jacobi-preconditioned conjugate gradient to ||f - K u|| <= tol ||f||.
/// Throws SolverError when the iteration cap 20 sqrt(n) + 1000 is reached.
SolveResult solve_system(const LinearSystem& system, std::span<const Vec3> nodal_loads, double tol = 1e-8);

/// Centroid (Gauss-averaged) small-strain Cauchy stress per element.
std::vector<StressTensor> recover_stress(const solid::HexMesh& mesh, const Material& mat,
                                         std::span<const Vec3> displacements);

/// Internal nodal forces K u assembled element by element over all DOFs.
std::vector<Vec3> internal_forces(const solid::HexMesh& mesh, const Material& mat, std::span<const Vec3> displacements);

/// Principal stresses ascending. Throws Error(InvalidTensor) if asymmetric.
std::array<double, 3> principal_stresses(const StressTensor& s);
double principal_max_abs(const StressTensor& s);

/// Static-determinacy wall stress: pressure on the inner surface, clamped
/// cut boundaries, one linear solve on the imaged geometry.
FEAResult run_sda(const solid::HexMesh& mesh, double pressure = 16.0, const Material& mat = {},
                  const BoundaryConditions& bcs = {}, double tol = 1e-8);

}  // namespace aorta::fea
