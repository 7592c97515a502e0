#pragma once

#include <array>

#include "ballflow/error.hpp"

namespace ballflow {

/// Radii at the four local vertices of a conformal tetrahedron.  All entries
/// are strictly positive and finite.
class TetRadii {
public:
    TetRadii(double r0, double r1, double r2, double r3);
    explicit TetRadii(const std::array<double, 4>& r);

    double operator[](int i) const { return r_[i]; }
    const std::array<double, 4>& values() const { return r_; }

private:
    std::array<double, 4> r_;
};

using Vec3 = std::array<double, 3>;
using Mat4 = std::array<std::array<double, 4>, 4>;

/// Real: the four tangent balls span a Euclidean tetrahedron.  Virtual: the
/// ball at `apex` slips through the gap of the other three.
struct TetClass {
    bool is_real = true;
    int apex = -1;  // local index, only meaningful when virtual
    friend bool operator==(const TetClass&, const TetClass&) = default;
};

struct TetGeometry {
    double q = 0.0;
    std::array<double, 6> lengths{};  // kTetEdges order
    TetClass status;
    std::array<double, 4> solid_angles{};     // real or extended
    std::array<double, 6> dihedral_angles{};  // zero when virtual
    double volume = 0.0;                      // zero when virtual
};

/// Relative band around Q = 0 inside which a tetrahedron is treated as lying
/// on the virtual boundary: Q <= kBoundaryBand * (sum 1/r)^2 counts as Q <= 0.  The band only absorbs
/// rounding in Q itself.
inline constexpr double kBoundaryBand = 1e-14;

/// Relative tolerance below which two radii count as tied for the minimum.
inline constexpr double kTieTolerance = 1e-12;

/// Volume below kDegeneracyFloor * (mean edge length)^3 makes the angle
/// Jacobian unavailable.
inline constexpr double kDegeneracyFloor = 1e-12;

/// (sum 1/r)^2 - 2 sum 1/r^2.
double q_value(const TetRadii& r);

/// dQ/dr_i = -(2/r_i^2)(1/r_j + 1/r_k + 1/r_l - 1/r_i).
std::array<double, 4> q_gradient(const TetRadii& r);

/// The radius r_i at which the ball i fits exactly into the gap of three
/// mutually tangent balls of radii rj, rk, rl (Q = 0).
double critical_radius(double rj, double rk, double rl);

/// Throws GeometryError if Q <= 0 and the minimum radius is not strict.
TetClass classify(const TetRadii& r);

std::array<double, 6> edge_lengths(const TetRadii& r);

/// Places four points in R^3 with the given pairwise distances (kTetEdges
/// order).  Throws GeometryError if a face violates the triangle inequality
/// or the Cayley-Menger determinant is not positive.
std::array<Vec3, 4> embed_tetrahedron(const std::array<double, 6>& lengths);

/// Dihedral angles (kTetEdges order) of a real tetrahedron.
std::array<double, 6> dihedral_angles(const TetRadii& r);

/// Solid angles of a real tetrahedron.  Throws VirtualPackingError otherwise.
std::array<double, 4> solid_angles(const TetRadii& r);

/// Continuous extension of the solid angles to all positive radii: 2*pi at
/// the apex and 0 elsewhere for a virtual tetrahedron.
std::array<double, 4> extended_solid_angles(const TetRadii& r);

/// Cayley-Menger volume of a real tetrahedron.  Throws on virtual input.
double volume(const TetRadii& r);
/// As volume(), but 0 for virtual tetrahedra.
double extended_volume(const TetRadii& r);

/// d(alpha_i)/d(r_j).  Rows sum to zero after weighting by r (angles are
/// 0-homogeneous).  Throws GeometryError for virtual or numerically
/// degenerate tetrahedra.
Mat4 solid_angle_jacobian(const TetRadii& r);

/// All of the above in one pass.
TetGeometry tet_geometry(const TetRadii& r);

/// 3*acos(1/3) - pi, the solid angle of a regular tetrahedron.
double regular_solid_angle();

}  // namespace ballflow
