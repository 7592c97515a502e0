#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "ballflow/kernels.hpp"
#include "ballflow/packing.hpp"
#include "ballflow/triangulation.hpp"

namespace ballflow {

struct VirtualTet {
    std::size_t tet = 0;
    int apex = -1;  // global vertex id
    friend bool operator==(const VirtualTet&, const VirtualTet&) = default;
};

struct CurvatureReport {
    std::vector<double> k;        // K_i, or the extended curvature in extended mode
    std::vector<double> s_terms;  // K_i r_i
    double s = 0.0;               // sum_i K_i r_i
    double lambda = 0.0;          // s / l1
    double l1 = 0.0;              // sum_i r_i
    double min_q = 0.0;           // minimum Q; tetrahedra in the boundary band report 0
    bool is_real = true;
    std::vector<VirtualTet> virtual_tets;

    double max_deviation() const;  // max_i |k_i - lambda|
};

using kernels::Exec;

/// K_i = 4*pi - sum of solid angles at i.  Throws VirtualPackingError naming
/// the first virtual tetrahedron.
CurvatureReport curvature(const Triangulation& t, const PackingVector& r, Exec exec = Exec::Parallel);

/// As curvature(), using the extended solid angles; defined for every
/// positive packing.
CurvatureReport extended_curvature(const Triangulation& t, const PackingVector& r, Exec exec = Exec::Parallel);

double cooper_rivin(const Triangulation& t, const PackingVector& r);
double extended_cooper_rivin(const Triangulation& t, const PackingVector& r);
double crg_functional(const Triangulation& t, const PackingVector& r);
double extended_crg(const Triangulation& t, const PackingVector& r);

/// S / (sum r_i^(alpha+1))^(1/(alpha+1)).  alpha = -1 is rejected.
double alpha_functional(const Triangulation& t, const PackingVector& r, double alpha);

/// R_ij = 2*pi - sum of dihedral angles around edge ij, in Triangulation::edges() order.
std::vector<double> edge_curvatures(const Triangulation& t, const PackingVector& r);

/// sum over edges of R_ij (r_i + r_j).
double regge_functional(const Triangulation& t, const PackingVector& r);

struct CurvatureJacobian {
    Eigen::MatrixXd lambda_matrix;  // dK_i / dr_j
};

/// Requires a real packing with every tetrahedron above the degeneracy floor.
CurvatureJacobian curvature_jacobian(const Triangulation& t, const PackingVector& r, Exec exec = Exec::Parallel);

/// Orthonormal basis (N x (N-1)) of {x : sum x = 0}: the first N-1 columns of
/// the Householder reflection taking (1,...,1)/sqrt(N) to the last axis.
Eigen::MatrixXd hyperplane_basis(int n);

/// B^T Lambda B with B = hyperplane_basis(N).
Eigen::MatrixXd projected_hessian(const Triangulation& t, const PackingVector& r);

}  // namespace ballflow
