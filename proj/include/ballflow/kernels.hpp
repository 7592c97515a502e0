#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ballflow/tet_geometry.hpp"
#include "ballflow/triangulation.hpp"

// Per-tetrahedron kernels and their reductions onto vertices.  Every kernel
// exists twice: an OpenMP version used by the library and a plain serial
// version kept as the reference for tests and benchmarks.  The OpenMP
// reductions gather per vertex in vertex-star order with compensated
// summation, so results do not depend on the thread count.
namespace ballflow::kernels {

enum class Exec { Serial, Parallel };

struct TetEvaluation {
    std::vector<std::array<double, 4>> angles;  // extended solid angles, local order
    std::vector<double> q;
    std::vector<TetClass> status;
};

/// Evaluates classification, Q and extended solid angles of every tetrahedron.
void evaluate_tets_serial(const Triangulation& t, std::span<const double> r, TetEvaluation& out);
void evaluate_tets_omp(const Triangulation& t, std::span<const double> r, TetEvaluation& out);

/// Sum over incident tetrahedra of the angle at each vertex.
std::vector<double> vertex_angle_sums_serial(const Triangulation& t, const TetEvaluation& ev);
std::vector<double> vertex_angle_sums_omp(const Triangulation& t, const TetEvaluation& ev);

/// Dense d(angle sum)/dr assembled from per-tetrahedron angle Jacobians.
/// Requires every tetrahedron to be real and non-degenerate.
Eigen::MatrixXd angle_sum_jacobian_serial(const Triangulation& t, std::span<const double> r);
Eigen::MatrixXd angle_sum_jacobian_omp(const Triangulation& t, std::span<const double> r);

inline void evaluate_tets(Exec exec, const Triangulation& t, std::span<const double> r, TetEvaluation& out) {
    exec == Exec::Parallel ? evaluate_tets_omp(t, r, out) : evaluate_tets_serial(t, r, out);
}

inline std::vector<double> vertex_angle_sums(Exec exec, const Triangulation& t, const TetEvaluation& ev) {
    return exec == Exec::Parallel ? vertex_angle_sums_omp(t, ev) : vertex_angle_sums_serial(t, ev);
}

inline Eigen::MatrixXd angle_sum_jacobian(Exec exec, const Triangulation& t, std::span<const double> r) {
    return exec == Exec::Parallel ? angle_sum_jacobian_omp(t, r) : angle_sum_jacobian_serial(t, r);
}

}  // namespace ballflow::kernels
