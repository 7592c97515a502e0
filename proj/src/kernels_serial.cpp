#include "ballflow/kernels.hpp"

namespace ballflow::kernels {

void evaluate_tets_serial(const Triangulation& t, std::span<const double> r, TetEvaluation& out) {
    const std::size_t n = t.num_tetrahedra();
    out.angles.resize(n);
    out.q.resize(n);
    out.status.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Tet& tt = t.tet(i);
        const TetRadii tr(r[tt[0]], r[tt[1]], r[tt[2]], r[tt[3]]);
        out.q[i] = q_value(tr);
        out.status[i] = classify(tr);
        out.angles[i] = extended_solid_angles(tr);
    }
}

std::vector<double> vertex_angle_sums_serial(const Triangulation& t, const TetEvaluation& ev) {
    std::vector<double> sums(t.num_vertices(), 0.0);
    for (std::size_t i = 0; i < t.num_tetrahedra(); ++i) {
        const Tet& tt = t.tet(i);
        for (int p = 0; p < 4; ++p) sums[tt[p]] += ev.angles[i][p];
    }
    return sums;
}

Eigen::MatrixXd angle_sum_jacobian_serial(const Triangulation& t, std::span<const double> r) {
    const int n = t.num_vertices();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < t.num_tetrahedra(); ++i) {
        const Tet& tt = t.tet(i);
        const Mat4 local = solid_angle_jacobian(TetRadii(r[tt[0]], r[tt[1]], r[tt[2]], r[tt[3]]));
        for (int p = 0; p < 4; ++p)
            for (int q = 0; q < 4; ++q) jac(tt[p], tt[q]) += local[p][q];
    }
    return jac;
}

}  // namespace ballflow::kernels
