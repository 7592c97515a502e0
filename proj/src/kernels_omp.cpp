#include <omp.h>

#include <algorithm>
#include <limits>

#include "ballflow/kernels.hpp"
#include "ballflow/packing.hpp"

namespace ballflow::kernels {

namespace {

// Exceptions cannot cross an OpenMP region.  Failing tetrahedra are recorded
// and the lowest-index one is re-evaluated outside the region to rethrow.
class FirstFailure {
public:
    void record(std::ptrdiff_t i) {
#pragma omp critical(ballflow_first_failure)
        first_ = std::min(first_, i);
    }
    bool any() const { return first_ != kNone; }
    std::ptrdiff_t index() const { return first_; }

private:
    static constexpr std::ptrdiff_t kNone = std::numeric_limits<std::ptrdiff_t>::max();
    std::ptrdiff_t first_ = kNone;
};

}  // namespace

void evaluate_tets_omp(const Triangulation& t, std::span<const double> r, TetEvaluation& out) {
    const auto n = static_cast<std::ptrdiff_t>(t.num_tetrahedra());
    out.angles.resize(n);
    out.q.resize(n);
    out.status.resize(n);
    FirstFailure failure;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            const Tet& tt = t.tet(i);
            const TetRadii tr(r[tt[0]], r[tt[1]], r[tt[2]], r[tt[3]]);
            out.q[i] = q_value(tr);
            out.status[i] = classify(tr);
            out.angles[i] = extended_solid_angles(tr);
        } catch (...) {
            failure.record(i);
        }
    }
    if (failure.any()) {
        const Tet& tt = t.tet(failure.index());
        (void)extended_solid_angles(TetRadii(r[tt[0]], r[tt[1]], r[tt[2]], r[tt[3]]));
    }
}

std::vector<double> vertex_angle_sums_omp(const Triangulation& t, const TetEvaluation& ev) {
    const int n = t.num_vertices();
    std::vector<double> sums(n, 0.0);
#pragma omp parallel for schedule(static)
    for (int v = 0; v < n; ++v) {
        CompensatedSum acc;
        for (int ti : t.vertex_star(v)) {
            const Tet& tt = t.tet(ti);
            const int local = static_cast<int>(std::find(tt.begin(), tt.end(), v) - tt.begin());
            acc.add(ev.angles[ti][local]);
        }
        sums[v] = acc.value();
    }
    return sums;
}

Eigen::MatrixXd angle_sum_jacobian_omp(const Triangulation& t, std::span<const double> r) {
    const auto num_tets = static_cast<std::ptrdiff_t>(t.num_tetrahedra());
    std::vector<Mat4> local(num_tets);
    FirstFailure failure;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < num_tets; ++i) {
        try {
            const Tet& tt = t.tet(i);
            local[i] = solid_angle_jacobian(TetRadii(r[tt[0]], r[tt[1]], r[tt[2]], r[tt[3]]));
        } catch (...) {
            failure.record(i);
        }
    }
    if (failure.any()) {
        const Tet& tt = t.tet(failure.index());
        (void)solid_angle_jacobian(TetRadii(r[tt[0]], r[tt[1]], r[tt[2]], r[tt[3]]));
    }

    const int n = t.num_vertices();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    // Row v gathers from the star of v in a fixed order.
#pragma omp parallel for schedule(dynamic, 16)
    for (int v = 0; v < n; ++v) {
        for (int ti : t.vertex_star(v)) {
            const Tet& tt = t.tet(ti);
            const int p = static_cast<int>(std::find(tt.begin(), tt.end(), v) - tt.begin());
            for (int q = 0; q < 4; ++q) jac(v, tt[q]) += local[ti][p][q];
        }
    }
    return jac;
}

}  // namespace ballflow::kernels
