#include "ballflow/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ballflow/error.hpp"

namespace ballflow {

namespace {

constexpr double kPi = std::numbers::pi;

void check_sizes(const Triangulation& t, const PackingVector& r) {
    if (r.size() != static_cast<std::size_t>(t.num_vertices()))
        throw InputError("packing has " + std::to_string(r.size()) + " radii but the triangulation has " +
                         std::to_string(t.num_vertices()) + " vertices");
}

CurvatureReport assemble(const Triangulation& t, const PackingVector& r, bool extended, Exec exec) {
    check_sizes(t, r);
    kernels::TetEvaluation ev;
    kernels::evaluate_tets(exec, t, r.values(), ev);

    CurvatureReport rep;
    rep.min_q = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.num_tetrahedra(); ++i) {
        const TetClass& st = ev.status[i];
        rep.min_q = std::min(rep.min_q, st.is_real ? ev.q[i] : std::min(ev.q[i], 0.0));
        if (!st.is_real) {
            rep.is_real = false;
            rep.virtual_tets.push_back({i, t.tet(i)[st.apex]});
        }
    }
    if (!extended && !rep.is_real) {
        const VirtualTet& v = rep.virtual_tets.front();
        throw VirtualPackingError(v.tet, v.apex,
                                  "tetrahedron " + std::to_string(v.tet) + " is virtual (apex vertex " +
                                      std::to_string(v.apex) + "); use the extended curvature");
    }

    const std::vector<double> sums = kernels::vertex_angle_sums(exec, t, ev);
    const int n = t.num_vertices();
    rep.k.resize(n);
    rep.s_terms.resize(n);
    CompensatedSum s;
    for (int v = 0; v < n; ++v) {
        rep.k[v] = 4.0 * kPi - sums[v];
        rep.s_terms[v] = rep.k[v] * r[v];
        s.add(rep.s_terms[v]);
    }
    rep.s = s.value();
    rep.l1 = r.l1();
    rep.lambda = rep.s / rep.l1;
    return rep;
}

}  // namespace

double CurvatureReport::max_deviation() const {
    double m = 0.0;
    for (double x : k) m = std::max(m, std::abs(x - lambda));
    return m;
}

CurvatureReport curvature(const Triangulation& t, const PackingVector& r, Exec exec) {
    return assemble(t, r, false, exec);
}

CurvatureReport extended_curvature(const Triangulation& t, const PackingVector& r, Exec exec) {
    return assemble(t, r, true, exec);
}

double cooper_rivin(const Triangulation& t, const PackingVector& r) {
    return curvature(t, r).s;
}

double extended_cooper_rivin(const Triangulation& t, const PackingVector& r) {
    return extended_curvature(t, r).s;
}

double crg_functional(const Triangulation& t, const PackingVector& r) {
    return curvature(t, r).lambda;
}

double extended_crg(const Triangulation& t, const PackingVector& r) {
    return extended_curvature(t, r).lambda;
}

double alpha_functional(const Triangulation& t, const PackingVector& r, double alpha) {
    if (alpha == -1.0) throw InputError("alpha functional is undefined for alpha = -1");
    const double s = cooper_rivin(t, r);
    CompensatedSum norm;
    for (double x : r.values()) norm.add(std::pow(x, alpha + 1.0));
    return s / std::pow(norm.value(), 1.0 / (alpha + 1.0));
}

std::vector<double> edge_curvatures(const Triangulation& t, const PackingVector& r) {
    check_sizes(t, r);
    std::vector<std::array<double, 6>> beta(t.num_tetrahedra());
    for (std::size_t i = 0; i < t.num_tetrahedra(); ++i) {
        const Tet& tt = t.tet(i);
        const TetRadii tr(r[tt[0]], r[tt[1]], r[tt[2]], r[tt[3]]);
        const TetClass cls = classify(tr);
        if (!cls.is_real)
            throw VirtualPackingError(i, tt[cls.apex],
                                      "tetrahedron " + std::to_string(i) + " is virtual; edge curvature undefined");
        beta[i] = dihedral_angles(tr);
    }
    std::vector<double> out(t.num_edges());
    for (std::size_t e = 0; e < t.num_edges(); ++e) {
        const Edge& edge = t.edges()[e];
        CompensatedSum sum;
        for (int ti : t.edge_star(e)) {
            const Tet& tt = t.tet(ti);
            const int p = static_cast<int>(std::find(tt.begin(), tt.end(), edge.a) - tt.begin());
            const int q = static_cast<int>(std::find(tt.begin(), tt.end(), edge.b) - tt.begin());
            sum.add(beta[ti][local_edge_index(p, q)]);
        }
        out[e] = 2.0 * kPi - sum.value();
    }
    return out;
}

double regge_functional(const Triangulation& t, const PackingVector& r) {
    const std::vector<double> ricci = edge_curvatures(t, r);
    CompensatedSum sum;
    for (std::size_t e = 0; e < t.num_edges(); ++e) {
        const Edge& edge = t.edges()[e];
        sum.add(ricci[e] * (r[edge.a] + r[edge.b]));
    }
    return sum.value();
}

CurvatureJacobian curvature_jacobian(const Triangulation& t, const PackingVector& r, Exec exec) {
    check_sizes(t, r);
    // Surfaces the virtual-tetrahedron error with its index before the kernel runs.
    (void)curvature(t, r, exec);
    return {-kernels::angle_sum_jacobian(exec, t, r.values())};
}

Eigen::MatrixXd hyperplane_basis(int n) {
    if (n < 2) throw InputError("hyperplane basis needs at least two coordinates");
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    v(n - 1) -= 1.0;
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n) - 2.0 * v * v.transpose() / v.squaredNorm();
    return h.leftCols(n - 1);
}

Eigen::MatrixXd projected_hessian(const Triangulation& t, const PackingVector& r) {
    const Eigen::MatrixXd lambda = curvature_jacobian(t, r).lambda_matrix;
    const Eigen::MatrixXd b = hyperplane_basis(t.num_vertices());
    return b.transpose() * lambda * b;
}

}  // namespace ballflow
