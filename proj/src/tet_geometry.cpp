#include "ballflow/tet_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ballflow/triangulation.hpp"

namespace ballflow {

namespace {

constexpr double kPi = std::numbers::pi;

void check_radius(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InputError("radius must be positive and finite, got " + std::to_string(r));
}

// The three local vertices other than i, ascending.
std::array<int, 3> others(int i) {
    std::array<int, 3> o{};
    int k = 0;
    for (int p = 0; p < 4; ++p)
        if (p != i) o[k++] = p;
    return o;
}

// Angle at vertex p of the face (p, a, b) formed by tangent balls, returned as
// (cos, sin).  With l_pa = r_p + r_a etc., sin^2(theta/2) = r_a r_b / ((r_p + r_a)(r_p + r_b)).
std::pair<double, double> face_angle(double rp, double ra, double rb) {
    const double denom = (rp + ra) * (rp + rb);
    const double s = std::sqrt(ra * rb / denom);
    const double c = std::sqrt(rp * (rp + ra + rb) / denom);
    return {1.0 - 2.0 * s * s, 2.0 * s * c};
}

double clamp_cos(double c) {
    return std::clamp(c, -1.0, 1.0);
}

double inv_sum_sq(const TetRadii& r) {
    double s = 0.0;
    for (double x : r.values()) s += 1.0 / x;
    return s * s;
}

}  // namespace

TetRadii::TetRadii(double r0, double r1, double r2, double r3) : TetRadii(std::array<double, 4>{r0, r1, r2, r3}) {}

TetRadii::TetRadii(const std::array<double, 4>& r) : r_(r) {
    for (double x : r_) check_radius(x);
}

double regular_solid_angle() {
    return 3.0 * std::acos(1.0 / 3.0) - kPi;
}

double q_value(const TetRadii& r) {
    double sum = 0.0, sum_sq = 0.0;
    for (double x : r.values()) {
        sum += 1.0 / x;
        sum_sq += 1.0 / (x * x);
    }
    return sum * sum - 2.0 * sum_sq;
}

std::array<double, 4> q_gradient(const TetRadii& r) {
    double inv_sum = 0.0;
    for (double x : r.values()) inv_sum += 1.0 / x;
    std::array<double, 4> g{};
    for (int i = 0; i < 4; ++i) {
        const double ri = r[i];
        g[i] = -2.0 / (ri * ri) * (inv_sum - 2.0 / ri);
    }
    return g;
}

double critical_radius(double rj, double rk, double rl) {
    check_radius(rj);
    check_radius(rk);
    check_radius(rl);
    const double root = std::sqrt(1.0 / (rj * rk) + 1.0 / (rj * rl) + 1.0 / (rk * rl));
    return 1.0 / (1.0 / rj + 1.0 / rk + 1.0 / rl + 2.0 * root);
}

TetClass classify(const TetRadii& r) {
    if (q_value(r) > kBoundaryBand * inv_sum_sq(r)) return {true, -1};

    std::array<int, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return r[a] < r[b]; });
    const double smallest = r[order[0]], second = r[order[1]];
    if (second - smallest <= kTieTolerance * second)
        throw GeometryError("degenerate tetrahedron: Q <= 0 without a strict minimum radius");
    return {false, order[0]};
}

std::array<double, 6> edge_lengths(const TetRadii& r) {
    std::array<double, 6> l{};
    for (int e = 0; e < 6; ++e) l[e] = r[kTetEdges[e][0]] + r[kTetEdges[e][1]];
    return l;
}

std::array<Vec3, 4> embed_tetrahedron(const std::array<double, 6>& lengths) {
    for (double x : lengths)
        if (!(x > 0.0) || !std::isfinite(x)) throw GeometryError("edge lengths must be positive and finite");
    auto len = [&](int p, int q) { return lengths[local_edge_index(p, q)]; };

    for (int skip = 0; skip < 4; ++skip) {
        auto f = others(skip);
        const double a = len(f[0], f[1]), b = len(f[0], f[2]), c = len(f[1], f[2]);
        if (a >= b + c || b >= a + c || c >= a + b)
            throw GeometryError("face (" + std::to_string(f[0]) + "," + std::to_string(f[1]) + "," +
                                std::to_string(f[2]) + ") violates the triangle inequality");
    }

    const double d01 = len(0, 1), d02 = len(0, 2), d03 = len(0, 3);
    const double d12 = len(1, 2), d13 = len(1, 3), d23 = len(2, 3);

    std::array<Vec3, 4> p{};
    p[1] = {d01, 0.0, 0.0};
    const double x2 = (d01 * d01 + d02 * d02 - d12 * d12) / (2.0 * d01);
    const double y2 = std::sqrt(std::max(0.0, d02 * d02 - x2 * x2));
    p[2] = {x2, y2, 0.0};

    const double x3 = (d01 * d01 + d03 * d03 - d13 * d13) / (2.0 * d01);
    const double y3 = (d03 * d03 - d23 * d23 + x2 * x2 + y2 * y2 - 2.0 * x2 * x3) / (2.0 * y2);
    const double z3sq = d03 * d03 - x3 * x3 - y3 * y3;
    if (!(z3sq > 0.0)) throw GeometryError("lengths are not realisable by a non-degenerate tetrahedron");
    p[3] = {x3, y3, std::sqrt(z3sq)};
    return p;
}

std::array<double, 6> dihedral_angles(const TetRadii& r) {
    const TetClass cls = classify(r);
    if (!cls.is_real) throw VirtualPackingError(0, cls.apex, "dihedral angles requested for a virtual tetrahedron");

    std::array<double, 6> beta{};
    for (int e = 0; e < 6; ++e) {
        const int p = kTetEdges[e][0], q = kTetEdges[e][1];
        int k = -1, l = -1;
        for (int v = 0; v < 4; ++v) {
            if (v == p || v == q) continue;
            (k < 0 ? k : l) = v;
        }
        // Spherical triangle on the link of p with sides theta_qk, theta_ql, theta_kl;
        // the angle opposite theta_kl is the dihedral angle along pq.
        const auto [c_qk, s_qk] = face_angle(r[p], r[q], r[k]);
        const auto [c_ql, s_ql] = face_angle(r[p], r[q], r[l]);
        const auto [c_kl, s_kl] = face_angle(r[p], r[k], r[l]);
        (void)s_kl;
        beta[e] = std::acos(clamp_cos((c_kl - c_qk * c_ql) / (s_qk * s_ql)));
    }
    return beta;
}

namespace {

std::array<double, 4> angles_from_dihedrals(const std::array<double, 6>& beta) {
    std::array<double, 4> alpha{};
    for (int e = 0; e < 6; ++e) {
        alpha[kTetEdges[e][0]] += beta[e];
        alpha[kTetEdges[e][1]] += beta[e];
    }
    for (double& a : alpha) a -= kPi;
    return alpha;
}

}  // namespace

std::array<double, 4> solid_angles(const TetRadii& r) {
    return angles_from_dihedrals(dihedral_angles(r));
}

std::array<double, 4> extended_solid_angles(const TetRadii& r) {
    const TetClass cls = classify(r);
    if (cls.is_real) return solid_angles(r);
    std::array<double, 4> alpha{};
    alpha[cls.apex] = 2.0 * kPi;
    return alpha;
}

namespace {

double cayley_menger_volume(const TetRadii& r) {
    auto sq = [&](int p, int q) {
        const double l = r[p] + r[q];
        return l * l;
    };
    const double a = sq(0, 1), b = sq(0, 2), c = sq(0, 3), d = sq(1, 2), e = sq(1, 3), f = sq(2, 3);
    const double v144 = a * f * (b + c + d + e - a - f) + b * e * (a + c + d + f - b - e) +
                        c * d * (a + b + e + f - c - d) - a * b * d - a * c * e - b * c * f - d * e * f;
    return std::sqrt(std::max(0.0, v144) / 144.0);
}

}  // namespace

double volume(const TetRadii& r) {
    const TetClass cls = classify(r);
    if (!cls.is_real) throw VirtualPackingError(0, cls.apex, "volume requested for a virtual tetrahedron");
    return cayley_menger_volume(r);
}

double extended_volume(const TetRadii& r) {
    return classify(r).is_real ? cayley_menger_volume(r) : 0.0;
}

Mat4 solid_angle_jacobian(const TetRadii& r) {
    const TetClass cls = classify(r);
    if (!cls.is_real) throw VirtualPackingError(0, cls.apex, "angle Jacobian requested for a virtual tetrahedron");

    // Conformal tetrahedra satisfy V = r0 r1 r2 r3 sqrt(Q) / 3, which stays
    // accurate as Q -> 0 where Cayley-Menger cancels.
    const double q = q_value(r);
    const double vol = r[0] * r[1] * r[2] * r[3] * std::sqrt(std::max(0.0, q)) / 3.0;
    double mean_len = 0.0;
    for (double l : edge_lengths(r)) mean_len += l / 6.0;
    if (vol < kDegeneracyFloor * mean_len * mean_len * mean_len)
        throw GeometryError("tetrahedron is numerically degenerate (volume " + std::to_string(vol) + ")");

    Mat4 jac{};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if (i == j) continue;
            int k = -1, l = -1;
            for (int v = 0; v < 4; ++v) {
                if (v == i || v == j) continue;
                (k < 0 ? k : l) = v;
            }
            const double ri = r[i], rj = r[j], rk = r[k], rl = r[l];
            const double p_ijk = 2.0 * (ri + rj + rk), p_ijl = 2.0 * (ri + rj + rl);
            const double bracket = (1.0 / ri) * (1.0 / rj + 1.0 / rk + 1.0 / rl) +
                                   (1.0 / rj) * (1.0 / ri + 1.0 / rk + 1.0 / rl) -
                                   (1.0 / rk - 1.0 / rl) * (1.0 / rk - 1.0 / rl);
            jac[i][j] = 4.0 * ri * rj * rk * rk * rl * rl / (3.0 * p_ijk * p_ijl * vol) * bracket;
        }
        double off = 0.0;
        for (int j = 0; j < 4; ++j)
            if (j != i) off += jac[i][j] * r[j];
        jac[i][i] = -off / r[i];
    }
    return jac;
}

TetGeometry tet_geometry(const TetRadii& r) {
    TetGeometry g;
    g.q = q_value(r);
    g.lengths = edge_lengths(r);
    g.status = classify(r);
    if (g.status.is_real) {
        g.dihedral_angles = dihedral_angles(r);
        g.solid_angles = angles_from_dihedrals(g.dihedral_angles);
        g.volume = cayley_menger_volume(r);
    } else {
        g.solid_angles[g.status.apex] = 2.0 * kPi;
    }
    return g;
}

}  // namespace ballflow
