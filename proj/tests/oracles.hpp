#pragma once

// Independent reference computations used by the tests.  Nothing here calls
// into the angle code of the library: tetrahedra are placed in R^3 directly
// from tangent-ball edge lengths and measured with vector formulas.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using V3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;

inline double alpha_bar() { return 3.0 * std::acos(1.0 / 3.0) - kPi; }

inline double q(double a, double b, double c, double d) {
    const double s = 1 / a + 1 / b + 1 / c + 1 / d;
    return s * s - 2 * (1 / (a * a) + 1 / (b * b) + 1 / (c * c) + 1 / (d * d));
}

// Places p0 at the origin, p1 on the x axis, p2 in the xy plane.
inline std::array<V3, 4> place(const std::array<double, 4>& r) {
    auto len = [&](int i, int j) { return r[i] + r[j]; };
    const double d01 = len(0, 1), d02 = len(0, 2), d03 = len(0, 3);
    const double d12 = len(1, 2), d13 = len(1, 3), d23 = len(2, 3);
    std::array<V3, 4> p;
    p[0] = V3::Zero();
    p[1] = V3(d01, 0, 0);
    const double x2 = (d02 * d02 + d01 * d01 - d12 * d12) / (2 * d01);
    p[2] = V3(x2, std::sqrt(d02 * d02 - x2 * x2), 0);
    const double x3 = (d03 * d03 + d01 * d01 - d13 * d13) / (2 * d01);
    const double y3 = (d03 * d03 - d23 * d23 + p[2].squaredNorm() - 2 * x3 * p[2].x()) / (2 * p[2].y());
    p[3] = V3(x3, y3, std::sqrt(d03 * d03 - x3 * x3 - y3 * y3));
    return p;
}

// Solid angle at vertex i by the Van Oosterom-Strackee formula.
inline double solid_angle(const std::array<V3, 4>& p, int i) {
    std::array<V3, 3> v;
    int k = 0;
    for (int j = 0; j < 4; ++j)
        if (j != i) v[k++] = p[j] - p[i];
    const double a = v[0].norm(), b = v[1].norm(), c = v[2].norm();
    const double num = std::abs(v[0].dot(v[1].cross(v[2])));
    const double den = a * b * c + v[0].dot(v[1]) * c + v[0].dot(v[2]) * b + v[1].dot(v[2]) * a;
    double omega = 2 * std::atan2(num, den);
    if (omega < 0) omega += 2 * kPi;
    return omega;
}

inline std::array<double, 4> solid_angles(const std::array<double, 4>& r) {
    const auto p = place(r);
    return {solid_angle(p, 0), solid_angle(p, 1), solid_angle(p, 2), solid_angle(p, 3)};
}

// Extended angle: Van Oosterom when Q > 0, otherwise 2*pi at the smallest ball.
inline std::array<double, 4> extended_solid_angles(const std::array<double, 4>& r) {
    if (q(r[0], r[1], r[2], r[3]) > 0) return solid_angles(r);
    std::array<double, 4> out{};
    int m = 0;
    for (int i = 1; i < 4; ++i)
        if (r[i] < r[m]) m = i;
    out[m] = 2 * kPi;
    return out;
}

// Interior dihedral angle along edge (i, j) from the face normals.
inline double dihedral(const std::array<V3, 4>& p, int i, int j) {
    int k = -1, l = -1;
    for (int m = 0; m < 4; ++m) {
        if (m == i || m == j) continue;
        (k < 0 ? k : l) = m;
    }
    const V3 e = (p[j] - p[i]).normalized();
    V3 a = p[k] - p[i];
    V3 b = p[l] - p[i];
    a -= a.dot(e) * e;
    b -= b.dot(e) * e;
    return std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0));
}

// Volume from the Cayley-Menger determinant.
inline double cm_volume(const std::array<double, 4>& r) {
    Eigen::Matrix<double, 5, 5> m;
    m.setOnes();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double d = i == j ? 0.0 : r[i] + r[j];
            m(i + 1, j + 1) = d * d;
        }
    m(0, 0) = 0;
    return std::sqrt(m.determinant() / 288.0);
}

inline double fd_step(double x) { return 1e-6 * std::max(1.0, std::abs(x)); }

// Central difference of f along coordinate i.
inline double central_diff(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                           std::size_t i) {
    const double h = fd_step(x[i]);
    const double x0 = x[i];
    x[i] = x0 + h;
    const double fp = f(x);
    x[i] = x0 - h;
    const double fm = f(x);
    return (fp - fm) / (2 * h);
}

inline std::vector<double> log_uniform(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    std::vector<double> r(n);
    for (double& x : r) x = std::exp(u(rng));
    return r;
}

}  // namespace oracle
