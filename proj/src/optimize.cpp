#include "ballflow/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "ballflow/curvature.hpp"
#include "ballflow/error.hpp"

namespace ballflow {

namespace {

struct Point {
    std::vector<double> r;
    CurvatureReport rep;
    double f = 0.0;              // objective
    std::vector<double> grad;    // K~ - Kbar
    std::vector<double> pgrad;   // grad minus its mean
    double pnorm = 0.0;
    double f_scale = 0.0;        // magnitude of the terms summed into f
};

Point evaluate(const Triangulation& t, std::vector<double> r, const std::vector<double>& kbar) {
    Point p;
    p.rep = extended_curvature(t, PackingVector(r));
    p.r = std::move(r);
    const std::size_t n = p.r.size();
    p.grad.resize(n);
    CompensatedSum f;
    CompensatedSum mean;
    for (std::size_t i = 0; i < n; ++i) {
        const double target = kbar.empty() ? 0.0 : kbar[i];
        p.grad[i] = p.rep.k[i] - target;
        f.add(p.grad[i] * p.r[i]);
        p.f_scale += (std::abs(p.rep.k[i]) + std::abs(target)) * p.r[i];
        mean.add(p.grad[i]);
    }
    p.f = f.value();
    const double m = mean.value() / static_cast<double>(n);
    p.pgrad.resize(n);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        p.pgrad[i] = p.grad[i] - m;
        sq += p.pgrad[i] * p.pgrad[i];
    }
    p.pnorm = std::sqrt(sq);
    return p;
}

bool newton_allowed(const Point& p, const MinimizeConfig& config) {
    if (!config.newton || !p.rep.is_real) return false;
    const double scale = p.rep.l1 / static_cast<double>(p.r.size());
    return p.rep.min_q * scale * scale > config.newton_gate;
}

// Newton direction on the hyperplane, or empty when the projected Hessian is
// not positive definite.
std::vector<double> newton_direction(const Triangulation& t, const Point& p) {
    const int n = static_cast<int>(p.r.size());
    const Eigen::MatrixXd b = hyperplane_basis(n);
    Eigen::MatrixXd h;
    try {
        h = projected_hessian(t, PackingVector(p.r));
    } catch (const GeometryError&) {
        return {};
    }
    const Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(p.grad.data(), n);
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() != Eigen::Success) return {};
    const Eigen::VectorXd x = llt.solve(-(b.transpose() * g));
    const Eigen::VectorXd d = b * x;
    return {d.data(), d.data() + n};
}

void remove_mean(std::vector<double>& d) {
    const double m = compensated_sum(d) / static_cast<double>(d.size());
    for (double& x : d) x -= m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    CompensatedSum s;
    for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
    return s.value();
}

MinimizeResult minimize(const Triangulation& t, const std::vector<double>& kbar, const MinimizeConfig& config) {
    const std::size_t n = static_cast<std::size_t>(t.num_vertices());
    if (config.grad_tol <= 0.0 || config.max_iters < 0 || !(config.shrink > 0.0 && config.shrink < 1.0) ||
        !(config.sufficient_decrease > 0.0 && config.sufficient_decrease < 1.0))
        throw ConfigError("invalid minimization settings");
    if (!kbar.empty() && kbar.size() != n)
        throw InputError("target curvature has " + std::to_string(kbar.size()) + " entries, expected " +
                         std::to_string(n));
    const PackingVector start = config.r0 ? *config.r0 : PackingVector::uniform(n, 1.0);
    if (start.size() != n) throw InputError("starting packing has the wrong number of radii");

    Point cur = evaluate(t, start.vector(), kbar);
    MinimizeResult res{start, 0.0, 0.0, false, 0, false, {}, 0.0, {}};
    res.objective_history.push_back(cur.rep.s);
    double eta_prev = 0.1 * cur.rep.l1 / static_cast<double>(n);

    int it = 0;
    for (; it < config.max_iters; ++it) {
        if (cur.pnorm <= config.grad_tol) {
            res.converged = true;
            res.stop_reason = "projected gradient below tolerance";
            break;
        }
        std::vector<double> d;
        bool newton = false;
        if (newton_allowed(cur, config)) {
            d = newton_direction(t, cur);
            newton = !d.empty() && dot(d, cur.grad) < 0.0;
        }
        if (!newton) {
            d = cur.pgrad;
            for (double& x : d) x = -x;
        }
        remove_mean(d);
        const double slope = dot(d, cur.grad);
        if (!(slope < 0.0)) {
            res.stop_reason = "no descent direction";
            break;
        }

        double eta = newton ? 1.0 : 2.0 * eta_prev;
        // keep every radius above half its current value
        for (std::size_t i = 0; i < n; ++i)
            if (d[i] < 0.0) eta = std::min(eta, 0.5 * cur.r[i] / -d[i]);

        bool accepted = false;
        Point next;
        while (eta > 0.0) {
            std::vector<double> r(n);
            for (std::size_t i = 0; i < n; ++i) r[i] = cur.r[i] + eta * d[i];
            next = evaluate(t, std::move(r), kbar);
            const double armijo = cur.f + config.sufficient_decrease * eta * slope;
            const bool decrease = next.f < armijo;
            // Near a minimizer the decrease falls below the rounding noise of
            // f; a Newton step is then accepted on gradient progress.
            const double noise = 64.0 * std::numeric_limits<double>::epsilon() * cur.f_scale;
            const bool noisy = newton && std::abs(next.f - cur.f) <= noise && next.pnorm < cur.pnorm;
            if (decrease || noisy) {
                accepted = true;
                break;
            }
            eta *= config.shrink;
            if (eta < 1e-18 * cur.rep.l1) break;
        }
        if (!accepted) {
            res.stop_reason = "line search failed";
            break;
        }
        if (!newton) eta_prev = eta;
        cur = std::move(next);
        res.objective_history.push_back(cur.rep.s);
        const auto [lo, hi] = std::minmax_element(cur.r.begin(), cur.r.end());
        if (*lo < 1e-10 * *hi) {
            res.stop_reason = "radius underflow";
            ++it;
            break;
        }
    }
    if (it == config.max_iters && !res.converged && res.stop_reason.empty()) {
        if (cur.pnorm <= config.grad_tol) {
            res.converged = true;
            res.stop_reason = "projected gradient below tolerance";
        } else {
            res.stop_reason = "iteration limit";
        }
    }

    res.r_star = PackingVector(cur.r);
    res.value = cur.f / cur.rep.l1;
    res.projected_grad_norm = cur.pnorm;
    res.is_real = cur.rep.is_real;
    res.iterations = it;
    if (!kbar.empty()) {
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(cur.grad[i]));
        res.curvature_error = err;
    }
    return res;
}

}  // namespace

MinimizeResult minimize_extended(const Triangulation& t, const MinimizeConfig& config) {
    return minimize(t, {}, config);
}

MinimizeResult solve_prescribed(const Triangulation& t, const std::vector<double>& target,
                                const MinimizeConfig& config) {
    if (target.size() != static_cast<std::size_t>(t.num_vertices()))
        throw InputError("target curvature has " + std::to_string(target.size()) + " entries, expected " +
                         std::to_string(t.num_vertices()));
    for (double x : target)
        if (!std::isfinite(x)) throw InputError("target curvature must be finite");
    return minimize(t, target, config);
}

double yamabe_invariant_estimate(const Triangulation& t, const MinimizeConfig& config) {
    return minimize_extended(t, config).value;
}

std::vector<PackingVector> random_starts(std::size_t n, int count, double l1, std::uint64_t seed, double lo,
                                         double hi) {
    if (n == 0 || count < 0 || !(lo > 0.0 && hi >= lo) || !(l1 > 0.0))
        throw InputError("invalid random start settings");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    std::vector<PackingVector> out;
    out.reserve(count);
    for (int c = 0; c < count; ++c) {
        std::vector<double> r(n);
        for (double& x : r) x = std::exp(u(rng));
        const double s = compensated_sum(r);
        for (double& x : r) x *= l1 / s;
        out.emplace_back(std::move(r));
    }
    return out;
}

RayProfile ray_profile(const Triangulation& t, const PackingVector& r_hat, std::span<const double> gamma,
                       int n_samples) {
    const std::size_t n = r_hat.size();
    if (gamma.size() != n) throw InputError("ray direction has the wrong length");
    if (n_samples < 2) throw InputError("a ray profile needs at least two samples");
    if (std::abs(compensated_sum(gamma)) > 1e-9) throw InputError("ray direction must sum to zero");
    double sq = 0.0;
    for (double g : gamma) sq += g * g;
    if (std::abs(std::sqrt(sq) - 1.0) > 1e-9) throw InputError("ray direction must have unit norm");

    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        if (gamma[i] < 0.0) bound = std::min(bound, r_hat[i] / -gamma[i]);

    RayProfile prof;
    prof.t_bound = bound;
    prof.sup_lambda = -std::numeric_limits<double>::infinity();
    const double decades = 8.0;
    for (int k = 0; k < n_samples; ++k) {
        const double gap = std::pow(10.0, -decades * k / (n_samples - 1));
        const double s = k == 0 ? 0.0 : bound * (1.0 - gap);
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = std::max(r_hat[i] + s * gamma[i], 0.0);
        // rounding can leave the bounding coordinate at zero
        bool positive = true;
        for (double x : r) positive = positive && x > 0.0;
        if (!positive) continue;
        const double lam = extended_curvature(t, PackingVector(std::move(r)), Exec::Serial).lambda;
        if (lam > prof.sup_lambda) {
            prof.sup_lambda = lam;
            prof.t_at_sup = s;
        }
    }
    return prof;
}

ChiEstimate chi_estimate(const Triangulation& t, const PackingVector& r_hat, int n_rays, int n_samples,
                         std::uint64_t seed) {
    if (n_rays < 1) throw InputError("chi estimate needs at least one ray");
    const std::size_t n = r_hat.size();
    if (n < 2) throw InputError("chi estimate needs at least two vertices");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<std::vector<double>> rays(n_rays);
    for (auto& g : rays) {
        double norm = 0.0;
        while (norm < 1e-12) {
            g.assign(n, 0.0);
            for (double& x : g) x = normal(rng);
            remove_mean(g);
            norm = std::sqrt(dot(g, g));
        }
        for (double& x : g) x /= norm;
    }

    std::vector<double> sups(n_rays);
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < n_rays; ++k) sups[k] = ray_profile(t, r_hat, rays[k], n_samples).sup_lambda;

    ChiEstimate est;
    est.n_rays = n_rays;
    est.n_samples = n_samples;
    est.seed = seed;
    est.lambda_hat = extended_curvature(t, r_hat).lambda;
    est.value = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_rays; ++k) {
        if (sups[k] < est.value) {
            est.value = sups[k];
            est.best_ray = k;
        }
    }
    return est;
}

}  // namespace ballflow
