#include "ballflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ballflow/error.hpp"

namespace ballflow {

namespace {

// A step is rejected when the dissipation sum_i r_i (du_i/dt)^2 grows by more
// than this factor.  Near a constant-curvature packing the dissipation
// decays monotonically, so growth at that scale signals RK4 instability.
constexpr double kDissipationGrowth = 1.5;
constexpr double kMaxLogStep = 0.5;
// Sum r is invariant for the normalized and extended flows, so its change
// over one step measures local truncation error.  Steps whose relative
// defect exceeds this are rejected.
constexpr double kConservationDefect = 2e-11;
constexpr int kGrowAfter = 5;
constexpr double kGrowFactor = 1.2;
constexpr int kSustain = 3;

struct State {
    std::vector<double> u;
    CurvatureReport rep;
    std::vector<double> du;  // du/dt
    double dissipation = 0.0;
};

std::vector<double> exp_all(const std::vector<double>& u) {
    std::vector<double> r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = std::exp(u[i]);
    return r;
}

CurvatureReport evaluate(const Triangulation& t, const PackingVector& r, FlowMode mode) {
    return is_real_mode(mode) ? curvature(t, r) : extended_curvature(t, r);
}

std::vector<double> log_velocity(const CurvatureReport& rep, FlowMode mode, const std::vector<double>& target) {
    std::vector<double> du(rep.k.size());
    for (std::size_t i = 0; i < du.size(); ++i)
        du[i] = (is_prescribed_mode(mode) ? target[i] : rep.lambda) - rep.k[i];
    return du;
}

double dissipation(const std::vector<double>& r, const std::vector<double>& du) {
    CompensatedSum num, den;
    for (std::size_t i = 0; i < r.size(); ++i) {
        num.add(r[i] * du[i] * du[i]);
        den.add(r[i]);
    }
    return num.value() / den.value();
}

State make_state(const Triangulation& t, std::vector<double> u, const FlowConfig& cfg) {
    State s;
    PackingVector r(exp_all(u));
    s.rep = evaluate(t, r, cfg.mode);
    s.du = log_velocity(s.rep, cfg.mode, cfg.target);
    s.dissipation = dissipation(r.vector(), s.du);
    s.u = std::move(u);
    return s;
}

void renormalize_to(std::vector<double>& u, double l1) {
    const double current = compensated_sum(exp_all(u));
    const double shift = std::log(l1 / current);
    for (double& x : u) x += shift;
}

// One RK4 stage evaluation u -> du/dt.  Throws VirtualPackingError in real modes.
std::vector<double> velocity_at(const Triangulation& t, const std::vector<double>& u, const FlowConfig& cfg) {
    const CurvatureReport rep = evaluate(t, PackingVector(exp_all(u)), cfg.mode);
    return log_velocity(rep, cfg.mode, cfg.target);
}

// Thrown by rk4 when a stage point leaves the real region in a real mode.
struct StageOutsideRealRegion {
    std::vector<double> u;
};

std::vector<double> rk4(const Triangulation& t, const std::vector<double>& u, const std::vector<double>& k1,
                        double h, const FlowConfig& cfg) {
    const std::size_t n = u.size();
    auto stage = [&](const std::vector<double>& k, double c) {
        std::vector<double> point(n);
        for (std::size_t i = 0; i < n; ++i) point[i] = u[i] + c * h * k[i];
        try {
            return velocity_at(t, point, cfg);
        } catch (const VirtualPackingError&) {
            throw StageOutsideRealRegion{std::move(point)};
        }
    };
    const auto k2 = stage(k1, 0.5);
    const auto k3 = stage(k2, 0.5);
    const auto k4 = stage(k3, 1.0);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = u[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

FlowRecord make_record(double time, const State& s, FlowMode) {
    FlowRecord rec;
    rec.t = time;
    rec.r = exp_all(s.u);
    rec.k = s.rep.k;
    rec.lambda = s.rep.lambda;
    rec.s = s.rep.s;
    rec.l1 = s.rep.l1;
    rec.min_q = s.rep.min_q;
    rec.min_ratio = min_ratio(rec.r);
    for (const VirtualTet& v : s.rep.virtual_tets) rec.virtual_tets.push_back(v.tet);
    return rec;
}

// Record of a point that left the real region; evaluated with the extended
// curvature so that it stays consistent with recomputation.
FlowRecord boundary_record(const Triangulation& t, double time, const std::vector<double>& u) {
    State s;
    s.u = u;
    s.rep = extended_curvature(t, PackingVector(exp_all(u)));
    return make_record(time, s, FlowMode::Extended);
}

struct Attempt {
    std::optional<State> state;
    bool left_real_region = false;
    std::vector<double> witness;  // point outside the real region, when left_real_region
};

std::optional<Boundary> radius_boundary(const std::vector<double>& r, double time) {
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] < kRadiusUnderflow) return Boundary{BoundaryKind::ZeroRadius, i, time};
        if (r[i] > kRadiusOverflow) return Boundary{BoundaryKind::Blowup, i, time};
    }
    return std::nullopt;
}

}  // namespace

bool is_real_mode(FlowMode mode) {
    return mode == FlowMode::Normalized || mode == FlowMode::Prescribed;
}

bool is_prescribed_mode(FlowMode mode) {
    return mode == FlowMode::Prescribed || mode == FlowMode::PrescribedExtended;
}

std::string to_string(FlowMode mode) {
    switch (mode) {
        case FlowMode::Normalized: return "normalized";
        case FlowMode::Extended: return "extended";
        case FlowMode::Prescribed: return "prescribed";
        case FlowMode::PrescribedExtended: return "prescribed-extended";
    }
    return "?";
}

FlowMode flow_mode_from_string(const std::string& name) {
    for (FlowMode m : {FlowMode::Normalized, FlowMode::Extended, FlowMode::Prescribed, FlowMode::PrescribedExtended})
        if (to_string(m) == name) return m;
    throw ConfigError("unknown flow mode '" + name + "'");
}

std::string to_string(BoundaryKind kind) {
    switch (kind) {
        case BoundaryKind::QCollapse: return "QCollapse";
        case BoundaryKind::ZeroRadius: return "ZeroRadius";
        case BoundaryKind::Blowup: return "Blowup";
    }
    return "?";
}

std::string to_string(FlowStatus status) {
    switch (status) {
        case FlowStatus::Converged: return "Converged";
        case FlowStatus::BoundaryHit: return "BoundaryHit";
        case FlowStatus::TimeLimit: return "TimeLimit";
    }
    return "?";
}

void FlowConfig::validate(std::size_t num_vertices) const {
    auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
    if (!positive(dt_init) || !positive(dt_min) || !positive(dt_max))
        throw ConfigError("time steps must be positive and finite");
    if (!(dt_min <= dt_init && dt_init <= dt_max)) throw ConfigError("need dt_min <= dt_init <= dt_max");
    if (!positive(t_max)) throw ConfigError("t_max must be positive and finite");
    if (!positive(conv_tol)) throw ConfigError("conv_tol must be positive");
    if (record_every < 1) throw ConfigError("record_every must be at least 1");
    if (is_prescribed_mode(mode)) {
        if (target.size() != num_vertices)
            throw ConfigError("prescribed curvature has " + std::to_string(target.size()) + " entries, expected " +
                              std::to_string(num_vertices));
        for (double k : target)
            if (!std::isfinite(k)) throw ConfigError("prescribed curvature must be finite");
    } else if (!target.empty()) {
        throw ConfigError("a target curvature is only meaningful in prescribed modes");
    }
}

std::vector<double> rhs(const Triangulation& t, const PackingVector& r, FlowMode mode,
                        const std::vector<double>& target) {
    if (is_prescribed_mode(mode) && target.size() != r.size())
        throw ConfigError("prescribed curvature size does not match the packing");
    const CurvatureReport rep = evaluate(t, r, mode);
    std::vector<double> out = log_velocity(rep, mode, target);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= r[i];
    return out;
}

double flow_residual(const CurvatureReport& rep, FlowMode mode, const std::vector<double>& target) {
    double m = 0.0;
    for (std::size_t i = 0; i < rep.k.size(); ++i)
        m = std::max(m, std::abs((is_prescribed_mode(mode) ? target[i] : rep.lambda) - rep.k[i]));
    return m;
}

PackingVector step(const Triangulation& t, const PackingVector& r, double dt, const FlowConfig& config) {
    if (!(dt > 0.0)) throw ConfigError("step size must be positive");
    config.validate(r.size());
    std::vector<double> u(r.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::log(r[i]);
    const auto k1 = velocity_at(t, u, config);
    std::vector<double> next;
    try {
        next = rk4(t, u, k1, dt, config);
    } catch (const StageOutsideRealRegion&) {
        throw VirtualPackingError(0, -1, "a Runge-Kutta stage left the real region");
    }
    if (config.renormalize) renormalize_to(next, r.l1());
    return PackingVector(exp_all(next));
}

FlowOutcome run(const Triangulation& t, const PackingVector& r0, const FlowConfig& config) {
    config.validate(r0.size());
    if (static_cast<int>(r0.size()) != t.num_vertices())
        throw InputError("initial packing size does not match the triangulation");

    const std::size_t n = r0.size();
    const double l1_0 = r0.l1();
    std::vector<double> u0(n);
    for (std::size_t i = 0; i < n; ++i) u0[i] = std::log(r0[i]);

    // Real modes need a real start; curvature() reports the offending tetrahedron.
    State cur = make_state(t, std::move(u0), config);

    FlowTrace trace{config.mode, {}};
    trace.records.push_back(make_record(0.0, cur, config.mode));

    const bool conserving = !is_prescribed_mode(config.mode) && !config.renormalize;
    double time = 0.0;
    double dt = config.dt_init;
    int accepted_streak = 0;
    int sustained = 0;
    std::size_t steps = 0, rejected = 0;
    std::optional<Boundary> boundary;
    FlowStatus status = FlowStatus::TimeLimit;

    double residual = flow_residual(cur.rep, config.mode, config.target);
    auto finish = [&](FlowStatus st) {
        if (trace.records.back().t != time) trace.records.push_back(make_record(time, cur, config.mode));
        status = st;
    };

    if (residual <= config.conv_tol) {
        status = FlowStatus::Converged;
    } else {
        while (true) {
            if (time >= config.t_max) {
                finish(FlowStatus::TimeLimit);
                break;
            }
            const double h = std::min(dt, config.t_max - time);

            auto attempt = [&](double step_size, bool force) -> Attempt {
                std::vector<double> u_next;
                try {
                    u_next = rk4(t, cur.u, cur.du, step_size, config);
                } catch (const StageOutsideRealRegion& e) {
                    return {std::nullopt, true, e.u};
                }
                if (config.renormalize) renormalize_to(u_next, l1_0);
                double max_du = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (!std::isfinite(u_next[i])) return {std::nullopt, false, {}};
                    max_du = std::max(max_du, std::abs(u_next[i] - cur.u[i]));
                }
                if (!force && max_du > kMaxLogStep) return {std::nullopt, false, {}};
                if (!force && conserving) {
                    const double l1_next = compensated_sum(exp_all(u_next));
                    if (std::abs(l1_next / cur.rep.l1 - 1.0) > kConservationDefect) return {std::nullopt, false, {}};
                }
                std::vector<double> witness = u_next;
                try {
                    State s = make_state(t, std::move(u_next), config);
                    if (!force && s.dissipation > kDissipationGrowth * cur.dissipation + 1e-300)
                        return {std::nullopt, false, {}};
                    return {std::move(s), false, {}};
                } catch (const VirtualPackingError&) {
                    return {std::nullopt, true, std::move(witness)};
                }
            };

            Attempt a = attempt(h, false);
            double taken = h;
            if (!a.state && !a.left_real_region && h * 0.5 < config.dt_min) {
                // dt_min reached without a geometric obstruction: take the step anyway.
                taken = config.dt_min;
                a = attempt(taken, true);
            }
            if (!a.state) {
                ++rejected;
                accepted_streak = 0;
                if (h * 0.5 >= config.dt_min) {
                    dt = h * 0.5;
                    continue;
                }
                if (!a.left_real_region) throw Error("flow produced a non-finite state at the minimum step size");
                // Cannot shrink further: the trajectory reaches Q = 0 within dt_min.
                FlowRecord last = boundary_record(t, time + taken, a.witness);
                std::size_t tet = 0;
                if (last.virtual_tets.empty()) {
                    // The witness is still (barely) real; name the flattest tetrahedron.
                    double q_min = std::numeric_limits<double>::infinity();
                    for (std::size_t ti = 0; ti < t.num_tetrahedra(); ++ti) {
                        const Tet& tt = t.tet(ti);
                        const double q = q_value(TetRadii(last.r[tt[0]], last.r[tt[1]], last.r[tt[2]], last.r[tt[3]]));
                        if (q < q_min) q_min = q, tet = ti;
                    }
                    last.virtual_tets.push_back(tet);
                    last.min_q = std::min(last.min_q, 0.0);
                } else {
                    tet = last.virtual_tets.front();
                }
                if (trace.records.back().t != time) trace.records.push_back(make_record(time, cur, config.mode));
                trace.records.push_back(std::move(last));
                boundary = Boundary{BoundaryKind::QCollapse, tet, time + taken};
                status = FlowStatus::BoundaryHit;
                break;
            }
            if (taken != h) dt = taken;
            const double h_done = taken;
            State next = std::move(*a.state);
            cur = std::move(next);
            time += h_done;
            ++steps;
            if (++accepted_streak >= kGrowAfter) {
                dt = std::min(dt * kGrowFactor, config.dt_max);
                accepted_streak = 0;
            }

            const std::vector<double> r = exp_all(cur.u);
            if (auto b = radius_boundary(r, time)) {
                boundary = b;
                finish(FlowStatus::BoundaryHit);
                break;
            }

            residual = flow_residual(cur.rep, config.mode, config.target);
            sustained = residual <= config.conv_tol ? sustained + 1 : 0;
            if (sustained >= kSustain) {
                finish(FlowStatus::Converged);
                break;
            }
            if (steps % static_cast<std::size_t>(config.record_every) == 0)
                trace.records.push_back(make_record(time, cur, config.mode));
        }
    }

    return FlowOutcome{status,
                       boundary,
                       PackingVector(exp_all(cur.u)),
                       flow_residual(cur.rep, config.mode, config.target),
                       steps,
                       rejected,
                       std::move(trace)};
}

Boundary classify_boundary(const FlowTrace& trace) {
    if (trace.records.empty()) throw Error("empty trace");
    const FlowRecord& last = trace.records.back();
    if (auto b = radius_boundary(last.r, last.t)) return *b;
    if (is_real_mode(trace.mode) && (!last.virtual_tets.empty() || last.min_q <= 0.0)) {
        if (last.virtual_tets.empty()) throw Error("trace reports Q <= 0 without naming a tetrahedron");
        return Boundary{BoundaryKind::QCollapse, last.virtual_tets.front(), last.t};
    }
    throw Error("trace does not end at a boundary");
}

std::vector<std::size_t> monotonicity_check(const Triangulation& t, const PackingVector& r) {
    const CurvatureReport rep = curvature(t, r);
    std::vector<std::size_t> out;
    for (std::size_t ti = 0; ti < t.num_tetrahedra(); ++ti) {
        const Tet& tt = t.tet(ti);
        bool bad = false;
        for (int p = 0; p < 4 && !bad; ++p)
            for (int q = p + 1; q < 4 && !bad; ++q)
                bad = (r[tt[p]] - r[tt[q]]) * (rep.k[tt[p]] - rep.k[tt[q]]) > 0.0;
        if (bad) out.push_back(ti);
    }
    return out;
}

double min_ratio(std::span<const double> r) {
    if (r.empty()) throw InputError("min_ratio of an empty packing");
    const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
    return *lo / *hi;
}

}  // namespace ballflow
