#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ballflow/curvature.hpp"
#include "ballflow/packing.hpp"
#include "ballflow/triangulation.hpp"

namespace ballflow {

/// Normalized:          r_i' = (lambda - K_i) r_i        (real packings only)
/// Extended:            r_i' = (lambda~ - K~_i) r_i      (any positive packing)
/// Prescribed:          r_i' = (Kbar_i - K_i) r_i        (real packings only)
/// PrescribedExtended:  r_i' = (Kbar_i - K~_i) r_i
enum class FlowMode { Normalized, Extended, Prescribed, PrescribedExtended };

bool is_real_mode(FlowMode mode);
bool is_prescribed_mode(FlowMode mode);
std::string to_string(FlowMode mode);
FlowMode flow_mode_from_string(const std::string& name);

inline constexpr double kRadiusUnderflow = 1e-10;
inline constexpr double kRadiusOverflow = 1e10;

struct FlowConfig {
    FlowMode mode = FlowMode::Extended;
    std::vector<double> target;  // prescribed curvature, prescribed modes only
    double dt_init = 1e-2;
    double dt_min = 1e-8;
    double dt_max = 0.5;
    double t_max = 1000.0;
    double conv_tol = 1e-8;
    bool renormalize = false;
    int record_every = 1;

    /// Throws ConfigError when the fields are inconsistent with each other or
    /// with a packing of `num_vertices` radii.
    void validate(std::size_t num_vertices) const;
};

struct FlowRecord {
    double t = 0.0;
    std::vector<double> r;
    std::vector<double> k;  // extended curvature (equal to K on real packings)
    double lambda = 0.0;
    double s = 0.0;
    double l1 = 0.0;
    double min_q = 0.0;
    double min_ratio = 1.0;
    std::vector<std::size_t> virtual_tets;
};

struct FlowTrace {
    FlowMode mode = FlowMode::Extended;
    std::vector<FlowRecord> records;
};

enum class BoundaryKind { QCollapse, ZeroRadius, Blowup };
std::string to_string(BoundaryKind kind);

struct Boundary {
    BoundaryKind kind = BoundaryKind::QCollapse;
    std::size_t index = 0;  // tetrahedron for QCollapse, vertex otherwise
    double t = 0.0;
};

enum class FlowStatus { Converged, BoundaryHit, TimeLimit };
std::string to_string(FlowStatus status);

struct FlowOutcome {
    FlowStatus status = FlowStatus::TimeLimit;
    std::optional<Boundary> boundary;
    PackingVector final_r;
    double residual = 0.0;  // convergence residual at final_r
    std::size_t steps = 0;
    std::size_t rejected = 0;
    FlowTrace trace;
};

/// The flow vector field dr/dt.  Real modes throw VirtualPackingError on
/// virtual input.
std::vector<double> rhs(const Triangulation& t, const PackingVector& r, FlowMode mode,
                        const std::vector<double>& target = {});

/// Convergence residual: max_i |lambda - K_i| (or |Kbar_i - K_i| in
/// prescribed modes) using the curvature appropriate to the mode.
double flow_residual(const CurvatureReport& rep, FlowMode mode, const std::vector<double>& target = {});

/// One classical Runge-Kutta 4 step of size dt in u = ln r; rescales to the
/// incoming l1 norm when config.renormalize is set.
PackingVector step(const Triangulation& t, const PackingVector& r, double dt, const FlowConfig& config);

/// Integrates the flow with the adaptive step rule until convergence, a
/// boundary event, or config.t_max.
FlowOutcome run(const Triangulation& t, const PackingVector& r0, const FlowConfig& config);

/// Reads the terminal record of a boundary trace.  Throws Error when the
/// trace does not end at a boundary.
Boundary classify_boundary(const FlowTrace& trace);

/// Tetrahedra in which radius order does not reverse curvature order, i.e.
/// some pair has (r_i - r_j)(K_i - K_j) > 0.  Real packings only.
std::vector<std::size_t> monotonicity_check(const Triangulation& t, const PackingVector& r);

/// min_{p,q} r_p / r_q.
double min_ratio(std::span<const double> r);
inline double min_ratio(const PackingVector& r) {
    return min_ratio(r.values());
}

}  // namespace ballflow
