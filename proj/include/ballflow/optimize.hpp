#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ballflow/packing.hpp"
#include "ballflow/triangulation.hpp"

namespace ballflow {

struct MinimizeConfig {
    double grad_tol = 1e-10;  // on the Euclidean norm of the projected gradient
    int max_iters = 20000;
    std::optional<PackingVector> r0;  // all ones when absent
    double shrink = 0.5;              // backtracking factor
    double sufficient_decrease = 1e-4;
    bool newton = true;
    /// Newton steps are used only when every tetrahedron has
    /// Q * (l1/N)^2 above this gate.
    double newton_gate = 0.01;
};

struct MinimizeResult {
    PackingVector r_star;
    double value = 0.0;  // extended CRG (or prescribed CRG) functional at r_star
    double projected_grad_norm = 0.0;
    bool is_real = false;
    int iterations = 0;
    bool converged = false;
    std::string stop_reason;
    /// Prescribed problems: max_i |K~_i - Kbar_i| at r_star.  Zero otherwise.
    double curvature_error = 0.0;
    /// Extended functional after every accepted iterate, starting with r0.
    std::vector<double> objective_history;
};

/// Minimizes the extended Cooper-Rivin functional over {sum r = sum r0} by
/// projected gradient descent with Armijo backtracking, switching to Newton
/// steps on the projected Hessian deep inside the real region.
MinimizeResult minimize_extended(const Triangulation& t, const MinimizeConfig& config);

/// Minimizes sum_i (K~_i - Kbar_i) r_i over the same simplex.  The result
/// solves the prescribed problem when converged, real and curvature_error is
/// small; a converged minimizer only guarantees K~ - Kbar is constant.
MinimizeResult solve_prescribed(const Triangulation& t, const std::vector<double>& target,
                                const MinimizeConfig& config);

/// Extended CRG value at the minimizer found by minimize_extended.
double yamabe_invariant_estimate(const Triangulation& t, const MinimizeConfig& config);

/// Starting packings drawn log-uniformly from [lo, hi]^N and rescaled to the
/// given l1 norm.
std::vector<PackingVector> random_starts(std::size_t n, int count, double l1, std::uint64_t seed, double lo = 0.5,
                                         double hi = 2.0);

struct RayProfile {
    double sup_lambda = 0.0;
    double t_at_sup = 0.0;
    double t_bound = 0.0;  // positivity bound of the ray
};

/// Samples lambda~(r_hat + s*gamma) for s in [0, t_bound) on a grid that is
/// geometric in the distance to t_bound.  gamma must sum to zero and have
/// unit Euclidean norm.
RayProfile ray_profile(const Triangulation& t, const PackingVector& r_hat, std::span<const double> gamma,
                       int n_samples);

struct ChiEstimate {
    double value = 0.0;       // min over sampled rays of the sampled sup
    double lambda_hat = 0.0;  // lambda~(r_hat)
    int best_ray = -1;
    int n_rays = 0;
    int n_samples = 0;
    std::uint64_t seed = 0;
};

/// Upper estimate of the extended energy-gap invariant from random rays.
/// Rays are drawn sequentially from one seeded stream, so a larger n_rays
/// samples a superset of the rays of a smaller one.
ChiEstimate chi_estimate(const Triangulation& t, const PackingVector& r_hat, int n_rays, int n_samples,
                         std::uint64_t seed);

}  // namespace ballflow
