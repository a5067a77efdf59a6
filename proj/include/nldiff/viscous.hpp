#pragma once

#include "nldiff/evolution.hpp"

namespace nldiff {

/// Regularized problem: u_t - epsilon u_xx = K0(u) with classical zero
/// Dirichlet data. Diffusion is implicit (backward Euler rows), the
/// nonlocal gain explicit, so one dt works across a whole epsilon sweep.
struct ViscousConfig {
    double epsilon = 1e-2;
    double dt = 0.01;
    double t_final = 1.0;
    int store_every = 1;
    ApplyMethod apply_method = ApplyMethod::Auto;
};

/// IMEX march of the viscous problem; boundary rows are pinned to exactly
/// zero every step. epsilon = 0 reduces bitwise to the explicit nonlocal
/// stepper with zero data on the interior. Requires u0 = 0 on the
/// topological boundary.
SolveResult solve_viscous(const Field& u0, const Kernel& k, const ViscousConfig& cfg);

struct LayerRow {
    double epsilon = 0.0;
    double sup_dist = 0.0;         // sup over the interior of |u_eps - u_limit| at t_final
    double u_eps_near_left = 0.0;  // first interior node by the left endpoint
    double u_eps_near_right = 0.0;
};

struct LayerReport {
    std::vector<LayerRow> rows;  // one per epsilon, in the given order
    double u_limit_left = 0.0;   // nonlocal solution on the boundary nodes
    double u_limit_right = 0.0;
    bool sup_dist_nonincreasing = false;  // along the epsilon list
    bool sup_dist_decreasing = false;     // strictly
    bool positivity_hypothesis = false;  // kernel support covers {|z| <= eta} for some eta > 0
    bool limit_boundary_positive = false;
};

/// Run the viscous problem for each epsilon (strictly decreasing, positive)
/// and the nonlocal limit problem once; tabulate the boundary layer.
LayerReport boundary_layer_study(const Field& u0, const Kernel& k,
                                 const std::vector<double>& epsilons, const ViscousConfig& cfg);

}  // namespace nldiff
