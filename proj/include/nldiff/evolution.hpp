#pragma once

#include <cstdint>
#include <vector>

#include "nldiff/nonlocal_op.hpp"

namespace nldiff {

enum class SolverMode { Explicit, Picard };
enum class PicardQuadrature { LeftRectangle, Trapezoid };

struct SolverConfig {
    SolverMode mode = SolverMode::Explicit;
    double dt = 0.01;
    double t_final = 1.0;
    /// Picard window length t0; the fixed-point map contracts for t0 < 1/2.
    double picard_window = 0.25;
    double picard_tol = 1e-10;
    int max_picard_iters = 200;
    /// Integral rule inside the fixed-point map. LeftRectangle makes the
    /// converged trajectory coincide with the explicit stepper on the same
    /// dt lattice, which is what the cross-method check relies on.
    PicardQuadrature picard_quadrature = PicardQuadrature::LeftRectangle;
    int store_every = 1;
    ApplyMethod apply_method = ApplyMethod::Auto;
};

struct DiagnosticsRow {
    double t = 0.0;
    double sup = 0.0;   // max |u| over the closed domain
    double min = 0.0;   // min u over the closed domain
    double mass = 0.0;  // sum of u*h over the interior
};

struct PicardWindowStats {
    double t_begin = 0.0;
    double t_end = 0.0;
    int iterations = 0;
    std::vector<double> update_norms;  // sup-norm of each fixed-point update
};

struct SolveResult {
    std::vector<Field> snapshots;
    std::vector<DiagnosticsRow> diagnostics;
    std::vector<PicardWindowStats> picard_windows;
    SolverConfig config;
    double phi_sup = 0.0;
    std::uint64_t kernel_hash = 0;
    std::uint64_t geometry_hash = 0;
    double wall_ms = 0.0;
};

/// One forward Euler step u + dt*K(u); dt <= 1 keeps it a convex
/// combination of lattice values. Extended-boundary nodes are restamped
/// with phi at t + dt.
Field step_explicit(const Field& u, const BoundaryData& phi, const Kernel& k, double dt,
                    ApplyMethod method = ApplyMethod::Auto);

/// March to t_final, storing every store_every-th state (the initial and
/// final states always included). Aborts with the step index if a value
/// stops being finite.
SolveResult solve(const Field& u0, const BoundaryData& phi, const Kernel& k,
                  const SolverConfig& cfg);

/// Fixed-point construction of the same trajectory: on each window of
/// length picard_window the map u -> u0 + integral of K(u) is iterated to
/// picard_tol, then windows are chained from the converged end state.
/// Update norms contract at rate <= 2*picard_window.
SolveResult picard_solve(const Field& u0, const BoundaryData& phi, const Kernel& k,
                         const SolverConfig& cfg);

struct ComparisonReport {
    bool ordered = false;
    double max_violation = 0.0;  // max over snapshots and nodes of a - b
    double at_time = 0.0;
    double at_x = 0.0;
};

/// Nodewise a <= b at every stored snapshot, exactly; requires the two
/// runs to share geometry and snapshot times.
ComparisonReport verify_comparison(const SolveResult& a, const SolveResult& b);

}  // namespace nldiff
