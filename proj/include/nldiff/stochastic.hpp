#pragma once

#include <cstdint>
#include <vector>

#include "nldiff/field.hpp"

namespace nldiff {

enum class McMode { WholeSpace, DirichletAbsorbing };

struct McConfig {
    std::uint64_t particles = 100000;
    double t_final = 1.0;
    std::uint64_t seed = 42;
    McMode mode = McMode::DirichletAbsorbing;
    /// 0 = decide from hardware and the NLDIFF_THREADS cap. Any worker
    /// count yields bit-identical output.
    unsigned workers = 0;
};

/// Histogram estimate of the particle density at t_final, on bins of
/// width h centered on lattice nodes.
struct McDensity {
    std::vector<double> centers;
    std::vector<double> density;        // mass per length
    std::vector<double> standard_error; // per-bin binomial standard error of the density
    std::vector<std::uint64_t> counts;
    std::uint64_t particles = 0;
    double bin_width = 0.0;
    double surviving_fraction = 1.0;  // 1 in whole-space mode
    double mean_jumps = 0.0;
};

/// Jump-process sample of the evolution: each particle starts at a node
/// drawn from u0 (which must be a unit-mass density), jumps a
/// Poisson(t_final) number of times with displacements drawn from the
/// kernel weights, and in absorbing mode dies on the first landing outside
/// the open domain. Fixed (seed, particles) gives byte-identical output
/// for any worker count.
McDensity simulate(const Field& u0_density, const Kernel& k, const McConfig& cfg);

struct DensityComparison {
    double l1 = 0.0;  // sum of |mc - u| * h over interior bins
    double max_abs_z = 0.0;
    std::vector<double> z_scores;
};

/// Interior L1 distance between the histogram and a solver field, plus
/// per-bin z-scores against the Monte Carlo standard errors.
DensityComparison compare_density(const McDensity& mc, const Field& u);

unsigned default_worker_count();

}  // namespace nldiff
