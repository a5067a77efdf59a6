#include <cmath>
#include <memory>

#include "doctest.h"
#include "nldiff/evolution.hpp"
#include "nldiff/stochastic.hpp"

using namespace nldiff;

namespace {

Kernel box_kernel(double a, double b, double h) {
    KernelSpec s;
    s.family = KernelFamily::Box;
    s.a = a;
    s.b = b;
    return Kernel::build(s, h);
}

std::shared_ptr<const DomainGeometry> geom_of(double xl, double xr, const Kernel& k) {
    return std::make_shared<DomainGeometry>(DomainGeometry::build(xl, xr, k));
}

Field unit_bump(std::shared_ptr<const DomainGeometry> g) {
    Field f = make_field(std::move(g), [](double x) {
        const double s = x / 0.6;
        return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
    });
    const double mass = f.interior_mass();
    for (double& v : f.values) v /= mass;
    return f;
}

}  // namespace

TEST_SUITE_BEGIN("stochastic");

TEST_CASE("zero time reproduces the initial density up to binning noise") {
    const Kernel k = box_kernel(-1, 1, 0.02);
    auto g = geom_of(-1, 1, k);
    const Field u0 = unit_bump(g);
    McConfig cfg;
    cfg.particles = 200000;
    cfg.t_final = 0.0;
    cfg.seed = 5;
    const McDensity mc = simulate(u0, k, cfg);
    CHECK(mc.mean_jumps == 0.0);
    CHECK(mc.surviving_fraction == 1.0);
    double l1 = 0.0, se = 0.0;
    for (std::size_t b = 0; b < mc.centers.size(); ++b) {
        l1 += std::abs(mc.density[b] - u0.at(1 + static_cast<int>(b))) * g->h();
        se += mc.standard_error[b] * g->h();
    }
    CHECK(l1 <= 3.0 * se);
}

TEST_CASE("mean jump count approaches the time horizon") {
    const Kernel k = box_kernel(-1, 1, 0.02);
    auto g = geom_of(-1, 1, k);
    const Field u0 = unit_bump(g);
    for (double t : {0.5, 1.0, 4.0}) {
        McConfig cfg;
        cfg.particles = 400000;
        cfg.t_final = t;
        cfg.seed = 11;
        cfg.mode = McMode::WholeSpace;
        const McDensity mc = simulate(u0, k, cfg);
        CHECK(std::abs(mc.mean_jumps - t) <=
              3.0 * std::sqrt(t / static_cast<double>(cfg.particles)));
    }
}

TEST_CASE("whole-space histogram carries unit mass") {
    const Kernel k = box_kernel(-1, 1, 0.02);
    auto g = geom_of(-1, 1, k);
    const Field u0 = unit_bump(g);
    McConfig cfg;
    cfg.particles = 50000;
    cfg.t_final = 2.0;
    cfg.seed = 3;
    cfg.mode = McMode::WholeSpace;
    const McDensity mc = simulate(u0, k, cfg);
    double total = 0.0;
    for (double d : mc.density) total += d * mc.bin_width;
    CHECK(std::abs(total - 1.0) <= 1e-12);
}

TEST_CASE("dirichlet histogram plus absorbed fraction carries unit mass") {
    const Kernel k = box_kernel(-1, 1, 0.02);
    auto g = geom_of(-1, 1, k);
    const Field u0 = unit_bump(g);
    McConfig cfg;
    cfg.particles = 100000;
    cfg.t_final = 1.0;
    cfg.seed = 7;
    const McDensity mc = simulate(u0, k, cfg);
    double total = 0.0;
    for (double d : mc.density) total += d * mc.bin_width;
    CHECK(std::abs(total + (1.0 - mc.surviving_fraction) - 1.0) <= 1e-12);
    CHECK(mc.surviving_fraction < 1.0);  // some particles do exit by t = 1
}

TEST_CASE("fixed seed is reproducible for any worker count") {
    const Kernel k = box_kernel(-1, 1, 0.05);
    auto g = geom_of(-1, 1, k);
    const Field u0 = unit_bump(g);
    McConfig cfg;
    cfg.particles = 100000;
    cfg.t_final = 1.0;
    cfg.seed = 99;
    cfg.workers = 1;
    const McDensity one = simulate(u0, k, cfg);
    for (unsigned w : {2u, 4u, 8u}) {
        cfg.workers = w;
        const McDensity many = simulate(u0, k, cfg);
        CHECK(many.counts == one.counts);
        CHECK(many.surviving_fraction == one.surviving_fraction);
        CHECK(many.mean_jumps == one.mean_jumps);
    }
    cfg.workers = 1;
    const McDensity again = simulate(u0, k, cfg);
    CHECK(again.counts == one.counts);
}

TEST_CASE("surviving fraction is nonincreasing in the horizon") {
    const Kernel k = box_kernel(-1, 1, 0.05);
    auto g = geom_of(-1, 1, k);
    const Field u0 = unit_bump(g);
    double prev = 1.0;
    for (double t : {0.25, 0.5, 1.0, 2.0}) {
        McConfig cfg;
        cfg.particles = 150000;
        cfg.t_final = t;
        cfg.seed = 21;
        const double s = simulate(u0, k, cfg).surviving_fraction;
        CHECK(s <= prev);
        prev = s;
    }
}

TEST_CASE("histogram agrees with the solver in the interior L1 metric") {
    const Kernel k = box_kernel(-1, 1, 0.02);
    auto g = geom_of(-1, 1, k);
    const Field u0 = unit_bump(g);
    McConfig cfg;
    cfg.particles = 200000;
    cfg.t_final = 1.0;
    cfg.seed = 42;
    const McDensity mc = simulate(u0, k, cfg);
    SolverConfig sc;
    sc.dt = 0.002;
    sc.t_final = 1.0;
    sc.store_every = 1 << 30;
    const SolveResult run = solve(u0, BoundaryData::zero(), k, sc);
    const DensityComparison cmp = compare_density(mc, run.snapshots.back());
    CHECK(cmp.l1 <= 0.04);
    double aggregated_se = 0.0;
    for (double se : mc.standard_error) aggregated_se += se * g->h();
    CHECK(cmp.l1 <= 3.0 * aggregated_se);
    CHECK(std::abs(mc.surviving_fraction - run.snapshots.back().interior_mass()) <= 0.01);
}

TEST_CASE("asymmetric kernel: particles and solver drift the same way") {
    // jumps drawn literally from a [-1, 0] kernel move particles left; the
    // deterministic gain reads x - z and transports mass left as well
    KernelSpec spec;
    spec.family = KernelFamily::Indicator;
    spec.a = -1.0;
    spec.b = 0.0;
    const Kernel k = Kernel::build(spec, 0.1);
    auto g = geom_of(-10, 10, k);
    Field u0 = make_field(g, [](double x) {
        const double s = (x + 7.0) / 2.0;
        return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
    });
    const double mass = u0.interior_mass();
    for (double& v : u0.values) v /= mass;

    McConfig cfg;
    cfg.particles = 100000;
    cfg.t_final = 1.0;
    cfg.seed = 13;
    const McDensity mc = simulate(u0, k, cfg);
    SolverConfig sc;
    sc.dt = 0.005;
    sc.t_final = 1.0;
    sc.store_every = 1 << 30;
    const SolveResult run = solve(u0, BoundaryData::zero(), k, sc);
    const DensityComparison cmp = compare_density(mc, run.snapshots.back());
    double aggregated_se = 0.0;
    for (double se : mc.standard_error) aggregated_se += se * g->h();
    CHECK(cmp.l1 <= 3.0 * aggregated_se + 0.01);
    // both sides put every grain of mass left of the initial support
    const auto& last = run.snapshots.back();
    for (int i = 0; i <= g->n_cells(); ++i)
        if (g->coord(i) >= -4.9) CHECK(last.at(i) == 0.0);
    for (std::size_t b = 0; b < mc.centers.size(); ++b)
        if (mc.centers[b] >= -4.9) CHECK(mc.density[b] == 0.0);
}

TEST_CASE("compare_density on identical and shifted inputs") {
    const Kernel k = box_kernel(-1, 1, 0.1);
    auto g = geom_of(-1, 1, k);
    const Field u0 = unit_bump(g);
    McConfig cfg;
    cfg.particles = 5000;
    cfg.t_final = 0.5;
    cfg.seed = 1;
    const McDensity mc = simulate(u0, k, cfg);

    Field same = make_field(g, [](double) { return 0.0; });
    for (std::size_t b = 0; b < mc.centers.size(); ++b)
        same.at(1 + static_cast<int>(b)) = mc.density[b];
    CHECK(compare_density(mc, same).l1 == 0.0);

    // moving one bin's density to its neighbor costs twice that mass
    McDensity shifted = mc;
    const std::size_t mid = shifted.density.size() / 2;
    const double v = shifted.density[mid];
    shifted.density[mid] = shifted.density[mid + 1];
    shifted.density[mid + 1] = v;
    const double expected = (std::abs(shifted.density[mid] - v) +
                             std::abs(v - mc.density[mid + 1])) * g->h();
    CHECK(compare_density(shifted, same).l1 == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("simulate argument validation") {
    const Kernel k = box_kernel(-1, 1, 0.05);
    auto g = geom_of(-1, 1, k);
    Field not_normalized = make_field(g, [](double) { return 1.0; });
    not_normalized.at(0) = 0.0;
    not_normalized.at(g->n_cells()) = 0.0;
    McConfig cfg;
    CHECK_THROWS_AS(simulate(not_normalized, k, cfg), std::invalid_argument);
    const Field u0 = unit_bump(g);
    cfg.particles = 0;
    CHECK_THROWS_AS(simulate(u0, k, cfg), std::invalid_argument);
}

TEST_SUITE_END();
