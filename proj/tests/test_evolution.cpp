#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "nldiff/analysis.hpp"
#include "nldiff/evolution.hpp"

using namespace nldiff;

namespace {

Kernel box_kernel(double a, double b, double h) {
    KernelSpec s;
    s.family = KernelFamily::Box;
    s.a = a;
    s.b = b;
    return Kernel::build(s, h);
}

Kernel gaussian_kernel(double sigma, double h) {
    KernelSpec s;
    s.family = KernelFamily::Gaussian;
    s.sigma = sigma;
    return Kernel::build(s, h);
}

Kernel indicator_kernel(double a, double b, double h) {
    KernelSpec s;
    s.family = KernelFamily::Indicator;
    s.a = a;
    s.b = b;
    return Kernel::build(s, h);
}

std::shared_ptr<const DomainGeometry> geom_of(double xl, double xr, const Kernel& k) {
    return std::make_shared<DomainGeometry>(DomainGeometry::build(xl, xr, k));
}

double bump_at(double center, double halfwidth, double x) {
    const double s = (x - center) / halfwidth;
    return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
}

}  // namespace

TEST_SUITE_BEGIN("evolution");

TEST_CASE("constants are exact fixed points of the step") {
    const Kernel k = box_kernel(-1, 1, 0.05);
    auto g = geom_of(-1, 1, k);
    const Field u = make_field(g, [](double) { return 2.5; });
    const Field next = step_explicit(u, BoundaryData::constant(2.5), k, 0.5);
    for (int i = 0; i <= g->n_cells(); ++i) CHECK(next.at(i) == 2.5);
}

TEST_CASE("three-node step at dt = 1") {
    const Kernel k = Kernel::from_weights({0.5, 0.0, 0.5}, 1.0);
    auto g = geom_of(-1, 3, k);
    Field u = make_field(g, [](double) { return 0.0; });
    u.at(1) = 1.0;
    u.at(2) = 2.0;
    u.at(3) = 4.0;
    const Field next = step_explicit(u, BoundaryData::zero(), k, 1.0);
    CHECK(next.at(1) == 1.0);
    CHECK(next.at(2) == 2.5);
    CHECK(next.at(3) == 1.0);
    CHECK(next.time == 1.0);
}

TEST_CASE("nonnegativity is preserved with zero data") {
    const Kernel k = gaussian_kernel(0.5, 0.05);
    auto g = geom_of(-1, 1, k);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    Field u = make_field(g, [&](double) { return dist(rng); });
    u.at(0) = 0.0;
    u.at(g->n_cells()) = 0.0;
    Field next = step_explicit(u, BoundaryData::zero(), k, 1.0);
    for (int i = 0; i <= g->n_cells(); ++i) CHECK(next.at(i) >= 0.0);
}

TEST_CASE("zero data and zero start stay zero") {
    const Kernel k = box_kernel(-1, 1, 0.05);
    auto g = geom_of(-1, 1, k);
    const Field u0 = make_field(g, [](double) { return 0.0; });
    SolverConfig cfg;
    cfg.dt = 0.1;
    cfg.t_final = 2.0;
    const SolveResult run = solve(u0, BoundaryData::zero(), k, cfg);
    for (const Field& f : run.snapshots)
        for (double v : f.values) CHECK(v == 0.0);
}

TEST_CASE("one-sided kernel never reaches the right half") {
    // jumps in [-1, 0] transport mass leftward, so nodes right of the bump
    // never receive anything: they stay bitwise zero
    const Kernel k = indicator_kernel(-1, 0, 0.1);
    auto g = geom_of(-10, 10, k);
    const Field u0 = make_field(g, [](double x) { return bump_at(-7, 2, x); });
    SolverConfig cfg;
    cfg.dt = 0.05;
    cfg.t_final = 5.0;
    cfg.store_every = 20;
    const SolveResult run = solve(u0, BoundaryData::zero(), k, cfg);
    for (const Field& f : run.snapshots)
        for (int i = 0; i <= g->n_cells(); ++i)
            if (g->coord(i) >= 0.0) CHECK(f.at(i) == 0.0);
    // while the left half moved
    CHECK(run.snapshots.back().interior_mass() < u0.interior_mass());
}

TEST_CASE("affine data on a padded window is stationary") {
    const Kernel k = box_kernel(-1, 1, 0.02);
    auto g = geom_of(-2, 2, k);
    const Field u0 = make_field(g, [](double x) { return 0.3 * x; });
    SolverConfig cfg;
    cfg.dt = 0.02;
    cfg.t_final = 1.0;
    cfg.store_every = 50;
    const SolveResult run = solve(u0, BoundaryData::affine(0.3, 0.0), k, cfg);
    const Field& last = run.snapshots.back();
    for (int i = 0; i <= g->n_cells(); ++i) CHECK(std::abs(last.at(i) - u0.at(i)) <= 1e-8);
}

TEST_CASE("picard on constants converges in one iteration") {
    const Kernel k = box_kernel(-1, 1, 0.05);
    auto g = geom_of(-1, 1, k);
    const Field u0 = make_field(g, [](double) { return 1.5; });
    SolverConfig cfg;
    cfg.mode = SolverMode::Picard;
    cfg.dt = 0.05;
    cfg.t_final = 0.6;
    const SolveResult run = solve(u0, BoundaryData::constant(1.5), k, cfg);
    for (const auto& w : run.picard_windows) CHECK(w.iterations == 1);
    for (const Field& f : run.snapshots)
        for (int i = 0; i <= g->n_cells(); ++i) CHECK(f.at(i) == 1.5);
}

TEST_CASE("picard matches the explicit march and contracts") {
    const Kernel k = gaussian_kernel(0.5, 0.05);
    auto g = geom_of(-1, 1, k);
    const Field u0 = make_field(g, [](double x) { return bump_at(0, 0.6, x); });
    SolverConfig cfg;
    cfg.dt = 0.005;
    cfg.t_final = 0.5;  // two windows of 0.25
    cfg.store_every = 10;
    const SolveResult ex = solve(u0, BoundaryData::zero(), k, cfg);
    cfg.mode = SolverMode::Picard;
    const SolveResult pi = solve(u0, BoundaryData::zero(), k, cfg);

    REQUIRE(ex.snapshots.size() == pi.snapshots.size());
    double sup_diff = 0.0;
    for (std::size_t s = 0; s < ex.snapshots.size(); ++s)
        for (int i = 0; i <= g->n_cells(); ++i)
            sup_diff = std::max(sup_diff,
                                std::abs(ex.snapshots[s].at(i) - pi.snapshots[s].at(i)));
    CHECK(sup_diff <= 1e-6);

    REQUIRE(pi.picard_windows.size() == 2);
    for (const auto& w : pi.picard_windows) {
        CHECK(w.t_end - w.t_begin <= 0.25 + 1e-12);
        // geometric contraction at rate <= 2 t0 once the iteration settles
        for (std::size_t r = 3; r < w.update_norms.size(); ++r)
            if (w.update_norms[r - 1] > 1e-13)
                CHECK(w.update_norms[r] / w.update_norms[r - 1] <= 2 * 0.25 + 0.05);
    }
}

TEST_CASE("trapezoid quadrature converges to a nearby trajectory") {
    const Kernel k = box_kernel(-1, 1, 0.05);
    auto g = geom_of(-1, 1, k);
    const Field u0 = make_field(g, [](double x) { return bump_at(0, 0.6, x); });
    SolverConfig cfg;
    cfg.mode = SolverMode::Picard;
    cfg.picard_quadrature = PicardQuadrature::Trapezoid;
    cfg.dt = 0.005;
    cfg.t_final = 0.25;
    const SolveResult pi = solve(u0, BoundaryData::zero(), k, cfg);
    cfg.mode = SolverMode::Explicit;
    cfg.picard_quadrature = PicardQuadrature::LeftRectangle;
    const SolveResult ex = solve(u0, BoundaryData::zero(), k, cfg);
    double sup_diff = 0.0;
    for (std::size_t s = 0; s < ex.snapshots.size(); ++s)
        for (int i = 0; i <= g->n_cells(); ++i)
            sup_diff = std::max(sup_diff,
                                std::abs(ex.snapshots[s].at(i) - pi.snapshots[s].at(i)));
    CHECK(sup_diff > 0.0);            // genuinely a different rule
    CHECK(sup_diff <= 0.5 * cfg.dt);  // but within the stepping order
}

TEST_CASE("comparison: identical runs coincide") {
    const Kernel k = box_kernel(-1, 1, 0.1);
    auto g = geom_of(-1, 1, k);
    const Field u0 = make_field(g, [](double x) { return bump_at(0, 0.5, x); });
    SolverConfig cfg;
    cfg.dt = 0.5;
    cfg.t_final = 2.0;
    cfg.store_every = 1;
    const SolveResult a = solve(u0, BoundaryData::zero(), k, cfg);
    const SolveResult b = solve(u0, BoundaryData::zero(), k, cfg);
    const ComparisonReport rep = verify_comparison(a, b);
    CHECK(rep.ordered);
    CHECK(rep.max_violation == 0.0);
}

TEST_CASE("comparison: ordered data stays ordered, exactly") {
    const Kernel k = gaussian_kernel(0.6, 0.05);
    auto g = geom_of(-1, 1, k);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    SolverConfig cfg;
    cfg.dt = 0.5;
    cfg.t_final = 5.0;
    cfg.store_every = 1;
    for (int pair = 0; pair < 10; ++pair) {
        Field u0 = make_field(g, [&](double) { return 2.0 * dist(rng) - 1.0; });
        u0.at(0) = 0.0;
        u0.at(g->n_cells()) = 0.0;
        Field v0 = u0;
        for (int i = 1; i < g->n_cells(); ++i)
            if (dist(rng) < 0.7) v0.at(i) += 0.01 + dist(rng);
        const SolveResult a = solve(u0, BoundaryData::zero(), k, cfg);
        const SolveResult b = solve(v0, BoundaryData::zero(), k, cfg);
        const ComparisonReport rep = verify_comparison(a, b);
        CHECK(rep.ordered);
        CHECK(rep.max_violation == 0.0);
    }
}

TEST_CASE("comparison: ordered boundary data separates the runs") {
    const Kernel k = box_kernel(-1, 1, 0.05);
    auto g = geom_of(-1, 1, k);
    Field u0 = make_field(g, [](double) { return 0.0; });
    Field v0 = u0;
    v0.at(0) = 1.0;  // compatible with psi = 1 on the boundary
    v0.at(g->n_cells()) = 1.0;
    SolverConfig cfg;
    cfg.dt = 0.25;
    cfg.t_final = 1.0;
    cfg.store_every = 1;
    const SolveResult a = solve(u0, BoundaryData::zero(), k, cfg);
    const SolveResult b = solve(v0, BoundaryData::constant(1.0), k, cfg);
    CHECK(verify_comparison(a, b).ordered);
    // strictly larger somewhere after the very first step: the gain term
    // reads the mass of psi outside the domain
    const Field& b1 = b.snapshots[1];
    const Field& a1 = a.snapshots[1];
    bool strict = false;
    for (int i = 1; i < g->n_cells(); ++i)
        if (b1.at(i) > a1.at(i)) strict = true;
    CHECK(strict);
}

TEST_CASE("discrete maximum principle is exact") {
    const Kernel k = box_kernel(-1, 1, 0.05);
    auto g = geom_of(-1, 1, k);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double dt : {0.25, 0.5, 0.99}) {
        Field u0 = make_field(g, [&](double) { return dist(rng); });
        const double c = 0.4;
        u0.at(0) = c;
        u0.at(g->n_cells()) = c;
        SolverConfig cfg;
        cfg.dt = dt;
        cfg.t_final = 20 * dt;
        cfg.store_every = 1;
        const SolveResult run = solve(u0, BoundaryData::constant(c), k, cfg);
        const double lo = std::min(u0.min_value(), c);
        const double hi = std::max(u0.max_value(), c);
        for (const Field& f : run.snapshots) {
            CHECK(f.min_value() >= lo);
            CHECK(f.max_value() <= hi);
        }
    }
}

TEST_CASE("halving dt halves the self-difference") {
    const Kernel k = box_kernel(-1, 1, 0.05);
    auto g = geom_of(-1, 1, k);
    const Field u0 = make_field(g, [](double x) { return bump_at(0, 0.6, x); });
    auto run_at = [&](double dt) {
        SolverConfig cfg;
        cfg.dt = dt;
        cfg.t_final = 0.5;
        cfg.store_every = 1 << 30;
        return solve(u0, BoundaryData::zero(), k, cfg).snapshots.back();
    };
    const Field u1 = run_at(0.05), u2 = run_at(0.025), u3 = run_at(0.0125);
    double d12 = 0.0, d23 = 0.0;
    for (int i = 0; i <= g->n_cells(); ++i) {
        d12 = std::max(d12, std::abs(u1.at(i) - u2.at(i)));
        d23 = std::max(d23, std::abs(u2.at(i) - u3.at(i)));
    }
    const double ratio = d12 / d23;
    CHECK(ratio >= 1.7);
    CHECK(ratio <= 2.5);
}

TEST_CASE("stored steps reproduce the rate field") {
    const Kernel k = gaussian_kernel(0.5, 0.05);
    auto g = geom_of(-1, 1, k);
    const Field u0 = make_field(g, [](double x) { return bump_at(0, 0.6, x); });
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_final = 0.02;
    cfg.store_every = 1;
    const SolveResult run = solve(u0, BoundaryData::zero(), k, cfg);
    const Field rate = apply_K(run.snapshots[0], BoundaryData::zero(), k);
    for (int i = 0; i <= g->n_cells(); ++i) {
        const double fd = (run.snapshots[1].at(i) - run.snapshots[0].at(i)) / cfg.dt;
        CHECK(std::abs(fd - rate.at(i)) <= 1e-11);
    }
    // the rate inherits a bounded, eta-monotone modulus from the state
    const double m_small = modulus(rate, 0.1), m_large = modulus(rate, 0.2);
    CHECK(m_small <= m_large);
    CHECK(m_large <= 2 * u0.sup_norm() + 1e-12);
}

TEST_CASE("explicit march approaches the exact lattice semigroup") {
    // Independent oracle: on a tiny grid the interior dynamics is the
    // linear system u' = (W - I) u with W[r][c] = w(r - c); its exact
    // solution is the matrix exponential, computed here by
    // scaling-and-squaring Taylor summation, nothing shared with the
    // stepper.
    const Kernel k = box_kernel(-1, 1, 0.25);
    auto g = geom_of(-1, 1, k);
    const int m = g->n_cells() - 1;  // interior nodes
    std::vector<std::vector<double>> mat(m, std::vector<double>(m, 0.0));
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) {
            const int offset = (r + 1) - (c + 1);
            if (std::abs(offset) <= k.radius_index()) mat[r][c] = k.weight(offset);
            if (r == c) mat[r][c] -= 1.0;
        }
    const double t_final = 1.0;
    const int squarings = 10;
    std::vector<std::vector<double>> scaled = mat;
    for (auto& row : scaled)
        for (double& v : row) v *= t_final / (1 << squarings);
    // exp(scaled) by Taylor
    std::vector<std::vector<double>> expm(m, std::vector<double>(m, 0.0));
    std::vector<std::vector<double>> term(m, std::vector<double>(m, 0.0));
    for (int r = 0; r < m; ++r) expm[r][r] = term[r][r] = 1.0;
    for (int order = 1; order <= 20; ++order) {
        std::vector<std::vector<double>> next(m, std::vector<double>(m, 0.0));
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c) {
                double acc = 0.0;
                for (int q = 0; q < m; ++q) acc += term[r][q] * scaled[q][c];
                next[r][c] = acc / order;
            }
        term = next;
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c) expm[r][c] += term[r][c];
    }
    for (int s = 0; s < squarings; ++s) {
        std::vector<std::vector<double>> sq(m, std::vector<double>(m, 0.0));
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c) {
                double acc = 0.0;
                for (int q = 0; q < m; ++q) acc += expm[r][q] * expm[q][c];
                sq[r][c] = acc;
            }
        expm = sq;
    }

    const Field u0 = make_field(g, [](double x) { return bump_at(0, 0.6, x); });
    std::vector<double> exact(m, 0.0);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) exact[r] += expm[r][c] * u0.at(c + 1);

    auto euler_error = [&](double dt) {
        SolverConfig cfg;
        cfg.dt = dt;
        cfg.t_final = t_final;
        cfg.store_every = 1 << 30;
        const Field last = solve(u0, BoundaryData::zero(), k, cfg).snapshots.back();
        double err = 0.0;
        for (int r = 0; r < m; ++r) err = std::max(err, std::abs(last.at(r + 1) - exact[r]));
        return err;
    };
    const double e1 = euler_error(1e-2), e2 = euler_error(5e-3);
    CHECK(e1 <= 0.02);
    CHECK(e2 <= 0.01);
    const double ratio = e1 / e2;  // first order against the exact flow
    CHECK(ratio >= 1.7);
    CHECK(ratio <= 2.3);
}

TEST_CASE("snapshot bookkeeping: first is the initial state, times increase") {
    const Kernel k = box_kernel(-1, 1, 0.05);
    auto g = geom_of(-1, 1, k);
    const Field u0 = make_field(g, [](double x) { return bump_at(0, 0.6, x); });
    SolverConfig cfg;
    cfg.dt = 0.05;
    cfg.t_final = 1.0;
    cfg.store_every = 3;
    const SolveResult run = solve(u0, BoundaryData::zero(), k, cfg);
    CHECK(run.snapshots.front().time == 0.0);
    for (int i = 0; i <= g->n_cells(); ++i) CHECK(run.snapshots.front().at(i) == u0.at(i));
    for (std::size_t s = 1; s < run.snapshots.size(); ++s)
        CHECK(run.snapshots[s].time > run.snapshots[s - 1].time);
    CHECK(run.snapshots.back().time == 1.0);
    CHECK(run.diagnostics.size() == run.snapshots.size());
}

TEST_CASE("solver argument validation") {
    const Kernel k = box_kernel(-1, 1, 0.1);
    auto g = geom_of(-1, 1, k);
    const Field u0 = make_field(g, [](double x) { return bump_at(0, 0.5, x); });
    CHECK_THROWS_AS(step_explicit(u0, BoundaryData::zero(), k, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(step_explicit(u0, BoundaryData::zero(), k, 1.5), std::invalid_argument);

    SolverConfig cfg;
    cfg.mode = SolverMode::Picard;
    cfg.picard_window = 0.5;  // not a contraction
    CHECK_THROWS_AS(solve(u0, BoundaryData::zero(), k, cfg), std::invalid_argument);

    cfg.picard_window = 0.25;
    cfg.max_picard_iters = 1;
    cfg.dt = 0.05;
    cfg.t_final = 0.25;
    CHECK_THROWS_AS(solve(u0, BoundaryData::zero(), k, cfg), std::runtime_error);

    // incompatible boundary data
    SolverConfig ok;
    ok.dt = 0.1;
    ok.t_final = 0.2;
    CHECK_THROWS_AS(solve(u0, BoundaryData::constant(1.0), k, ok), std::invalid_argument);
}

TEST_SUITE_END();
