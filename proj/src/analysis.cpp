#include "nldiff/analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nldiff {

double modulus(const Field& u, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("modulus: eta must be positive");
    const auto& g = *u.geom;
    const int n = g.n_cells();
    const double h = g.h();
    int gap_max = 0;
    while (gap_max + 1 <= n - 2 && (gap_max + 1) * h < eta) ++gap_max;
    double m = 0.0;
    for (int i = 1; i <= n - 1; ++i) {
        const int hi = std::min(gap_max, n - 1 - i);
        for (int gap = 1; gap <= hi; ++gap)
            m = std::max(m, std::abs(u.at(i + gap) - u.at(i)));
    }
    return m;
}

double modulus_envelope(double omega0, double lambda, double gamma, double sup_u0, double t) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("modulus_envelope: lambda outside [0, 1]");
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("modulus_envelope: gamma outside [0, 1]");
    if (!(t >= 0.0)) throw std::invalid_argument("modulus_envelope: negative time");
    if (lambda >= 1.0 - 1e-12) return omega0 + gamma * sup_u0 * t;
    // stable form of (omega0 + gamma sup (e^{(1-l)t} - 1)/(1-l)) e^{(l-1)t}
    const double decay = std::exp((lambda - 1.0) * t);
    return omega0 * decay + gamma * sup_u0 * (1.0 - decay) / (1.0 - lambda);
}

namespace {

// Boundary-data term of the scale estimate: the largest phi-mass any
// interior point can read from the eta-collar just outside the domain,
// the set two eta-close translates of the domain disagree on.
double theta_term(const DomainGeometry& g, const Kernel& k, const BoundaryData& phi, double eta,
                  double t) {
    const int n = g.n_cells();
    const double snap = 1e-9 * std::max({1.0, std::abs(g.xl()), std::abs(g.xr())});

    auto in_collar = [&](double c) {
        if (c > g.xl() + snap && c < g.xr() - snap) return false;  // inside the domain
        return c > g.xl() - eta - snap && c < g.xr() + eta + snap;
    };

    double best = 0.0;
    for (int i = 1; i <= n - 1; ++i) {
        double acc = 0.0;
        for (int j = -k.radius_index(); j <= k.radius_index(); ++j) {
            const double c = g.coord(i - j);
            if (in_collar(c)) acc += k.weight(j) * phi(c, t);
        }
        best = std::max(best, acc);
    }
    return best;
}

}  // namespace

ModulusReport check_bounds(const SolveResult& run, const Kernel& k,
                           const std::vector<double>& etas, const BoundaryData* phi_if_nonzero,
                           std::optional<double> tol_quad) {
    if (run.snapshots.empty()) throw std::invalid_argument("check_bounds: empty run");
    if (etas.empty()) throw std::invalid_argument("check_bounds: no eta values");
    const Field& u0 = run.snapshots.front();
    const auto& g = *u0.geom;
    const double sup0 = u0.sup_norm();

    ModulusReport rep;
    rep.envelope_asserted = phi_if_nonzero == nullptr && run.phi_sup == 0.0;
    rep.tol_quad = tol_quad.value_or(5.0 * (g.h() + run.config.dt) * sup0);

    for (double eta : etas) {
        const LambdaGammaReport lg = lambda_gamma(g, k, eta);
        const double omega0 = modulus(u0, eta);
        const EnvelopeBranch branch = lg.lambda >= 1.0 - 1e-12 ? EnvelopeBranch::LinearGrowth
                                                               : EnvelopeBranch::ExponentialDecay;
        for (const Field& snap : run.snapshots) {
            ModulusRow row;
            row.t = snap.time;
            row.eta = eta;
            row.omega = modulus(snap, eta);
            row.bound = modulus_envelope(omega0, lg.lambda, lg.gamma, sup0, snap.time);
            row.branch = branch;
            if (rep.envelope_asserted) {
                const double excess = row.omega - (row.bound + rep.tol_quad);
                rep.max_excess = std::max(rep.max_excess, excess);
                if (excess > 0.0) rep.all_within = false;
            }
            rep.rows.push_back(row);
        }
        if (!rep.envelope_asserted && phi_if_nonzero) {
            for (const Field& snap : run.snapshots)
                rep.theta.push_back({snap.time, eta, theta_term(g, k, *phi_if_nonzero, eta, snap.time)});
        }
    }
    return rep;
}

PositivityReport positivity_study(const SolveResult& run, const Kernel& k, double tol_pos) {
    if (run.snapshots.empty()) throw std::invalid_argument("positivity_study: empty run");
    const Field& u0 = run.snapshots.front();
    const auto& g = *u0.geom;
    const int n = g.n_cells();

    PositivityReport rep;
    rep.tol_pos = tol_pos;

    if (run.phi_sup != 0.0) {
        rep.hypothesis = PositivityHypothesis::BoundaryDataNonzero;
    } else if (u0.min_value() < 0.0) {
        rep.hypothesis = PositivityHypothesis::InitialDataNegative;
    } else if (!(u0.max_value() > 0.0)) {
        rep.hypothesis = PositivityHypothesis::InitialDataZero;
    } else {
        int ks = 0;
        while (ks + 1 <= k.radius_index() && k.weight(ks + 1) > 0.0 && k.weight(-(ks + 1)) > 0.0)
            ++ks;
        if (ks == 0 || !(k.weight(0) > 0.0))
            rep.hypothesis = PositivityHypothesis::NoSymmetricSupportNeighborhood;
        else
            rep.eta_supp = ks * g.h();
    }

    const double inf = std::numeric_limits<double>::infinity();
    rep.first_positive.assign(static_cast<std::size_t>(n) + 1, {0.0, inf});
    for (int i = 0; i <= n; ++i) rep.first_positive[static_cast<std::size_t>(i)].first = g.coord(i);
    for (const Field& snap : run.snapshots) {
        for (int i = 0; i <= n; ++i) {
            auto& entry = rep.first_positive[static_cast<std::size_t>(i)];
            if (entry.second == inf && snap.at(i) > tol_pos) entry.second = snap.time;
        }
    }

    if (rep.hypothesis != PositivityHypothesis::Satisfied) return rep;

    const int hops = static_cast<int>(
        std::ceil(static_cast<double>(n) * g.h() / rep.eta_supp - 1e-12));
    rep.k_min = std::max(1, hops);
    const double t_star = rep.k_min * run.config.dt;

    // judged at the first stored snapshot past t_star
    for (const Field& snap : run.snapshots) {
        if (snap.time + 1e-12 < t_star) continue;
        bool all = true;
        for (int i = 0; i <= n; ++i) {
            if (!(snap.at(i) > tol_pos)) {
                all = false;
                rep.counterexample_x = g.coord(i);
                break;
            }
        }
        if (all) rep.all_positive_by = snap.time;
        break;
    }
    return rep;
}

}  // namespace nldiff
