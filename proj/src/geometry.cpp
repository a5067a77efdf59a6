#include "nldiff/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace nldiff {

namespace {

long floor_div(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

long ceil_div(long a, long b) { return -floor_div(-a, b); }

}  // namespace

DomainGeometry DomainGeometry::build(double xl, double xr, const Kernel& k) {
    if (!(xl < xr)) throw std::invalid_argument("geometry: domain interval is empty");
    const double h = k.h();
    if (!(h > 0.0)) throw std::invalid_argument("geometry: nonpositive spacing");
    if (h > xr - xl) throw std::invalid_argument("geometry: spacing exceeds the domain width");
    const double cells = (xr - xl) / h;
    const long n = std::llround(cells);
    if (n < 2 || std::abs(n * h - (xr - xl)) > 1e-9 * std::max(1.0, xr - xl))
        throw std::invalid_argument("geometry: spacing must divide the domain width");

    DomainGeometry g;
    g.xl_ = xl;
    g.xr_ = xr;
    g.h_ = h;
    g.n_ = static_cast<int>(n);
    g.pad_ = k.radius_index();
    g.tags_.assign(g.node_count(), RegionTag::Exterior);

    // The operator evaluated at x in the closed domain reads x - z for
    // support offsets z, so the influence region in index space is
    // [0 - support_hi, n - support_lo] joined with [0, n].
    const int ext_lo = std::min(0, -k.support_hi());
    const int ext_hi = std::max(g.n_, g.n_ - k.support_lo());
    for (int i = g.i_min(); i <= g.i_max(); ++i) {
        RegionTag t = RegionTag::Exterior;
        if (g.index_in_open_omega(i))
            t = RegionTag::Interior;
        else if (i >= ext_lo && i <= ext_hi)
            t = RegionTag::ExtendedBoundary;
        g.tags_[g.storage_index(i)] = t;
    }
    return g;
}

bool DomainGeometry::contains_closed(double x) const {
    const double snap = 1e-9 * std::max({1.0, std::abs(xl_), std::abs(xr_)});
    return x >= xl_ - snap && x <= xr_ + snap;
}

std::uint64_t DomainGeometry::content_hash() const {
    std::uint64_t hash = 1469598103934665603ull;
    auto mix = [&hash](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            hash ^= b[i];
            hash *= 1099511628211ull;
        }
    };
    mix(&xl_, sizeof xl_);
    mix(&xr_, sizeof xr_);
    mix(&h_, sizeof h_);
    mix(&n_, sizeof n_);
    mix(tags_.data(), tags_.size() * sizeof(RegionTag));
    return hash;
}

LambdaGammaReport lambda_gamma(const DomainGeometry& g, const Kernel& k, double eta, int refine) {
    if (!(eta > 0.0)) throw std::invalid_argument("lambda_gamma: eta must be positive");
    if (refine < 1) throw std::invalid_argument("lambda_gamma: refine must be >= 1");
    if (k.h() != g.h()) throw std::invalid_argument("lambda_gamma: kernel/geometry spacing mismatch");

    const long r = refine;
    const long rn = r * g.n_cells();
    const double fine_h = g.h() / static_cast<double>(r);

    // largest pair gap (in fine lattice units) with gap * fine_h < eta;
    // interior fine nodes run over [1, rn - 1], so gaps top out at rn - 2
    long gap_max = 0;
    while (gap_max + 1 <= rn - 2 && (gap_max + 1) * fine_h < eta) ++gap_max;

    LambdaGammaReport rep;
    rep.eta = eta;
    double best_lambda = -1.0, best_gamma = -1.0;

    // Membership of the read point x - z in the closed domain is exact in
    // index space: x = xl + (i/r)h and z = jh give 0 <= i - r j <= r n.
    for (long i = 1; i <= rn - 1; ++i) {
        const long gap_hi = std::min(gap_max, rn - 1 - i);
        for (long gap = 0; gap <= gap_hi; ++gap) {
            const long iy = i + gap;
            // A = translate set of x, B = of y, both intervals in j.
            const long a_lo = ceil_div(i - rn, r), a_hi = floor_div(i, r);
            const long b_lo = ceil_div(iy - rn, r), b_hi = floor_div(iy, r);
            const double inter = k.mass_in_index_range(std::max(a_lo, b_lo), std::min(a_hi, b_hi));
            const double sym = k.mass_in_index_range(a_lo, std::min(a_hi, b_lo - 1)) +
                               k.mass_in_index_range(std::max(b_lo, a_hi + 1), b_hi);
            if (inter > best_lambda) {
                best_lambda = inter;
                rep.lambda_x = g.xl() + i * fine_h;
                rep.lambda_y = g.xl() + iy * fine_h;
            }
            if (sym > best_gamma) {
                best_gamma = sym;
                rep.gamma_x = g.xl() + i * fine_h;
                rep.gamma_y = g.xl() + iy * fine_h;
            }
        }
    }
    rep.lambda = std::max(best_lambda, 0.0);
    rep.gamma = std::max(best_gamma, 0.0);
    return rep;
}

LambdaRegime classify_lambda(const DomainGeometry& g, const Kernel& k) {
    if (k.h() != g.h())
        throw std::invalid_argument("classify_lambda: kernel/geometry spacing mismatch");
    const long n = g.n_cells();
    // Mass outside the union of all translate sets, {z : |z| >= width}.
    const double outside =
        1.0 - k.mass_in_index_range(-(n - 1), n - 1);
    if (outside > 0.0) return {LambdaVerdict::LessThanOne, 1.0 - outside};
    // Strict inclusion: an interior node whose reads stay strictly inside.
    for (long i = 1; i <= n - 1; ++i) {
        if (i - k.support_hi() > 0 && i - k.support_lo() < n)
            return {LambdaVerdict::EqualsOne, 1.0};
    }
    return {LambdaVerdict::Inconclusive, 1.0};
}

}  // namespace nldiff
