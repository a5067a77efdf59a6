#include "nldiff/nonlocal_op.hpp"

#include <cmath>
#include <stdexcept>

#include "fft.hpp"

namespace nldiff {

namespace {

void require_matching(const Field& u, const Kernel& k) {
    if (!u.geom) throw std::invalid_argument("operator: field has no geometry");
    if (k.h() != u.geom->h())
        throw std::invalid_argument("operator: kernel and field use different spacings");
}

// Extension values over the whole stored lattice, by region tag.
std::vector<double> gather_source(const Field& u, const BoundaryData& phi, double t) {
    const auto& g = *u.geom;
    std::vector<double> src(g.node_count(), 0.0);
    for (int i = g.i_min(); i <= g.i_max(); ++i) {
        switch (g.tag(i)) {
            case RegionTag::Interior:
                src[g.storage_index(i)] = u.at(i);
                break;
            case RegionTag::ExtendedBoundary: {
                const double v = phi(g.coord(i), t);
                if (!std::isfinite(v))
                    throw std::invalid_argument("operator: boundary data is not finite");
                src[g.storage_index(i)] = v;
                break;
            }
            case RegionTag::Exterior:
                break;
        }
    }
    return src;
}

}  // namespace

Field apply_K(const Field& u, const BoundaryData& phi, const Kernel& k, ApplyMethod method) {
    require_matching(u, k);
    if (!u.all_finite()) throw std::invalid_argument("operator: field is not finite");

    const auto& g = *u.geom;
    const int n = g.n_cells();
    const int J = k.radius_index();
    const std::vector<double> src = gather_source(u, phi, u.time);

    Field out;
    out.geom = u.geom;
    out.values.assign(g.node_count(), 0.0);
    out.time = u.time;

    const bool use_fft =
        method == ApplyMethod::Fft || (method == ApplyMethod::Auto && J > kFftThresholdRadius);

    if (!use_fft) {
        // Difference form: exact zero for constants and an exact discrete
        // maximum principle, since every summand is sign-correct.
        for (int i = 0; i <= n; ++i) {
            const double ui = u.at(i);
            double acc = 0.0;
            for (int j = -J; j <= J; ++j)
                acc += k.weight(j) * (src[g.storage_index(i - j)] - ui);
            out.at(i) = acc;
        }
    } else {
        // gain(i) = sum_j w_j src(i - j) is the linear convolution of the
        // weight vector with the source, read at offset i + 2J.
        const std::vector<double> conv = detail::convolve_full(k.weights(), src);
        for (int i = 0; i <= n; ++i)
            out.at(i) = conv[static_cast<std::size_t>(i + 2 * J)] - u.at(i);
    }
    return out;
}

Field extend(const Field& u, const BoundaryData& phi, double t) {
    if (!u.geom) throw std::invalid_argument("extend: field has no geometry");
    Field out;
    out.geom = u.geom;
    out.values = gather_source(u, phi, t);
    out.time = t;
    return out;
}

double sampled_boundary_sup(const DomainGeometry& g, const BoundaryData& phi, double t) {
    double m = 0.0;
    for (int i = g.i_min(); i <= g.i_max(); ++i)
        if (g.tag(i) == RegionTag::ExtendedBoundary) m = std::max(m, std::abs(phi(g.coord(i), t)));
    return m;
}

}  // namespace nldiff
