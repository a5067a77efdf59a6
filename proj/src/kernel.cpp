#include "nldiff/kernel.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nldiff {

namespace {

// Push the floating-point residual of the weight sum into the largest
// weight until the total is exactly 1.0. Converges in a pass or two.
void renormalize_exact(std::vector<double>& w) {
    auto total = [&w] {
        double s = 0.0;
        for (double x : w) s += x;
        return s;
    };
    double s = total();
    if (!(s > 0.0)) throw std::runtime_error("kernel: lattice weights sum to zero");
    for (double& x : w) x /= s;
    for (int pass = 0; pass < 16; ++pass) {
        double t = total();
        if (t == 1.0) return;
        auto m = std::max_element(w.begin(), w.end());
        *m -= (t - 1.0);
        if (*m < 0.0) *m = 0.0;
    }
}

struct StepTable {
    std::vector<double> edges;   // cell edges, size n+1
    std::vector<double> values;  // normalized density per cell, size n
    double operator()(double z) const {
        if (z < edges.front() || z >= edges.back()) return 0.0;
        auto it = std::upper_bound(edges.begin(), edges.end(), z);
        auto i = static_cast<std::size_t>(it - edges.begin()) - 1;
        if (i >= values.size()) return 0.0;
        return values[i];
    }
};

StepTable make_step_table(const std::vector<std::pair<double, double>>& samples, double h) {
    if (samples.empty()) throw std::invalid_argument("kernel: tabulated density needs samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].second < 0.0)
            throw std::invalid_argument("kernel: tabulated density has a negative value");
        if (i > 0 && !(samples[i].first > samples[i - 1].first))
            throw std::invalid_argument("kernel: tabulated offsets must be strictly increasing");
    }
    StepTable t;
    const std::size_t n = samples.size();
    t.edges.resize(n + 1);
    t.values.resize(n);
    if (n == 1) {
        t.edges[0] = samples[0].first - 0.5 * h;
        t.edges[1] = samples[0].first + 0.5 * h;
    } else {
        t.edges[0] = samples[0].first - 0.5 * (samples[1].first - samples[0].first);
        for (std::size_t i = 1; i < n; ++i)
            t.edges[i] = 0.5 * (samples[i - 1].first + samples[i].first);
        t.edges[n] = samples[n - 1].first + 0.5 * (samples[n - 1].first - samples[n - 2].first);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += samples[i].second * (t.edges[i + 1] - t.edges[i]);
    if (!(total > 0.0)) throw std::invalid_argument("kernel: tabulated density has zero mass");
    for (std::size_t i = 0; i < n; ++i) t.values[i] = samples[i].second / total;
    return t;
}

}  // namespace

Kernel Kernel::build(const KernelSpec& spec, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("kernel: grid spacing must be positive");
    if (!(spec.tail_tol >= 0.0 && spec.tail_tol < 1.0))
        throw std::invalid_argument("kernel: tail_tol must lie in [0, 1)");

    std::function<double(double)> density;
    double support_hint = std::numeric_limits<double>::infinity();

    switch (spec.family) {
        case KernelFamily::Box:
        case KernelFamily::Indicator: {
            if (!(spec.a < spec.b))
                throw std::invalid_argument("kernel: interval family requires a < b");
            const double a = spec.a, b = spec.b;
            const double value = 1.0 / (b - a);
            density = [a, b, value](double z) { return (z >= a && z <= b) ? value : 0.0; };
            support_hint = std::max(std::abs(a), std::abs(b));
            break;
        }
        case KernelFamily::Gaussian: {
            if (!(spec.sigma > 0.0))
                throw std::invalid_argument("kernel: gaussian requires sigma > 0");
            const double s = spec.sigma;
            const double c = 1.0 / (s * std::sqrt(2.0 * std::numbers::pi));
            density = [s, c](double z) { return c * std::exp(-z * z / (2.0 * s * s)); };
            break;
        }
        case KernelFamily::Tabulated: {
            StepTable t = make_step_table(spec.table, h);
            support_hint = std::max(std::abs(t.edges.front()), std::abs(t.edges.back()));
            density = t;
            break;
        }
    }

    // Grow the truncation radius until the discarded mass (as seen by the
    // same midpoint rule) is within tail_tol.
    long radius = 0;
    double sum = density(0.0) * h;
    int stagnant = 0;
    while (std::max(0.0, 1.0 - sum) > spec.tail_tol) {
        ++radius;
        if (radius > 20'000'000)
            throw std::runtime_error("kernel: truncation radius exploded; tail_tol unreachable");
        const double add = (density(radius * h) + density(-radius * h)) * h;
        sum += add;
        if (add == 0.0 && radius * h > support_hint) {
            if (++stagnant > 2)
                throw std::runtime_error(
                    "kernel: quadrature mass stays below 1 - tail_tol; spacing too coarse for "
                    "this density");
        } else {
            stagnant = 0;
        }
    }

    Kernel k;
    k.h_ = h;
    k.radius_ = static_cast<int>(radius);
    k.truncated_mass_ = std::max(0.0, 1.0 - sum);
    k.weights_.resize(static_cast<std::size_t>(2 * radius + 1));
    for (long j = -radius; j <= radius; ++j)
        k.weights_[static_cast<std::size_t>(j + radius)] = density(j * h) * h;
    k.finalize();
    return k;
}

Kernel Kernel::from_weights(std::vector<double> centered_weights, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("kernel: grid spacing must be positive");
    if (centered_weights.empty() || centered_weights.size() % 2 == 0)
        throw std::invalid_argument("kernel: weight vector must be odd-sized and centered");
    for (double w : centered_weights)
        if (w < 0.0) throw std::invalid_argument("kernel: weights must be nonnegative");
    Kernel k;
    k.h_ = h;
    k.radius_ = static_cast<int>(centered_weights.size() / 2);
    k.truncated_mass_ = 0.0;
    k.weights_ = std::move(centered_weights);
    k.finalize();
    return k;
}

void Kernel::finalize() {
    renormalize_exact(weights_);
    support_lo_ = 0;
    support_hi_ = 0;
    bool found = false;
    for (int j = -radius_; j <= radius_; ++j) {
        if (weight(j) > 0.0) {
            if (!found) support_lo_ = j;
            support_hi_ = j;
            found = true;
        }
    }
    if (!found) throw std::runtime_error("kernel: no positive weight on the lattice");
    cumulative_.resize(weights_.size() + 1);
    cumulative_[0] = 0.0;
    for (std::size_t m = 0; m < weights_.size(); ++m)
        cumulative_[m + 1] = cumulative_[m] + weights_[m];
}

double Kernel::mass_in_index_range(long j_lo, long j_hi) const {
    j_lo = std::max<long>(j_lo, -radius_);
    j_hi = std::min<long>(j_hi, radius_);
    if (j_hi < j_lo) return 0.0;
    const double m =
        cumulative_[static_cast<std::size_t>(j_hi + radius_ + 1)] -
        cumulative_[static_cast<std::size_t>(j_lo + radius_)];
    return std::clamp(m, 0.0, 1.0);
}

std::uint64_t Kernel::content_hash() const {
    std::uint64_t hash = 1469598103934665603ull;
    auto mix = [&hash](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            hash ^= b[i];
            hash *= 1099511628211ull;
        }
    };
    mix(&h_, sizeof h_);
    mix(&radius_, sizeof radius_);
    mix(weights_.data(), weights_.size() * sizeof(double));
    return hash;
}

}  // namespace nldiff
