#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace nldiff {

enum class KernelFamily { Box, Gaussian, Indicator, Tabulated };

/// Parameters of a jump density before discretization.
///
/// Interval families (Box, Indicator) carry [a, b]; both normalize to the
/// constant density 1/(b-a). Gaussian carries the standard deviation.
/// Tabulated carries (offset, density) samples interpreted as a step
/// function, piecewise constant on cells centered at the sample offsets.
struct KernelSpec {
    KernelFamily family = KernelFamily::Box;
    double a = -1.0;
    double b = 1.0;
    double sigma = 1.0;
    double tail_tol = 1e-10;
    std::vector<std::pair<double, double>> table;
};

/// Discrete jump measure: nonnegative midpoint-quadrature weights on the
/// offset lattice {j*h : |j| <= J}, renormalized to unit total mass.
///
/// The weight sum is driven to exactly 1.0 in floating point so that
/// full-mass set queries return 1 bitwise. Immutable after construction.
class Kernel {
  public:
    static Kernel build(const KernelSpec& spec, double h);

    /// Wrap an explicit centered weight vector (odd length, index J = middle).
    /// Weights are validated and renormalized like built kernels.
    static Kernel from_weights(std::vector<double> centered_weights, double h);

    double h() const { return h_; }
    int radius_index() const { return radius_; }
    double effective_radius() const { return radius_ * h_; }
    double truncated_mass() const { return truncated_mass_; }

    double offset(int j) const { return j * h_; }
    double weight(int j) const { return weights_[static_cast<std::size_t>(j + radius_)]; }
    std::span<const double> weights() const { return weights_; }

    /// Support hull in lattice indices: smallest/largest j with weight > 0.
    int support_lo() const { return support_lo_; }
    int support_hi() const { return support_hi_; }

    /// Total weight of offsets with index in [j_lo, j_hi], clipped to the
    /// lattice. Prefix-sum based; the full range returns exactly 1.
    double mass_in_index_range(long j_lo, long j_hi) const;

    std::uint64_t content_hash() const;

  private:
    Kernel() = default;

    double h_ = 0.0;
    int radius_ = 0;
    double truncated_mass_ = 0.0;
    int support_lo_ = 0;
    int support_hi_ = 0;
    std::vector<double> weights_;
    std::vector<double> cumulative_;  // cumulative_[m] = sum of weights_[0..m)

    void finalize();
};

/// Free-function spelling of Kernel::build.
inline Kernel build_kernel(const KernelSpec& spec, double h) { return Kernel::build(spec, h); }

/// Total weight of offsets satisfying a predicate. Result lies in [0, 1];
/// the always-true predicate returns exactly 1.
template <class Pred>
double mass_on_set(const Kernel& k, Pred&& member) {
    double m = 0.0;
    for (int j = -k.radius_index(); j <= k.radius_index(); ++j) {
        if (member(k.offset(j))) m += k.weight(j);
    }
    return std::clamp(m, 0.0, 1.0);
}

}  // namespace nldiff
