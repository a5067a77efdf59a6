#pragma once

#include <cstdint>
#include <vector>

#include "nldiff/kernel.hpp"

namespace nldiff {

enum class RegionTag : std::uint8_t { Interior, ExtendedBoundary, Exterior };

/// The open interval Omega = (xl, xr) on the shared lattice x_i = xl + i*h,
/// together with the influence region the nonlocal operator reads.
///
/// Node i = 0 sits on xl and i = n_cells() on xr; both carry the
/// ExtendedBoundary tag (the topological boundary belongs to the extended
/// one). Strictly outside, nodes the operator can reach are
/// ExtendedBoundary and the rest of the allocated lattice is Exterior.
/// Storage spans [-J, N+J] with J the kernel truncation radius.
class DomainGeometry {
  public:
    static DomainGeometry build(double xl, double xr, const Kernel& k);

    double xl() const { return xl_; }
    double xr() const { return xr_; }
    double h() const { return h_; }
    double width() const { return xr_ - xl_; }

    /// Number of lattice cells across Omega; node N lies on xr.
    int n_cells() const { return n_; }

    int i_min() const { return -pad_; }
    int i_max() const { return n_ + pad_; }
    std::size_t node_count() const { return static_cast<std::size_t>(n_ + 2 * pad_ + 1); }
    std::size_t storage_index(int i) const { return static_cast<std::size_t>(i + pad_); }

    double coord(int i) const { return xl_ + i * h_; }
    RegionTag tag(int i) const { return tags_[storage_index(i)]; }

    bool index_in_open_omega(int i) const { return 0 < i && i < n_; }
    bool index_in_closed_omega(int i) const { return 0 <= i && i <= n_; }

    /// Closed-interval membership with a tiny snap guard against rounding
    /// of reconstructed coordinates.
    bool contains_closed(double x) const;

    std::uint64_t content_hash() const;

  private:
    double xl_ = 0.0, xr_ = 0.0, h_ = 0.0;
    int n_ = 0;
    int pad_ = 0;
    std::vector<RegionTag> tags_;
};

inline DomainGeometry build_geometry(double xl, double xr, const Kernel& k) {
    return DomainGeometry::build(xl, xr, k);
}

/// Grid maxima of the pair set-measures at scale eta, with the pairs that
/// attain them. lambda weighs the common translate mass, gamma the
/// symmetric-difference mass; pairs (x, y) run over strictly interior
/// lattice points with |x - y| < eta, x = y included.
struct LambdaGammaReport {
    double eta = 0.0;
    double lambda = 0.0;
    double gamma = 0.0;
    double lambda_x = 0.0, lambda_y = 0.0;
    double gamma_x = 0.0, gamma_y = 0.0;
};

/// refine > 1 re-evaluates on a (h/refine)-spaced pair lattice to estimate
/// the O(h) pair-discretization error; the kernel lattice is unchanged.
LambdaGammaReport lambda_gamma(const DomainGeometry& g, const Kernel& k, double eta,
                               int refine = 1);

enum class LambdaVerdict { LessThanOne, EqualsOne, Inconclusive };

/// A priori classification of lambda from the mass the domain can never
/// return: if positive, lambda <= bound < 1; if instead some interior point
/// sees the whole support strictly inside, lambda = 1.
struct LambdaRegime {
    LambdaVerdict verdict = LambdaVerdict::Inconclusive;
    double bound = 1.0;
};

LambdaRegime classify_lambda(const DomainGeometry& g, const Kernel& k);

}  // namespace nldiff
