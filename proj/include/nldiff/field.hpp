#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "nldiff/geometry.hpp"

namespace nldiff {

/// Grid function over the extended lattice of a DomainGeometry, stamped
/// with the time it represents. Exterior nodes hold 0; their values are
/// never read by the operator.
struct Field {
    std::shared_ptr<const DomainGeometry> geom;
    std::vector<double> values;
    double time = 0.0;

    double at(int i) const { return values[geom->storage_index(i)]; }
    double& at(int i) { return values[geom->storage_index(i)]; }

    /// max |u| over the closed domain (interior and the two boundary nodes)
    double sup_norm() const;
    double min_value() const;
    double max_value() const;
    /// sum of u*h over strictly interior nodes
    double interior_mass() const;
    bool all_finite() const;
};

/// Sample fn on the closed domain nodes; everything outside starts at 0.
Field make_field(std::shared_ptr<const DomainGeometry> geom,
                 const std::function<double(double)>& fn, double time = 0.0);

/// Dirichlet data on the extended boundary, as a function of (x, t),
/// together with a sup bound used by a priori estimates.
struct BoundaryData {
    std::function<double(double, double)> phi;
    double bounded_sup = 0.0;

    double operator()(double x, double t) const { return phi(x, t); }

    static BoundaryData zero();
    static BoundaryData constant(double c);
    static BoundaryData affine(double slope, double intercept);
};

/// Definition of the problem requires u0 = phi on the topological boundary
/// at t = 0; enforced to 1e-12 at the two nodes sitting on it.
void check_compatibility(const Field& u0, const BoundaryData& phi);

}  // namespace nldiff
