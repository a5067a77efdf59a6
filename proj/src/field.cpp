#include "nldiff/field.hpp"

#include <cmath>
#include <stdexcept>

namespace nldiff {

double Field::sup_norm() const {
    double m = 0.0;
    for (int i = 0; i <= geom->n_cells(); ++i) m = std::max(m, std::abs(at(i)));
    return m;
}

double Field::min_value() const {
    double m = at(0);
    for (int i = 1; i <= geom->n_cells(); ++i) m = std::min(m, at(i));
    return m;
}

double Field::max_value() const {
    double m = at(0);
    for (int i = 1; i <= geom->n_cells(); ++i) m = std::max(m, at(i));
    return m;
}

double Field::interior_mass() const {
    double s = 0.0;
    for (int i = 1; i < geom->n_cells(); ++i) s += at(i);
    return s * geom->h();
}

bool Field::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

Field make_field(std::shared_ptr<const DomainGeometry> geom,
                 const std::function<double(double)>& fn, double time) {
    if (!geom) throw std::invalid_argument("make_field: null geometry");
    Field f;
    f.geom = std::move(geom);
    f.values.assign(f.geom->node_count(), 0.0);
    f.time = time;
    for (int i = 0; i <= f.geom->n_cells(); ++i) f.at(i) = fn(f.geom->coord(i));
    return f;
}

BoundaryData BoundaryData::zero() {
    return {[](double, double) { return 0.0; }, 0.0};
}

BoundaryData BoundaryData::constant(double c) {
    return {[c](double, double) { return c; }, std::abs(c)};
}

BoundaryData BoundaryData::affine(double slope, double intercept) {
    return {[slope, intercept](double x, double) { return slope * x + intercept; }, 0.0};
}

void check_compatibility(const Field& u0, const BoundaryData& phi) {
    const auto& g = *u0.geom;
    for (int i : {0, g.n_cells()}) {
        const double x = g.coord(i);
        if (std::abs(phi(x, u0.time) - u0.at(i)) > 1e-12)
            throw std::invalid_argument(
                "boundary data: incompatible with the initial data on the boundary");
    }
}

}  // namespace nldiff
