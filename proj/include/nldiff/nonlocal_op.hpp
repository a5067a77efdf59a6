#pragma once

#include "nldiff/field.hpp"
#include "nldiff/kernel.hpp"

namespace nldiff {

enum class ApplyMethod { Auto, Direct, Fft };

/// Truncation radius (in lattice indices) above which Auto switches the
/// gain sum to the transform path. The two paths agree to 1e-12.
inline constexpr int kFftThresholdRadius = 256;

/// Apply the Dirichlet nonlocal operator at every node of the closed
/// domain: K(u)(x) = sum_j w_j * (usrc(x - z_j) - u(x)), where usrc reads u
/// at interior nodes, phi at extended-boundary nodes (the two nodes on the
/// topological boundary included) and 0 at exterior nodes.
///
/// The same formula is evaluated on the topological boundary nodes; the
/// equation holds there too. Values of the result outside the closed
/// domain are 0.
Field apply_K(const Field& u, const BoundaryData& phi, const Kernel& k,
              ApplyMethod method = ApplyMethod::Auto);

/// The extension read by the operator, materialized: u on the interior,
/// phi(., t) on the extended boundary, 0 outside.
Field extend(const Field& u, const BoundaryData& phi, double t);

/// max |phi| over the extended-boundary nodes at time t
double sampled_boundary_sup(const DomainGeometry& g, const BoundaryData& phi, double t);

}  // namespace nldiff
