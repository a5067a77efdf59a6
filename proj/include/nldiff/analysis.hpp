#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nldiff/evolution.hpp"
#include "nldiff/geometry.hpp"

namespace nldiff {

/// Discrete modulus of continuity: max |u(x) - u(y)| over strictly
/// interior lattice pairs with |x - y| < eta.
double modulus(const Field& u, double eta);

/// A priori envelope for the modulus at time t given the scale quantities
/// lambda and gamma and the initial modulus omega0. Below one, lambda
/// yields exponential decay toward gamma*sup_u0/(1-lambda); at one the
/// envelope grows linearly. The whole-space case (lambda = 1, gamma = 0)
/// returns omega0 unchanged.
double modulus_envelope(double omega0, double lambda, double gamma, double sup_u0, double t);

enum class EnvelopeBranch { ExponentialDecay, LinearGrowth };

struct ModulusRow {
    double t = 0.0;
    double eta = 0.0;
    double omega = 0.0;
    double bound = 0.0;
    EnvelopeBranch branch = EnvelopeBranch::ExponentialDecay;
};

struct ThetaRow {
    double t = 0.0;
    double eta = 0.0;
    double theta = 0.0;
};

struct ModulusReport {
    std::vector<ModulusRow> rows;
    /// true when the run used zero boundary data, the only case the
    /// envelope applies to; otherwise rows carry measurements and theta
    /// holds the boundary-data term, reported but never asserted
    bool envelope_asserted = false;
    bool all_within = true;
    double max_excess = 0.0;  // max over rows of omega - (bound + tol_quad)
    double tol_quad = 0.0;
    std::vector<ThetaRow> theta;
};

/// Measure the modulus of every stored snapshot at each eta and compare
/// with the envelope fed by lambda_gamma. tol_quad covers the O(h)
/// quadrature and O(dt) stepping error; defaults to 5*(h + dt)*sup_u0.
ModulusReport check_bounds(const SolveResult& run, const Kernel& k,
                           const std::vector<double>& etas,
                           const BoundaryData* phi_if_nonzero = nullptr,
                           std::optional<double> tol_quad = std::nullopt);

enum class PositivityHypothesis {
    Satisfied,
    NoSymmetricSupportNeighborhood,
    InitialDataZero,
    InitialDataNegative,
    BoundaryDataNonzero,
};

struct PositivityReport {
    PositivityHypothesis hypothesis = PositivityHypothesis::Satisfied;
    double eta_supp = 0.0;  // radius of the symmetric all-positive weight interval
    int k_min = 0;          // steps to cover the domain diameter in eta_supp hops
    double tol_pos = 1e-12;
    /// time of the first stored snapshot at which every node of the closed
    /// domain exceeded tol_pos, when that happened
    std::optional<double> all_positive_by;
    std::optional<double> counterexample_x;  // smallest node that stayed low
    /// per node of the closed domain: (x, first stored time with u > tol_pos);
    /// never-positive nodes carry +inf
    std::vector<std::pair<double, double>> first_positive;
};

/// Positivity propagation diagnostic: with nonnegative, nonzero initial
/// data, zero boundary data and a kernel whose support contains a
/// symmetric interval around the origin, every node of the closed domain
/// must exceed tol_pos once k_min steps have elapsed.
PositivityReport positivity_study(const SolveResult& run, const Kernel& k,
                                  double tol_pos = 1e-12);

}  // namespace nldiff
