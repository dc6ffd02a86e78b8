#pragma once

#include <utility>
#include <vector>

#include "nlc/field.hpp"
#include "nlc/grid.hpp"
#include "nlc/series.hpp"

namespace nlc {

/// Exact heat semigroup: every mode damped by exp(-|k|^2 t). t >= 0.
ScalarField exact_heat(const ScalarField& v0, double t);
VectorField3 exact_heat(const VectorField3& v0, double t);

struct BootstrapReport {
    int k = 0;
    double alpha = 0.0;
    bool forced = true;
    double horizon = 0.0;
    DecayFit fit;            // on ||del^{k+1} v||, so fit.slope targets the squared norm
    double required = 0.0;   // -(k + 5/2)
    double tolerance = 0.2;  // on the squared-norm exponent
    bool pass = false;
    std::vector<double> times;
    std::vector<double> energies; // ||del^{k+1} v||^2 at each time
};

/// Numerical realization of the heat-bootstrap rate gain: evolve
///   v_t - lap(v) = F,  F(x,t) = (1+t)^{-alpha/2} g(x),
/// from a Gaussian bump with exact mode-wise integrating factor and
/// trapezoidal Duhamel quadrature, then fit the decay of ||del^{k+1} v||^2
/// over the torus-safe window [5, min(horizon, 0.5 (L/2pi)^2)].
///
/// Forced mode requires alpha >= k + 7/2 and asserts
/// slope <= -(k+5/2) + 0.2; the F = 0 control asserts slope = -(k+5/2) +- 0.2.
BootstrapReport bootstrap_experiment(int k, double alpha, const Grid& grid, double horizon,
                                     double dt = 5e-3, double cadence = 0.25,
                                     bool with_forcing = true, double v0_amplitude = 1.0);

} // namespace nlc
