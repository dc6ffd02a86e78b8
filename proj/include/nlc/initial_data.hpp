#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "nlc/field.hpp"
#include "nlc/grid.hpp"

namespace nlc {

/// Recipe for small, localized, admissible initial data.
///
/// Velocity: Gaussian vector bumps, Leray-projected, mean removed, rescaled
/// to ||u0||_H1^2 <= delta0/2.
/// Director: each center spawns an antipodal +/- pair of tangent bumps
/// (partner shifted by L/2 along x), mapped to the sphere by geodesic
/// rotation about w0, rescaled to ||n0||_H2^2 <= delta0/2. The pair
/// construction keeps the tangential mean exactly zero on the grid, the
/// torus stand-in for integrable whole-space data, without touching the
/// pointwise |d0| = 1 identity.
struct InitSpec {
    std::uint64_t seed = 1;
    std::vector<Eigen::Vector3d> centers;
    std::vector<double> widths; // one per center, 0 < w <= L/8
    double velocity_amplitude = 1.0;
    double director_amplitude = 1.0;
    double delta0 = 1e-2;

    void validate(const Grid& grid) const;
};

/// Periodic Gaussian envelope exp(-|x-c|^2/w^2), summed over nearest images.
ScalarField gaussian_bump(const Grid& grid, const Eigen::Vector3d& center, double width);

VectorField3 gen_velocity(const InitSpec& spec, const Grid& grid);

/// Returns n0 = d0 - w0 with |d0| = 1 pointwise to machine precision.
VectorField3 gen_director(const InitSpec& spec, const Grid& grid, const Eigen::Vector3d& w0);

struct SmallnessReport {
    bool pass = false;
    double value = 0.0;  // ||u0||_H1^2 + ||n0||_H2^2
    double budget = 0.0; // delta0
    double margin = 0.0; // budget - value
};

/// Smallness condition ||u0||_H1^2 + ||d0-w0||_H2^2 <= delta0, with H^s the
/// sum of integer seminorms 0..s.
SmallnessReport smallness_check(const VectorField3& u0, const VectorField3& n0, double delta0);

} // namespace nlc
