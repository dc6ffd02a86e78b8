#pragma once

#include <array>
#include <complex>
#include <utility>

#include <Eigen/Core>

#include "nlc/grid.hpp"

namespace nlc {

enum class Basis { Physical, Spectral };

using RealArray = Eigen::ArrayXd;
using ComplexArray = Eigen::ArrayXcd;

/// One real scalar field on a periodic grid, stored either as N^3 physical
/// samples (real) or as the full N^3 cube of Fourier coefficients (complex,
/// Hermitian-symmetric). Fields are immutable values: operations return new
/// fields.
///
/// Spectral convention: c_m = (1/N^3) sum_x f(x) exp(-i k_m.x), so that
/// f(x) = sum_m c_m exp(+i k_m.x) and the L2 norm is L^3 * sum|c_m|^2.
class ScalarField {
public:
    static ScalarField physical(const Grid& grid, RealArray values);
    static ScalarField spectral(const Grid& grid, ComplexArray modes);
    static ScalarField zeros(const Grid& grid, Basis basis);

    const Grid& grid() const { return grid_; }
    Basis basis() const { return basis_; }

    const RealArray& values() const;
    const ComplexArray& modes() const;

    RealArray& mutable_values();
    ComplexArray& mutable_modes();

private:
    ScalarField(const Grid& grid, Basis basis) : grid_(grid), basis_(basis) {}

    Grid grid_;
    Basis basis_;
    RealArray real_;
    ComplexArray cplx_;
};

/// Three scalar components on one shared grid and basis.
class VectorField3 {
public:
    VectorField3(ScalarField c1, ScalarField c2, ScalarField c3);
    static VectorField3 zeros(const Grid& grid, Basis basis);

    const Grid& grid() const { return comps_[0].grid(); }
    Basis basis() const { return comps_[0].basis(); }

    const ScalarField& comp(int i) const { return comps_[i]; }
    ScalarField& comp(int i) { return comps_[i]; }

private:
    std::array<ScalarField, 3> comps_;
};

} // namespace nlc
