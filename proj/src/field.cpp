#include "nlc/field.hpp"

#include <stdexcept>
#include <string>

namespace nlc {

ScalarField ScalarField::physical(const Grid& grid, RealArray values) {
    if (values.size() != grid.size())
        throw std::invalid_argument("ScalarField: expected " + std::to_string(grid.size()) +
                                    " samples, got " + std::to_string(values.size()));
    ScalarField f(grid, Basis::Physical);
    f.real_ = std::move(values);
    return f;
}

ScalarField ScalarField::spectral(const Grid& grid, ComplexArray modes) {
    if (modes.size() != grid.size())
        throw std::invalid_argument("ScalarField: expected " + std::to_string(grid.size()) +
                                    " modes, got " + std::to_string(modes.size()));
    ScalarField f(grid, Basis::Spectral);
    f.cplx_ = std::move(modes);
    return f;
}

ScalarField ScalarField::zeros(const Grid& grid, Basis basis) {
    ScalarField f(grid, basis);
    if (basis == Basis::Physical)
        f.real_ = RealArray::Zero(grid.size());
    else
        f.cplx_ = ComplexArray::Zero(grid.size());
    return f;
}

const RealArray& ScalarField::values() const {
    if (basis_ != Basis::Physical)
        throw std::logic_error("ScalarField::values: field is in spectral basis");
    return real_;
}

const ComplexArray& ScalarField::modes() const {
    if (basis_ != Basis::Spectral)
        throw std::logic_error("ScalarField::modes: field is in physical basis");
    return cplx_;
}

RealArray& ScalarField::mutable_values() {
    if (basis_ != Basis::Physical)
        throw std::logic_error("ScalarField::mutable_values: field is in spectral basis");
    return real_;
}

ComplexArray& ScalarField::mutable_modes() {
    if (basis_ != Basis::Spectral)
        throw std::logic_error("ScalarField::mutable_modes: field is in physical basis");
    return cplx_;
}

VectorField3::VectorField3(ScalarField c1, ScalarField c2, ScalarField c3)
    : comps_{std::move(c1), std::move(c2), std::move(c3)} {
    for (int i = 1; i < 3; ++i) {
        if (!(comps_[i].grid() == comps_[0].grid()))
            throw std::invalid_argument("VectorField3: components live on different grids");
        if (comps_[i].basis() != comps_[0].basis())
            throw std::invalid_argument("VectorField3: components have mixed bases");
    }
}

VectorField3 VectorField3::zeros(const Grid& grid, Basis basis) {
    return VectorField3(ScalarField::zeros(grid, basis), ScalarField::zeros(grid, basis),
                        ScalarField::zeros(grid, basis));
}

} // namespace nlc
