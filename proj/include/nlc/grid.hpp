#pragma once

#include <cstdint>

namespace nlc {

/// Uniform periodic box [0,L)^3 sampled at n points per axis.
///
/// Wavenumbers are k_m = (2*pi/L)*m with m in {-n/2, ..., n/2-1}; FFT index
/// j maps to m = j for j < n/2 and m = j - n otherwise. Physical sample
/// layout is x-fastest: flat = ix + n*(iy + n*iz).
class Grid {
public:
    Grid(int n, double length);

    int n() const { return n_; }
    double length() const { return length_; }

    std::int64_t size() const { return static_cast<std::int64_t>(n_) * n_ * n_; }
    double dx() const { return length_ / n_; }
    double dk() const;
    double cell_volume() const { return dx() * dx() * dx(); }

    /// FFT index -> signed mode number.
    int mode(int j) const { return j < n_ / 2 ? j : j - n_; }
    /// FFT index -> wavenumber along one axis.
    double wavenumber(int j) const { return dk() * mode(j); }

    std::int64_t index(int ix, int iy, int iz) const {
        return ix + static_cast<std::int64_t>(n_) * (iy + static_cast<std::int64_t>(n_) * iz);
    }

    bool operator==(const Grid& other) const = default;

private:
    int n_;
    double length_;
};

} // namespace nlc
