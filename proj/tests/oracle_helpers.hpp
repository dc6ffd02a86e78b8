#pragma once

// Shared test utilities: deterministic random fields, coordinate sampling,
// and finite-difference oracles kept independent of the spectral code paths
// they are used to check.

#include <cmath>
#include <cstdint>
#include <random>

#include "nlc/field.hpp"
#include "nlc/grid.hpp"
#include "nlc/spectral.hpp"

namespace nlc::testing {

/// Deterministic uniforms/normals on top of mt19937_64 (the distributions in
/// <random> are implementation-defined, the raw engine is not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return (eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

template <typename F>
ScalarField sample(const Grid& g, F&& fn) {
    RealArray v(g.size());
    const double h = g.dx();
    std::int64_t idx = 0;
    for (int iz = 0; iz < g.n(); ++iz)
        for (int iy = 0; iy < g.n(); ++iy)
            for (int ix = 0; ix < g.n(); ++ix, ++idx) v[idx] = fn(h * ix, h * iy, h * iz);
    return ScalarField::physical(g, std::move(v));
}

inline ScalarField random_physical(const Grid& g, std::uint64_t seed) {
    Rng rng(seed);
    RealArray v(g.size());
    for (std::int64_t i = 0; i < g.size(); ++i) v[i] = rng.normal();
    return ScalarField::physical(g, std::move(v));
}

/// Smooth random field: white noise truncated to |m| <= mmax per axis.
inline ScalarField random_band_limited(const Grid& g, std::uint64_t seed, int mmax) {
    ScalarField f = transform(random_physical(g, seed), Basis::Spectral);
    ComplexArray c = f.modes();
    std::int64_t idx = 0;
    for (int iz = 0; iz < g.n(); ++iz)
        for (int iy = 0; iy < g.n(); ++iy)
            for (int ix = 0; ix < g.n(); ++ix, ++idx) {
                if (std::abs(g.mode(ix)) > mmax || std::abs(g.mode(iy)) > mmax ||
                    std::abs(g.mode(iz)) > mmax)
                    c[idx] = 0.0;
            }
    return ScalarField::spectral(g, std::move(c));
}

inline VectorField3 random_band_limited_vec(const Grid& g, std::uint64_t seed, int mmax) {
    return VectorField3(random_band_limited(g, seed, mmax),
                        random_band_limited(g, seed + 1, mmax),
                        random_band_limited(g, seed + 2, mmax));
}

/// 8th-order centered first derivative on the periodic grid; independent of
/// the spectral derivative path.
inline RealArray fd_partial8(const RealArray& v, const Grid& g, int axis) {
    static const double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
    const int n = g.n();
    const double h = g.dx();
    RealArray out(g.size());
    const int stride[3] = {1, n, n * n};
    const int s = stride[axis - 1];
    auto wrap = [&](int i) { return (i % n + n) % n; };
    std::int64_t idx = 0;
    for (int iz = 0; iz < n; ++iz)
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix, ++idx) {
                const int pos[3] = {ix, iy, iz};
                const int p = pos[axis - 1];
                const std::int64_t base = idx - static_cast<std::int64_t>(p) * s;
                double acc = 0.0;
                for (int o = 1; o <= 4; ++o)
                    acc += c[o - 1] * (v[base + static_cast<std::int64_t>(wrap(p + o)) * s] -
                                       v[base + static_cast<std::int64_t>(wrap(p - o)) * s]);
                out[idx] = acc / h;
            }
    return out;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

inline double max_abs_diff(const RealArray& a, const RealArray& b) {
    return (a - b).abs().maxCoeff();
}

} // namespace nlc::testing
