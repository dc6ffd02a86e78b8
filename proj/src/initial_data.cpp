#include "nlc/initial_data.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "nlc/spectral.hpp"

namespace nlc {

namespace {

class SeedStream {
public:
    explicit SeedStream(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return (eng_() >> 11) * 0x1.0p-53; }
    Eigen::Vector3d unit_vector() {
        const double z = 2.0 * uniform() - 1.0;
        const double phi = 2.0 * M_PI * uniform();
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(phi), r * std::sin(phi), z};
    }
    Eigen::Vector3d tangent_to(const Eigen::Vector3d& w0) {
        for (;;) {
            Eigen::Vector3d v = unit_vector();
            Eigen::Vector3d tang = v - v.dot(w0) * w0;
            if (tang.norm() > 0.1) return tang.normalized();
        }
    }

private:
    std::mt19937_64 eng_;
};

} // namespace

void InitSpec::validate(const Grid& grid) const {
    if (centers.size() != widths.size())
        throw std::invalid_argument("InitSpec: centers and widths must pair up");
    for (double w : widths) {
        if (!(w > 0.0) || w > grid.length() / 8.0)
            throw std::invalid_argument("InitSpec: widths must satisfy 0 < w <= L/8, got " +
                                        std::to_string(w));
    }
    if (velocity_amplitude < 0.0 || director_amplitude < 0.0)
        throw std::invalid_argument("InitSpec: amplitudes must be >= 0");
    if (!(delta0 > 0.0)) throw std::invalid_argument("InitSpec: delta0 must be > 0");
}

ScalarField gaussian_bump(const Grid& grid, const Eigen::Vector3d& center, double width) {
    const double L = grid.length();
    const double h = grid.dx();
    const double inv_w2 = 1.0 / (width * width);
    RealArray v = RealArray::Zero(grid.size());
    // Sum the 3^3 nearest periodic images; further images are below 1e-100
    // for widths <= L/8.
    for (int ox = -1; ox <= 1; ++ox)
        for (int oy = -1; oy <= 1; ++oy)
            for (int oz = -1; oz <= 1; ++oz) {
                const double cx = center.x() + ox * L;
                const double cy = center.y() + oy * L;
                const double cz = center.z() + oz * L;
                std::int64_t idx = 0;
                for (int iz = 0; iz < grid.n(); ++iz) {
                    const double dz = h * iz - cz;
                    for (int iy = 0; iy < grid.n(); ++iy) {
                        const double dy = h * iy - cy;
                        for (int ix = 0; ix < grid.n(); ++ix, ++idx) {
                            const double dx = h * ix - cx;
                            const double r2 = dx * dx + dy * dy + dz * dz;
                            if (r2 * inv_w2 < 230.0) v[idx] += std::exp(-r2 * inv_w2);
                        }
                    }
                }
            }
    return ScalarField::physical(grid, std::move(v));
}

VectorField3 gen_velocity(const InitSpec& spec, const Grid& grid) {
    spec.validate(grid);
    if (spec.velocity_amplitude == 0.0 || spec.centers.empty())
        return VectorField3::zeros(grid, Basis::Spectral);

    SeedStream rng(spec.seed);
    RealArray comp[3] = {RealArray::Zero(grid.size()), RealArray::Zero(grid.size()),
                         RealArray::Zero(grid.size())};
    for (std::size_t b = 0; b < spec.centers.size(); ++b) {
        const Eigen::Vector3d dir = rng.unit_vector();
        ScalarField bump = gaussian_bump(grid, spec.centers[b], spec.widths[b]);
        for (int a = 0; a < 3; ++a)
            comp[a] += spec.velocity_amplitude * dir[a] * bump.values();
    }
    VectorField3 raw(ScalarField::physical(grid, std::move(comp[0])),
                     ScalarField::physical(grid, std::move(comp[1])),
                     ScalarField::physical(grid, std::move(comp[2])));
    VectorField3 u = remove_mean(leray_project(raw));

    const double budget = 0.5 * spec.delta0 * (1.0 - 1e-12);
    const double h1 = h_norm_sq(u, 1);
    if (h1 > budget && h1 > 0.0) {
        const double scale = std::sqrt(budget / h1);
        for (int a = 0; a < 3; ++a) {
            ComplexArray c = u.comp(a).modes() * scale;
            u.comp(a) = ScalarField::spectral(grid, std::move(c));
        }
    }
    return u;
}

namespace {

/// Geodesic map: d = cos|psi| w0 + sin|psi| psi/|psi|, returned as n = d - w0.
VectorField3 sphere_map(const Grid& grid, const RealArray psi[3], const Eigen::Vector3d& w0) {
    RealArray n0(grid.size()), n1(grid.size()), n2(grid.size());
    for (std::int64_t i = 0; i < grid.size(); ++i) {
        const double px = psi[0][i], py = psi[1][i], pz = psi[2][i];
        const double r = std::sqrt(px * px + py * py + pz * pz);
        const double sinc = r < 1e-8 ? 1.0 - r * r / 6.0 : std::sin(r) / r;
        const double cosm1 = r < 1e-8 ? -r * r / 2.0 : std::cos(r) - 1.0;
        n0[i] = sinc * px + cosm1 * w0.x();
        n1[i] = sinc * py + cosm1 * w0.y();
        n2[i] = sinc * pz + cosm1 * w0.z();
    }
    return VectorField3(ScalarField::physical(grid, std::move(n0)),
                        ScalarField::physical(grid, std::move(n1)),
                        ScalarField::physical(grid, std::move(n2)));
}

} // namespace

VectorField3 gen_director(const InitSpec& spec, const Grid& grid, const Eigen::Vector3d& w0) {
    spec.validate(grid);
    if (std::abs(w0.norm() - 1.0) > 1e-14)
        throw std::invalid_argument("gen_director: w0 must be a unit vector");
    if (spec.director_amplitude == 0.0 || spec.centers.empty())
        return VectorField3::zeros(grid, Basis::Physical);

    SeedStream rng(spec.seed + 0x9e3779b97f4a7c15ull);
    RealArray psi[3] = {RealArray::Zero(grid.size()), RealArray::Zero(grid.size()),
                        RealArray::Zero(grid.size())};
    const Eigen::Vector3d shift(grid.length() / 2.0, 0.0, 0.0);
    for (std::size_t b = 0; b < spec.centers.size(); ++b) {
        const Eigen::Vector3d e = rng.tangent_to(w0);
        ScalarField plus = gaussian_bump(grid, spec.centers[b], spec.widths[b]);
        ScalarField minus = gaussian_bump(grid, spec.centers[b] + shift, spec.widths[b]);
        RealArray lobe = plus.values() - minus.values();
        for (int a = 0; a < 3; ++a) psi[a] += spec.director_amplitude * e[a] * lobe;
    }

    const double budget = 0.5 * spec.delta0 * (1.0 - 1e-9);
    RealArray scaled[3] = {psi[0], psi[1], psi[2]};
    auto build = [&](double a) {
        for (int c = 0; c < 3; ++c) scaled[c] = a * psi[c];
        return sphere_map(grid, scaled, w0);
    };

    VectorField3 n = build(1.0);
    double h2 = h_norm_sq(n, 2);
    if (h2 > budget) {
        // H2 energy is monotone in the tangent amplitude; bisect down to the
        // budget and keep the low end.
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 64 && (hi - lo) > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (h_norm_sq(build(mid), 2) > budget)
                hi = mid;
            else
                lo = mid;
        }
        n = build(lo);
    }
    return n;
}

SmallnessReport smallness_check(const VectorField3& u0, const VectorField3& n0, double delta0) {
    if (!(u0.grid() == n0.grid()))
        throw std::invalid_argument("smallness_check: fields on different grids");
    SmallnessReport rep;
    rep.budget = delta0;
    rep.value = h_norm_sq(u0, 1) + h_norm_sq(n0, 2);
    rep.margin = delta0 - rep.value;
    rep.pass = rep.value <= delta0;
    return rep;
}

} // namespace nlc
