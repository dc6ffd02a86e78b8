#include "nlc/heat_oracle.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "nlc/diagnostics.hpp"
#include "nlc/fft_engine.hpp"
#include "nlc/initial_data.hpp"
#include "nlc/spectral.hpp"

namespace nlc {

namespace {
using Cplx = std::complex<double>;
}

ScalarField exact_heat(const ScalarField& v0, double t) {
    if (t < 0.0) throw std::invalid_argument("exact_heat: t must be >= 0");
    ScalarField s = transform(v0, Basis::Spectral);
    const auto& eng = FftEngine::get(v0.grid());
    ComplexArray c = s.modes() * (-t * eng.k2()).exp().cast<Cplx>();
    return ScalarField::spectral(v0.grid(), std::move(c));
}

VectorField3 exact_heat(const VectorField3& v0, double t) {
    return VectorField3(exact_heat(v0.comp(0), t), exact_heat(v0.comp(1), t),
                        exact_heat(v0.comp(2), t));
}

BootstrapReport bootstrap_experiment(int k, double alpha, const Grid& grid, double horizon,
                                     double dt, double cadence, bool with_forcing,
                                     double v0_amplitude) {
    if (k < 0) throw std::invalid_argument("bootstrap_experiment: k must be >= 0");
    if (with_forcing && alpha < k + 3.5)
        throw std::invalid_argument(
            "bootstrap_experiment: the forcing must decay with alpha >= k + 7/2");
    if (grid.length() < 32.0 * M_PI - 1e-9)
        throw std::invalid_argument("bootstrap_experiment: need L >= 32*pi for the fit window");
    if (!(dt > 0.0) || !(cadence > 0.0))
        throw std::invalid_argument("bootstrap_experiment: dt and cadence must be > 0");
    const double t_fit_max = 0.5 * std::pow(grid.length() / (2.0 * M_PI), 2);
    const double t1 = std::min(horizon, t_fit_max);
    if (t1 < 5.0 + 10.0 * cadence)
        throw std::invalid_argument("bootstrap_experiment: horizon too short for the fit window");

    const auto& eng = FftEngine::get(grid);
    const double L = grid.length();

    // Width 2 makes the whole-space rates exact in (1+t): w^2 + 4t = 4(1+t).
    const Eigen::Vector3d c0(0.5 * L, 0.5 * L, 0.5 * L);
    const Eigen::Vector3d c1(0.25 * L, 0.5 * L, 0.75 * L);
    ScalarField v0 = gaussian_bump(grid, c0, 2.0);
    ComplexArray vh = eng.fold(ComplexArray(v0_amplitude * transform(v0, Basis::Spectral).modes()));

    ComplexArray gh = ComplexArray::Zero(eng.half_size());
    if (with_forcing) {
        ScalarField gbump = remove_mean(transform(gaussian_bump(grid, c1, 2.0), Basis::Spectral));
        gh = eng.fold(ComplexArray(0.5 * gbump.modes()));
    }

    const RealArray damp = (-dt * eng.k2_h()).exp();
    const RealArray wk = std::pow(L, 3) * eng.weight_h() * eng.k2_h().pow(k + 1);

    BootstrapReport rep;
    rep.k = k;
    rep.alpha = alpha;
    rep.forced = with_forcing;
    rep.horizon = horizon;
    rep.required = -(k + 2.5);

    auto sample = [&](double t) {
        rep.times.push_back(t);
        rep.energies.push_back((wk * vh.abs2()).sum());
    };

    sample(0.0);
    const long nsteps = std::lround(horizon / dt);
    long next_record = std::lround(cadence / dt);
    for (long s = 0; s < nsteps; ++s) {
        const double t = s * dt;
        if (with_forcing) {
            const double f0 = std::pow(1.0 + t, -0.5 * alpha);
            const double f1 = std::pow(1.0 + t + dt, -0.5 * alpha);
            vh = vh * damp.cast<Cplx>() +
                 gh * (0.5 * dt * f0 * damp.cast<Cplx>() + Cplx(0.5 * dt * f1, 0.0));
        } else {
            vh *= damp.cast<Cplx>();
        }
        if (s + 1 == next_record || s + 1 == nsteps) {
            sample((s + 1) * dt);
            if (s + 1 == next_record) next_record += std::lround(cadence / dt);
        }
    }

    double emax = 0.0;
    for (double e : rep.energies) emax = std::max(emax, e);
    if (emax == 0.0) {
        rep.pass = true; // v stays identically zero
        return rep;
    }
    std::vector<double> values(rep.energies.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::sqrt(rep.energies[i]);
    rep.fit = fit_decay_samples(rep.times, values,
                                "grad" + std::to_string(k + 1) + "_v", 5.0, t1);
    rep.pass = with_forcing ? rep.fit.slope <= rep.required + rep.tolerance
                            : std::abs(rep.fit.slope - rep.required) <= rep.tolerance;
    return rep;
}

} // namespace nlc
