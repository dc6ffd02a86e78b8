#include "nlc/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "nlc/errors.hpp"
#include "nlc/fft_engine.hpp"

namespace nlc {

namespace {

using Cplx = std::complex<double>;

Cplx ipow(int order) {
    switch (order & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

ScalarField to_spectral(const ScalarField& f) { return transform(f, Basis::Spectral); }

} // namespace

ScalarField transform(const ScalarField& f, Basis target) {
    if (f.basis() == target) return f;
    const auto& eng = FftEngine::get(f.grid());
    if (target == Basis::Spectral) {
        const RealArray& v = f.values();
        if (!v.allFinite()) throw DataError("transform: non-finite physical samples");
        ComplexArray in = v.cast<Cplx>();
        ComplexArray out;
        eng.forward_c2c(in, out);
        out *= 1.0 / static_cast<double>(f.grid().size());
        return ScalarField::spectral(f.grid(), std::move(out));
    }
    const ComplexArray& c = f.modes();
    if (!c.allFinite()) throw DataError("transform: non-finite spectral coefficients");
    ComplexArray out;
    eng.backward_c2c(c, out);
    return ScalarField::physical(f.grid(), out.real());
}

VectorField3 transform(const VectorField3& v, Basis target) {
    return VectorField3(transform(v.comp(0), target), transform(v.comp(1), target),
                        transform(v.comp(2), target));
}

ScalarField lambda_power(const ScalarField& f, double s) {
    if (s < 0.0)
        throw std::invalid_argument("lambda_power: s must be >= 0, got " + std::to_string(s));
    ScalarField g = to_spectral(f);
    if (s == 0.0) return g;
    const auto& eng = FftEngine::get(f.grid());
    ComplexArray c = g.modes() * eng.kmag().pow(s).cast<Cplx>();
    return ScalarField::spectral(f.grid(), std::move(c));
}

ScalarField partial_derivative(const ScalarField& f, int axis, int order) {
    if (axis < 1 || axis > 3)
        throw std::invalid_argument("partial_derivative: axis must be 1..3");
    if (order < 1) throw std::invalid_argument("partial_derivative: order must be >= 1");
    ScalarField g = to_spectral(f);
    const auto& eng = FftEngine::get(f.grid());
    const Cplx phase = ipow(order);
    ComplexArray c;
    if (order % 2 == 1) {
        c = g.modes() * (phase * eng.dk(axis - 1).pow(order).cast<Cplx>());
    } else {
        c = g.modes() * (phase * eng.kabs(axis - 1).pow(order).cast<Cplx>());
    }
    return ScalarField::spectral(f.grid(), std::move(c));
}

VectorField3 leray_project(const VectorField3& v) {
    VectorField3 s = transform(v, Basis::Spectral);
    const auto& eng = FftEngine::get(v.grid());
    const ComplexArray& m0 = s.comp(0).modes();
    const ComplexArray& m1 = s.comp(1).modes();
    const ComplexArray& m2 = s.comp(2).modes();
    ComplexArray divk = m0 * eng.dk(0).cast<Cplx>() + m1 * eng.dk(1).cast<Cplx>() +
                        m2 * eng.dk(2).cast<Cplx>();
    divk *= eng.inv_k2z().cast<Cplx>();
    ComplexArray o0 = m0 - divk * eng.dk(0).cast<Cplx>();
    ComplexArray o1 = m1 - divk * eng.dk(1).cast<Cplx>();
    ComplexArray o2 = m2 - divk * eng.dk(2).cast<Cplx>();
    return VectorField3(ScalarField::spectral(v.grid(), std::move(o0)),
                        ScalarField::spectral(v.grid(), std::move(o1)),
                        ScalarField::spectral(v.grid(), std::move(o2)));
}

ScalarField dealias(const ScalarField& f) {
    if (f.basis() != Basis::Spectral)
        throw std::invalid_argument("dealias: field must be in spectral basis");
    const auto& eng = FftEngine::get(f.grid());
    ComplexArray c = f.modes() * eng.dealias_mask().cast<Cplx>();
    return ScalarField::spectral(f.grid(), std::move(c));
}

VectorField3 dealias(const VectorField3& v) {
    return VectorField3(dealias(v.comp(0)), dealias(v.comp(1)), dealias(v.comp(2)));
}

namespace {

double seminorm_sq(const ScalarField& f, double k) {
    ScalarField g = to_spectral(f);
    const auto& eng = FftEngine::get(f.grid());
    const double vol = std::pow(f.grid().length(), 3);
    if (k == 0.0) return vol * g.modes().abs2().sum();
    return vol * (g.modes().abs2() * eng.k2().pow(k)).sum();
}

} // namespace

double sobolev_seminorm(const ScalarField& f, double k) {
    if (k < 0.0) throw std::invalid_argument("sobolev_seminorm: k must be >= 0");
    return std::sqrt(seminorm_sq(f, k));
}

double sobolev_seminorm(const VectorField3& v, double k) {
    if (k < 0.0) throw std::invalid_argument("sobolev_seminorm: k must be >= 0");
    return std::sqrt(seminorm_sq(v.comp(0), k) + seminorm_sq(v.comp(1), k) +
                     seminorm_sq(v.comp(2), k));
}

double lp_norm(const ScalarField& f, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    ScalarField g = transform(f, Basis::Physical);
    const double w = f.grid().cell_volume();
    double s;
    if (p == 1.0)
        s = g.values().abs().sum();
    else if (p == 2.0)
        s = g.values().square().sum();
    else
        s = g.values().abs().pow(p).sum();
    return std::pow(w * s, 1.0 / p);
}

double lp_norm(const VectorField3& v, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    VectorField3 g = transform(v, Basis::Physical);
    RealArray mag2 = g.comp(0).values().square() + g.comp(1).values().square() +
                     g.comp(2).values().square();
    const double w = v.grid().cell_volume();
    double s;
    if (p == 1.0)
        s = mag2.sqrt().sum();
    else if (p == 2.0)
        s = mag2.sum();
    else
        s = mag2.pow(0.5 * p).sum();
    return std::pow(w * s, 1.0 / p);
}

double h_norm_sq(const ScalarField& f, int s) {
    double total = 0.0;
    for (int j = 0; j <= s; ++j) total += seminorm_sq(f, j);
    return total;
}

double h_norm_sq(const VectorField3& v, int s) {
    return h_norm_sq(v.comp(0), s) + h_norm_sq(v.comp(1), s) + h_norm_sq(v.comp(2), s);
}

double hermitian_asymmetry(const ScalarField& f) {
    const ComplexArray& c = f.modes();
    const int n = f.grid().n();
    const double cmax = c.abs().maxCoeff();
    if (cmax == 0.0) return 0.0;
    double worst = 0.0;
    for (int iz = 0; iz < n; ++iz) {
        const int jz = (n - iz) % n;
        for (int iy = 0; iy < n; ++iy) {
            const int jy = (n - iy) % n;
            for (int ix = 0; ix < n; ++ix) {
                const int jx = (n - ix) % n;
                const Cplx a = c[f.grid().index(ix, iy, iz)];
                const Cplx b = std::conj(c[f.grid().index(jx, jy, jz)]);
                worst = std::max(worst, std::abs(a - b));
            }
        }
    }
    return worst / cmax;
}

namespace {

// Shared scan for the divergence metrics.
std::pair<double, double> div_scan(const VectorField3& v) {
    VectorField3 s = transform(v, Basis::Spectral);
    const auto& eng = FftEngine::get(v.grid());
    ComplexArray divk = s.comp(0).modes() * eng.dk(0).cast<Cplx>() +
                        s.comp(1).modes() * eng.dk(1).cast<Cplx>() +
                        s.comp(2).modes() * eng.dk(2).cast<Cplx>();
    RealArray mag2 = s.comp(0).modes().abs2() + s.comp(1).modes().abs2() +
                     s.comp(2).modes().abs2();
    const double resid = divk.abs().maxCoeff();
    const double scale = (eng.k2z().sqrt() * mag2.sqrt()).maxCoeff();
    return {resid, scale};
}

} // namespace

double divergence_residual(const VectorField3& v) { return div_scan(v).first; }

double divergence_residual_rel(const VectorField3& v) {
    auto [resid, scale] = div_scan(v);
    return scale > 0.0 ? resid / scale : 0.0;
}

std::complex<double> mean_mode(const ScalarField& f) { return to_spectral(f).modes()[0]; }

ScalarField remove_mean(const ScalarField& f) {
    ScalarField g = to_spectral(f);
    ComplexArray c = g.modes();
    c[0] = Cplx(0.0, 0.0);
    return ScalarField::spectral(f.grid(), std::move(c));
}

VectorField3 remove_mean(const VectorField3& v) {
    return VectorField3(remove_mean(v.comp(0)), remove_mean(v.comp(1)), remove_mean(v.comp(2)));
}

} // namespace nlc
