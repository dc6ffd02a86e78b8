#include "nlc/diagnostics.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "nlc/errors.hpp"
#include "nlc/fft_engine.hpp"
#include "nlc/spectral.hpp"

namespace nlc {

namespace {
using Cplx = std::complex<double>;
constexpr Cplx kI{0.0, 1.0};
} // namespace

SeriesRow record(const FlowState& state, const ModelParams& params, int k_max,
                 const std::vector<double>& p_list) {
    if (k_max < 1) throw std::invalid_argument("record: k_max must be >= 1");
    const Grid& g = state.u.grid();
    const auto& eng = FftEngine::get(g);

    SeriesRow row;
    row.t = state.t;
    VectorField3 u = transform(state.u, Basis::Spectral);
    VectorField3 n = transform(state.n, Basis::Spectral);

    for (int k = 0; k <= k_max; ++k) row.u_norms.push_back(sobolev_seminorm(u, k));
    for (int m = 0; m <= k_max + 1; ++m) row.n_norms.push_back(sobolev_seminorm(n, m));
    for (double p : p_list) row.n_lp.push_back(lp_norm(n, p));

    // n_t = lap(n) + rhs_n
    VectorField3 rn = params.nonlinear_enabled ? rhs_n(state, params)
                                               : VectorField3::zeros(g, Basis::Spectral);
    auto lap_plus = [&](const ScalarField& f, const ScalarField& add) {
        ComplexArray c = -(f.modes() * eng.k2().cast<Cplx>()) + add.modes();
        return ScalarField::spectral(g, std::move(c));
    };
    VectorField3 nt(lap_plus(n.comp(0), rn.comp(0)), lap_plus(n.comp(1), rn.comp(1)),
                    lap_plus(n.comp(2), rn.comp(2)));
    for (int k = 0; k < k_max; ++k) row.nt_norms.push_back(sobolev_seminorm(nt, k));

    // u_t = lap(u) - grad(P) - u.grad(u) - div(S), assembled from public ops
    ScalarField P = params.nonlinear_enabled ? recover_pressure(state, params)
                                             : ScalarField::zeros(g, Basis::Spectral);
    for (int k = 0; k < k_max; ++k) row.gradp_norms.push_back(sobolev_seminorm(P, k + 1));

    ComplexArray ut[3];
    if (params.nonlinear_enabled) {
        VectorField3 up = transform(state.u, Basis::Physical);
        SymTensorField S = elastic_stress(state.n, params);
        for (int a = 0; a < 3; ++a) {
            RealArray adv = RealArray::Zero(g.size());
            for (int j = 0; j < 3; ++j)
                adv += up.comp(j).values() *
                       transform(partial_derivative(u.comp(a), j + 1), Basis::Physical).values();
            ScalarField advh = transform(ScalarField::physical(g, std::move(adv)), Basis::Spectral);
            if (params.dealias_on) advh = dealias(advh);
            ComplexArray divS = (S.entry(1, a + 1).modes() * eng.dk(0).cast<Cplx>() +
                                 S.entry(2, a + 1).modes() * eng.dk(1).cast<Cplx>() +
                                 S.entry(3, a + 1).modes() * eng.dk(2).cast<Cplx>()) *
                                kI;
            ut[a] = -(u.comp(a).modes() * eng.k2().cast<Cplx>()) -
                    P.modes() * eng.dk(a).cast<Cplx>() * kI - advh.modes() - divS;
        }
    } else {
        for (int a = 0; a < 3; ++a) ut[a] = -(u.comp(a).modes() * eng.k2().cast<Cplx>());
    }
    VectorField3 utv(ScalarField::spectral(g, std::move(ut[0])),
                     ScalarField::spectral(g, std::move(ut[1])),
                     ScalarField::spectral(g, std::move(ut[2])));
    for (int k = 0; k < k_max; ++k) row.ut_norms.push_back(sobolev_seminorm(utv, k));
    return row;
}

CheckReport check_energy_dissipation(const NormSeries& series, EnergyMode mode, int level) {
    const double tol_rel = 1e-8;
    auto energy = [&](const SeriesRow& r) {
        switch (mode) {
            case EnergyMode::L2Director:
                return r.n_norms[0] * r.n_norms[0];
            case EnergyMode::LevelK: {
                if (level < 0 || level >= static_cast<int>(r.u_norms.size()) ||
                    level + 1 >= static_cast<int>(r.n_norms.size()))
                    throw std::invalid_argument("check_energy_dissipation: level out of range");
                return r.u_norms[level] * r.u_norms[level] +
                       r.n_norms[level + 1] * r.n_norms[level + 1];
            }
            case EnergyMode::FullHm: {
                if (level < 0 || level >= static_cast<int>(r.u_norms.size()) ||
                    level + 1 >= static_cast<int>(r.n_norms.size()))
                    throw std::invalid_argument("check_energy_dissipation: level out of range");
                double e = 0.0;
                for (int j = 0; j <= level; ++j) e += r.u_norms[j] * r.u_norms[j];
                for (int j = 0; j <= level + 1; ++j) e += r.n_norms[j] * r.n_norms[j];
                return e;
            }
        }
        return 0.0;
    };

    CheckReport rep;
    switch (mode) {
        case EnergyMode::L2Director: rep.name = "energy_dissipation_l2_director"; break;
        case EnergyMode::LevelK:
            rep.name = "energy_dissipation_level_k" + std::to_string(level);
            break;
        case EnergyMode::FullHm:
            rep.name = "energy_dissipation_full_h" + std::to_string(level);
            break;
    }
    rep.tol = tol_rel;
    rep.pass = true;
    double worst = -1e300;
    double worst_rel = 0.0;
    for (std::size_t j = 0; j + 1 < series.rows.size(); ++j) {
        const double e0 = energy(series.rows[j]);
        const double e1 = energy(series.rows[j + 1]);
        const double slack = e1 - e0 - tol_rel * e0;
        worst = std::max(worst, slack);
        if (e0 > 0.0) worst_rel = std::max(worst_rel, (e1 - e0) / e0);
        if (slack > 0.0) rep.pass = false;
        ++rep.checked;
    }
    rep.worst_slack = rep.checked ? worst : 0.0;
    rep.detail = "worst relative increase " + std::to_string(worst_rel);
    if (rep.checked == 0) rep.pass = true;
    return rep;
}

CheckReport check_lp_dissipation(const FlowState& before, const FlowState& after, double p) {
    if (p < 2.0) throw std::invalid_argument("check_lp_dissipation: p must be >= 2");
    const double dt = after.t - before.t;
    if (!(dt > 0.0))
        throw std::invalid_argument("check_lp_dissipation: states must be dt apart in time");
    const Grid& g = before.n.grid();

    auto integral = [&](const FlowState& s) {
        const double norm = lp_norm(s.n, p);
        return std::pow(norm, p);
    };
    VectorField3 np = transform(before.n, Basis::Physical);
    RealArray mag2 = np.comp(0).values().square() + np.comp(1).values().square() +
                     np.comp(2).values().square();
    RealArray gfield = mag2.pow(0.25 * p);
    const double dirichlet = grad_sq_integral_fd4(gfield, g);
    const double cp = 4.0 * (p - 1.5) / p;

    const double i0 = integral(before);
    const double i1 = integral(after);
    CheckReport rep;
    rep.name = "lp_dissipation_p" + std::to_string(p);
    rep.worst_slack = (i1 - i0) / dt + cp * dirichlet;
    rep.tol = 1e-6 * i0 / dt;
    rep.pass = rep.worst_slack <= rep.tol;
    rep.checked = 1;
    return rep;
}

CheckReport check_l1_bound(const NormSeries& series) {
    CheckReport rep;
    rep.name = "l1_bound";
    rep.pass = true;
    std::size_t p1 = series.p_list.size();
    for (std::size_t i = 0; i < series.p_list.size(); ++i)
        if (std::abs(series.p_list[i] - 1.0) < 1e-12) p1 = i;
    if (p1 == series.p_list.size())
        throw std::invalid_argument("check_l1_bound: series does not carry ||n||_L1");
    if (series.rows.empty()) return rep;
    const double l1_0 = series.rows.front().n_lp[p1];
    rep.tol = 1e-6 * l1_0;
    double worst = -1e300;
    for (const auto& r : series.rows) {
        const double bound = l1_0 + r.cum_dissipation + rep.tol;
        worst = std::max(worst, r.n_lp[p1] - bound);
        if (r.n_lp[p1] > bound) rep.pass = false;
        ++rep.checked;
    }
    rep.worst_slack = worst;
    return rep;
}

namespace {

ShellReport shell_impl(double s_lo, double s_mid, double s_hi, int j, double R, double t) {
    ShellReport rep;
    rep.j = j;
    rep.R = R;
    rep.t = t;
    rep.lhs = s_hi;
    rep.rhs = R / (1.0 + t) * s_mid - R * R / ((1.0 + t) * (1.0 + t)) * s_lo;
    rep.slack = rep.lhs - rep.rhs;
    rep.pass = rep.slack >= -1e-12 * rep.lhs;
    return rep;
}

void shell_validate(int j, double R, double t) {
    if (j < 1) throw std::invalid_argument("check_shell_split: j must be >= 1");
    if (!(R > 0.0)) throw std::invalid_argument("check_shell_split: R must be > 0");
    if (t < 0.0) throw std::invalid_argument("check_shell_split: t must be >= 0");
}

} // namespace

ShellReport check_shell_split(const ScalarField& f, int j, double R, double t) {
    shell_validate(j, R, t);
    auto sq = [&](double x) { return x * x; };
    return shell_impl(sq(sobolev_seminorm(f, j - 1)), sq(sobolev_seminorm(f, j)),
                      sq(sobolev_seminorm(f, j + 1)), j, R, t);
}

ShellReport check_shell_split(const VectorField3& f, int j, double R, double t) {
    shell_validate(j, R, t);
    auto sq = [&](double x) { return x * x; };
    return shell_impl(sq(sobolev_seminorm(f, j - 1)), sq(sobolev_seminorm(f, j)),
                      sq(sobolev_seminorm(f, j + 1)), j, R, t);
}

namespace {

CheckReport interpolation_impl(double a, double b, double c, double s, double l) {
    CheckReport rep;
    rep.name = "interpolation_s" + std::to_string(s) + "_l" + std::to_string(l);
    rep.tol = 1e-12;
    rep.checked = 1;
    double ratio;
    if (b == 0.0 || (l > 0.0 && c == 0.0 && s > 0.0)) {
        ratio = a == 0.0 ? 0.0 : 1e300;
    } else if (l == 0.0) {
        ratio = a / b;
    } else {
        ratio = a / (std::pow(b, 1.0 - s / l) * std::pow(c, s / l));
    }
    rep.worst_slack = ratio - 1.0;
    rep.pass = ratio <= 1.0 + rep.tol;
    rep.detail = "ratio " + std::to_string(ratio);
    return rep;
}

void interpolation_validate(double s, double l) {
    if (s < 0.0) throw std::invalid_argument("check_interpolation: s must be >= 0");
    if (s > l) throw std::invalid_argument("check_interpolation: s must not exceed l");
}

} // namespace

CheckReport check_interpolation(const ScalarField& f, double s, double l) {
    interpolation_validate(s, l);
    return interpolation_impl(sobolev_seminorm(f, s), sobolev_seminorm(f, 0.0),
                              sobolev_seminorm(f, l), s, l);
}

CheckReport check_interpolation(const VectorField3& f, double s, double l) {
    interpolation_validate(s, l);
    return interpolation_impl(sobolev_seminorm(f, s), sobolev_seminorm(f, 0.0),
                              sobolev_seminorm(f, l), s, l);
}

DecayFit fit_decay_samples(const std::vector<double>& t, const std::vector<double>& value,
                           const std::string& quantity, double t0, double t1) {
    if (!(t1 > t0)) throw std::invalid_argument("fit_decay: window must satisfy t1 > t0");
    // absorb float dust in recorded times at the window edges
    const double edge = 1e-9 * std::max({1.0, std::abs(t0), std::abs(t1)});
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t0 - edge || t[i] > t1 + edge) continue;
        if (!(value[i] > 0.0))
            throw std::invalid_argument("fit_decay: nonpositive value in window at t = " +
                                        std::to_string(t[i]));
        xs.push_back(std::log1p(t[i]));
        ys.push_back(2.0 * std::log(value[i]));
    }
    if (xs.size() < 10)
        throw std::invalid_argument("fit_decay: window holds " + std::to_string(xs.size()) +
                                    " rows, need >= 10");
    const std::size_t m = xs.size();
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    DecayFit fit;
    fit.quantity = quantity;
    fit.t0 = t0;
    fit.t1 = t1;
    fit.points = static_cast<int>(m);
    fit.slope = sxy / sxx;
    fit.exponent = 0.5 * fit.slope;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

DecayFit fit_decay(const NormSeries& series, const std::string& quantity, double t0, double t1) {
    return fit_decay_samples(series.column("t"), series.column(quantity), quantity, t0, t1);
}

double grad_sq_integral_fd4(const RealArray& g, const Grid& grid) {
    const int n = grid.n();
    if (g.size() != grid.size())
        throw std::invalid_argument("grad_sq_integral_fd4: size mismatch");
    const double inv12h = 1.0 / (12.0 * grid.dx());
    std::vector<int> p1(n), p2(n), m1(n), m2(n);
    for (int i = 0; i < n; ++i) {
        p1[i] = (i + 1) % n;
        p2[i] = (i + 2) % n;
        m1[i] = (i - 1 + n) % n;
        m2[i] = (i - 2 + n) % n;
    }
    double acc = 0.0;
    const std::int64_t sy = n, sz = static_cast<std::int64_t>(n) * n;
    for (int iz = 0; iz < n; ++iz)
        for (int iy = 0; iy < n; ++iy) {
            const std::int64_t base = iy * sy + iz * sz;
            const std::int64_t rowp1 = p1[iy] * sy + iz * sz, rowm1 = m1[iy] * sy + iz * sz;
            const std::int64_t rowp2 = p2[iy] * sy + iz * sz, rowm2 = m2[iy] * sy + iz * sz;
            const std::int64_t layp1 = iy * sy + p1[iz] * sz, laym1 = iy * sy + m1[iz] * sz;
            const std::int64_t layp2 = iy * sy + p2[iz] * sz, laym2 = iy * sy + m2[iz] * sz;
            for (int ix = 0; ix < n; ++ix) {
                const double dx = (-g[base + p2[ix]] + 8.0 * g[base + p1[ix]] -
                                   8.0 * g[base + m1[ix]] + g[base + m2[ix]]) *
                                  inv12h;
                const double dy = (-g[rowp2 + ix] + 8.0 * g[rowp1 + ix] - 8.0 * g[rowm1 + ix] +
                                   g[rowm2 + ix]) *
                                  inv12h;
                const double dz = (-g[layp2 + ix] + 8.0 * g[layp1 + ix] - 8.0 * g[laym1 + ix] +
                                   g[laym2 + ix]) *
                                  inv12h;
                acc += dx * dx + dy * dy + dz * dz;
            }
        }
    return acc * grid.cell_volume();
}

} // namespace nlc
