#include "nlc/model.hpp"

#include <cmath>
#include <complex>
#include <filesystem>
#include <iostream>
#include <stdexcept>

#include "nlc/diagnostics.hpp"
#include "nlc/errors.hpp"
#include "nlc/fft_engine.hpp"
#include "nlc/initial_data.hpp"
#include "nlc/series_io.hpp"
#include "nlc/snapshot.hpp"
#include "nlc/spectral.hpp"

namespace nlc {

namespace {
using Cplx = std::complex<double>;
constexpr Cplx kI{0.0, 1.0};
} // namespace

void ModelParams::validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("ModelParams: mu must be > 0");
    if (std::abs(w0.norm() - 1.0) > 1e-14)
        throw std::invalid_argument("ModelParams: |w0| must equal 1 to 1e-14");
    if (!(dt > 0.0)) throw std::invalid_argument("ModelParams: dt must be > 0");
    if (!(constraint_abort_tol > 0.0))
        throw std::invalid_argument("ModelParams: constraint_abort_tol must be > 0");
}

int SymTensorField::slot(int i, int j) {
    if (i < 1 || i > 3 || j < 1 || j > 3)
        throw std::invalid_argument("SymTensorField: indices must be 1..3");
    if (i > j) std::swap(i, j);
    if (i == j) return i - 1;
    return i + j; // (1,2)->3, (1,3)->4, (2,3)->5
}

SymTensorField::SymTensorField(const Grid& grid, Basis basis)
    : e_{ScalarField::zeros(grid, basis), ScalarField::zeros(grid, basis),
         ScalarField::zeros(grid, basis), ScalarField::zeros(grid, basis),
         ScalarField::zeros(grid, basis), ScalarField::zeros(grid, basis)} {}

namespace {

// Physical samples of every component and first derivative of a vector field.
struct PhysVec {
    RealArray comp[3];
    RealArray grad[3][3]; // grad[j][a] = d_j f_a
};

PhysVec physical_with_gradients(const VectorField3& f) {
    PhysVec out;
    for (int a = 0; a < 3; ++a) {
        out.comp[a] = transform(f.comp(a), Basis::Physical).values();
        for (int j = 0; j < 3; ++j)
            out.grad[j][a] = transform(partial_derivative(f.comp(a), j + 1), Basis::Physical)
                                 .values();
    }
    return out;
}

ScalarField product_to_spectral(const Grid& g, RealArray vals, bool dealias_on) {
    ScalarField f = transform(ScalarField::physical(g, std::move(vals)), Basis::Spectral);
    return dealias_on ? dealias(f) : f;
}

double constraint_deviation(const VectorField3& n, const Eigen::Vector3d& w0) {
    VectorField3 p = transform(n, Basis::Physical);
    RealArray mag = ((p.comp(0).values() + w0.x()).square() +
                     (p.comp(1).values() + w0.y()).square() +
                     (p.comp(2).values() + w0.z()).square())
                        .sqrt();
    return (mag - 1.0).abs().maxCoeff();
}

void validate_state(const FlowState& s, const ModelParams& p) {
    if (!(s.u.grid() == s.n.grid()))
        throw std::invalid_argument("FlowState: u and n live on different grids");
    const double div = divergence_residual_rel(s.u);
    if (div > 1e-6)
        throw std::invalid_argument("FlowState: velocity not divergence-free (residual " +
                                    std::to_string(div) + ")");
    const double dev = constraint_deviation(s.n, p.w0);
    if (dev > p.constraint_abort_tol) throw ConstraintAbort(s.t, dev, p.constraint_abort_tol);
}

} // namespace

SymTensorField elastic_stress(const VectorField3& n, const ModelParams& params) {
    const Grid& g = n.grid();
    PhysVec pn = physical_with_gradients(n);
    SymTensorField S(g, Basis::Spectral);
    for (int i = 1; i <= 3; ++i)
        for (int j = i; j <= 3; ++j) {
            RealArray e = pn.grad[i - 1][0] * pn.grad[j - 1][0] +
                          pn.grad[i - 1][1] * pn.grad[j - 1][1] +
                          pn.grad[i - 1][2] * pn.grad[j - 1][2];
            S.entry(i, j) = product_to_spectral(g, std::move(e), params.dealias_on);
        }
    return S;
}

namespace {

// -u.grad(u) - div(elastic stress), before projection, in spectral basis.
void nonlinear_momentum(const FlowState& s, const ModelParams& p, ComplexArray out[3]) {
    const Grid& g = s.u.grid();
    const auto& eng = FftEngine::get(g);
    PhysVec pu = physical_with_gradients(s.u);
    SymTensorField S = elastic_stress(s.n, p);
    for (int a = 0; a < 3; ++a) {
        RealArray adv = pu.comp[0] * pu.grad[0][a] + pu.comp[1] * pu.grad[1][a] +
                        pu.comp[2] * pu.grad[2][a];
        ScalarField advhat = product_to_spectral(g, std::move(adv), p.dealias_on);
        ComplexArray divS = (S.entry(1, a + 1).modes() * eng.dk(0).cast<Cplx>() +
                             S.entry(2, a + 1).modes() * eng.dk(1).cast<Cplx>() +
                             S.entry(3, a + 1).modes() * eng.dk(2).cast<Cplx>()) *
                            kI;
        out[a] = -advhat.modes() - divS;
    }
}

} // namespace

VectorField3 rhs_u(const FlowState& state, const ModelParams& params) {
    params.validate();
    validate_state(state, params);
    const Grid& g = state.u.grid();
    if (!params.nonlinear_enabled) return VectorField3::zeros(g, Basis::Spectral);
    ComplexArray nl[3];
    nonlinear_momentum(state, params, nl);
    VectorField3 f(ScalarField::spectral(g, std::move(nl[0])),
                   ScalarField::spectral(g, std::move(nl[1])),
                   ScalarField::spectral(g, std::move(nl[2])));
    return leray_project(f);
}

VectorField3 rhs_n(const FlowState& state, const ModelParams& params) {
    params.validate();
    validate_state(state, params);
    const Grid& g = state.u.grid();
    if (!params.nonlinear_enabled) return VectorField3::zeros(g, Basis::Spectral);

    PhysVec pn = physical_with_gradients(state.n);
    RealArray up[3];
    for (int a = 0; a < 3; ++a) up[a] = transform(state.u.comp(a), Basis::Physical).values();

    RealArray q = RealArray::Zero(g.size());
    for (int j = 0; j < 3; ++j)
        for (int a = 0; a < 3; ++a) q += pn.grad[j][a].square();
    // two-pass dealiasing of the cubic term: truncate |grad n|^2 first
    RealArray qd;
    if (params.dealias_on)
        qd = transform(dealias(transform(ScalarField::physical(g, q), Basis::Spectral)),
                       Basis::Physical)
                 .values();
    else
        qd = q;

    ComplexArray out[3];
    for (int a = 0; a < 3; ++a) {
        RealArray v = -(up[0] * pn.grad[0][a] + up[1] * pn.grad[1][a] + up[2] * pn.grad[2][a]) +
                      qd * (pn.comp[a] + params.w0[a]);
        out[a] = product_to_spectral(g, std::move(v), params.dealias_on).modes();
    }
    return VectorField3(ScalarField::spectral(g, std::move(out[0])),
                        ScalarField::spectral(g, std::move(out[1])),
                        ScalarField::spectral(g, std::move(out[2])));
}

ScalarField recover_pressure(const FlowState& state, const ModelParams& params) {
    params.validate();
    validate_state(state, params);
    const Grid& g = state.u.grid();
    const auto& eng = FftEngine::get(g);
    if (!params.nonlinear_enabled) return ScalarField::zeros(g, Basis::Spectral);
    ComplexArray nl[3];
    nonlinear_momentum(state, params, nl); // = -(u.grad u + div S)
    // lap(P) = -div(u.grad u + div S)  =>  P_hat = i k.N_hat / |k|^2
    ComplexArray p = (nl[0] * eng.dk(0).cast<Cplx>() + nl[1] * eng.dk(1).cast<Cplx>() +
                      nl[2] * eng.dk(2).cast<Cplx>()) *
                     (-kI);
    p *= eng.inv_k2z().cast<Cplx>();
    return ScalarField::spectral(g, std::move(p));
}

// ---------------------------------------------------------------------------
// Integrating-factor Heun core on the r2c half cube.
//
// Lawson form of Heun's method for y' = L y + N(y) with exact propagator
// E = exp(L dt):
//   k1 = N(y),  yp = E (y + dt k1),  k2 = N(yp),
//   y+ = E (y + dt/2 k1) + dt/2 k2.
// With N == 0 a step is exactly one multiplication by E.
//
// The momentum nonlinearity is assembled in divergence form,
// -d_j(u_j u_a + S_ja), which coincides with -u.grad u - div S for the
// divergence-free, dealiased fields the stepper maintains and costs six
// forward transforms instead of twelve.
// ---------------------------------------------------------------------------

namespace detail {

class StepperCore {
public:
    StepperCore(const Grid& grid, const ModelParams& params)
        : grid_(grid), p_(params), eng_(FftEngine::get(grid)) {
        const auto H = eng_.half_size();
        const double invn3 = 1.0 / static_cast<double>(grid.size());
        msc_ = p_.dealias_on ? RealArray(eng_.dealias_mask_h() * invn3)
                             : RealArray(RealArray::Constant(H, invn3));
        // first-derivative tables with the product mask and forward scale
        // folded in: one multiplication dealiases, normalizes and
        // differentiates the raw transform of a product
        for (int j = 0; j < 3; ++j) dkm_[j] = eng_.dk_h(j) * msc_;
        eu_ = (-p_.mu * p_.dt * eng_.k2_h()).exp();
        en_ = (-p_.dt * eng_.k2_h()).exp();
        const double vol = std::pow(grid.length(), 3);
        we_u_ = vol * eng_.weight_h() * (1.0 + eng_.k2_h());
        we_n_ = vol * eng_.weight_h() * (1.0 + eng_.k2_h() + eng_.k2_h().square());
        for (int a = 0; a < 3; ++a) {
            su_[a] = ComplexArray::Zero(H);
            sn_[a] = ComplexArray::Zero(H);
            k1u_[a] = ComplexArray::Zero(H);
            k1n_[a] = ComplexArray::Zero(H);
            k2u_[a] = ComplexArray::Zero(H);
            k2n_[a] = ComplexArray::Zero(H);
            pu_[a] = ComplexArray::Zero(H);
            pn_[a] = ComplexArray::Zero(H);
            ctmp3_[a] = ComplexArray::Zero(H);
            rtmp3_[a] = RealArray::Zero(grid.size());
        }
        q_ = RealArray::Zero(grid.size());
    }

    void load(const FlowState& s) {
        t0_ = s.t;
        steps_ = 0;
        for (int a = 0; a < 3; ++a) {
            su_[a] = eng_.fold(transform(s.u.comp(a), Basis::Spectral).modes());
            sn_[a] = eng_.fold(transform(s.n.comp(a), Basis::Spectral).modes());
        }
    }

    FlowState extract() const {
        auto mk = [&](const ComplexArray& h) {
            return ScalarField::spectral(grid_, eng_.unfold(h));
        };
        return FlowState{t(), VectorField3(mk(su_[0]), mk(su_[1]), mk(su_[2])),
                         VectorField3(mk(sn_[0]), mk(sn_[1]), mk(sn_[2]))};
    }

    double t() const { return t0_ + steps_ * p_.dt; }
    double last_constraint_dev() const { return constraint_dev_; }
    double last_cfl() const { return cfl_; }

    /// Invoked during stage 1 with the pre-step physical director samples.
    std::function<void(const RealArray*)> stage1_observer;

    void current_phys_n(RealArray out[3]) {
        for (int a = 0; a < 3; ++a) {
            ctmp_ = sn_[a];
            eng_.backward_c2r(ctmp_, out[a]);
        }
    }

    void advance(StepTraceRow* row) {
        // stage 1 reads the live state and must preserve it
        eval_rhs(su_, sn_, k1u_, k1n_, true, false);
        if (constraint_dev_ > p_.constraint_abort_tol)
            throw ConstraintAbort(t(), constraint_dev_, p_.constraint_abort_tol);
        cfl_ = p_.dt * max_u_ * grid_.n() / grid_.length();

        const double dt = p_.dt, half = 0.5 * p_.dt;
        const std::int64_t H = eng_.half_size();
        // the director RHS is carried unmasked; msc_ applies it here
        {
            const double* eu = eu_.data();
            const double* en = en_.data();
            const double* ms = msc_.data();
            for (int a = 0; a < 3; ++a) {
                const Cplx* su = su_[a].data();
                const Cplx* sn = sn_[a].data();
                const Cplx* k1u = k1u_[a].data();
                const Cplx* k1n = k1n_[a].data();
                Cplx* pu = pu_[a].data();
                Cplx* pn = pn_[a].data();
                for (std::int64_t i = 0; i < H; ++i) {
                    pu[i] = (su[i] + dt * k1u[i]) * eu[i];
                    pn[i] = (sn[i] + (dt * ms[i]) * k1n[i]) * en[i];
                }
            }
        }
        // stage 2 may clobber the predictor fields
        eval_rhs(pu_, pn_, k2u_, k2n_, false, true);
        {
            const double* eu = eu_.data();
            const double* en = en_.data();
            const double* ms = msc_.data();
            for (int a = 0; a < 3; ++a) {
                Cplx* su = su_[a].data();
                Cplx* sn = sn_[a].data();
                const Cplx* k1u = k1u_[a].data();
                const Cplx* k1n = k1n_[a].data();
                const Cplx* k2u = k2u_[a].data();
                const Cplx* k2n = k2n_[a].data();
                for (std::int64_t i = 0; i < H; ++i) {
                    su[i] = (su[i] + half * k1u[i]) * eu[i] + half * k2u[i];
                    sn[i] = (sn[i] + (half * ms[i]) * k1n[i]) * en[i] + (half * ms[i]) * k2n[i];
                }
            }
        }
        ++steps_;
        if (p_.renormalize_director == RenormalizePolicy::EveryStep) renormalize();

        if (row) {
            row->t = t();
            row->constraint_dev = constraint_dev_;
            row->cfl = cfl_;
            step_metrics(row->div_residual, row->energy_m1);
        }
    }

    /// One sweep for the post-step divergence residual and the m=1 energy.
    void step_metrics(double& div_rel, double& energy) const {
        const std::int64_t H = eng_.half_size();
        const double* z0 = eng_.dk_h(0).data();
        const double* z1 = eng_.dk_h(1).data();
        const double* z2 = eng_.dk_h(2).data();
        const double* k2z = eng_.k2z_h().data();
        const double* wu = we_u_.data();
        const double* wn = we_n_.data();
        const Cplx* u0 = su_[0].data();
        const Cplx* u1 = su_[1].data();
        const Cplx* u2 = su_[2].data();
        const Cplx* n0 = sn_[0].data();
        const Cplx* n1 = sn_[1].data();
        const Cplx* n2 = sn_[2].data();
        double resid2 = 0.0, scale2 = 0.0, e = 0.0;
        for (std::int64_t i = 0; i < H; ++i) {
            const double uu = std::norm(u0[i]) + std::norm(u1[i]) + std::norm(u2[i]);
            const Cplx div = z0[i] * u0[i] + z1[i] * u1[i] + z2[i] * u2[i];
            resid2 = std::max(resid2, std::norm(div));
            scale2 = std::max(scale2, k2z[i] * uu);
            e += wu[i] * uu + wn[i] * (std::norm(n0[i]) + std::norm(n1[i]) + std::norm(n2[i]));
        }
        div_rel = scale2 > 0.0 ? std::sqrt(resid2 / scale2) : 0.0;
        energy = e;
    }

    double energy_m1() const {
        double e = 0.0;
        e += (we_u_ * (su_[0].abs2() + su_[1].abs2() + su_[2].abs2())).sum();
        e += (we_n_ * (sn_[0].abs2() + sn_[1].abs2() + sn_[2].abs2())).sum();
        return e;
    }

private:
    // out_u arrives masked, scaled and projected; out_n arrives raw (the
    // caller folds msc_ into its uses).
    void eval_rhs(ComplexArray uin[3], ComplexArray nin[3], ComplexArray out_u[3],
                  ComplexArray out_n[3], bool stage1, bool may_destroy) {
        const std::int64_t H = eng_.half_size();
        const std::int64_t S = grid_.size();

        // d_j n_a in physical space: build the three derivative spectra of
        // each component in one read of nin[a]
        for (int a = 0; a < 3; ++a) {
            const Cplx* na = nin[a].data();
            Cplx* o0 = ctmp3_[0].data();
            Cplx* o1 = ctmp3_[1].data();
            Cplx* o2 = ctmp3_[2].data();
            const double* d0 = eng_.dk_h(0).data();
            const double* d1 = eng_.dk_h(1).data();
            const double* d2 = eng_.dk_h(2).data();
            for (std::int64_t i = 0; i < H; ++i) {
                const Cplx iv(-na[i].imag(), na[i].real()); // i * n
                o0[i] = d0[i] * iv;
                o1[i] = d1[i] * iv;
                o2[i] = d2[i] * iv;
            }
            for (int j = 0; j < 3; ++j) eng_.backward_c2r(ctmp3_[j], gn_[j][a]);
        }
        // physical u and n (stage 2 may consume its inputs)
        for (int a = 0; a < 3; ++a) {
            if (may_destroy) {
                eng_.backward_c2r(uin[a], phu_[a]);
                eng_.backward_c2r(nin[a], phn_[a]);
            } else {
                ctmp_ = uin[a];
                eng_.backward_c2r(ctmp_, phu_[a]);
                ctmp_ = nin[a];
                eng_.backward_c2r(ctmp_, phn_[a]);
            }
        }

        if (stage1) {
            constraint_dev_ = 0.0;
            max_u_ = 0.0;
        }
        if (!p_.nonlinear_enabled) {
            if (stage1) {
                monitor_sweep(S);
                if (stage1_observer) stage1_observer(phn_);
            }
            for (int a = 0; a < 3; ++a) {
                out_u[a] = ComplexArray::Zero(H);
                out_n[a] = ComplexArray::Zero(H);
            }
            return;
        }

        // Momentum flux tensor T_ja = u_j u_a + sum_c d_j n_c d_a n_c, six
        // entries in two sweeps (raw transforms; dkm_ folds in the mask and
        // 1/N^3 at the divergence stage). The diagonal sweep also yields
        // |grad n|^2 = trace(T) - |u|^2 for the director cubic.
        {
            double* r0 = rtmp3_[0].data();
            double* r1 = rtmp3_[1].data();
            double* r2 = rtmp3_[2].data();
            double* q = q_.data();
            const double wx = p_.w0.x(), wy = p_.w0.y(), wz = p_.w0.z();
            if (stage1) {
                // |sqrt(m) - 1| is monotone in m on either side of 1, so only
                // the extremes of |n + w0|^2 matter
                double mag2_lo = 1e300, mag2_hi = 0.0, umax2 = 0.0;
                for (std::int64_t i = 0; i < S; ++i) {
                    const double g00 = gn_[0][0][i], g01 = gn_[0][1][i], g02 = gn_[0][2][i];
                    const double g10 = gn_[1][0][i], g11 = gn_[1][1][i], g12 = gn_[1][2][i];
                    const double g20 = gn_[2][0][i], g21 = gn_[2][1][i], g22 = gn_[2][2][i];
                    const double u0 = phu_[0][i], u1 = phu_[1][i], u2 = phu_[2][i];
                    const double q0 = g00 * g00 + g01 * g01 + g02 * g02;
                    const double q1 = g10 * g10 + g11 * g11 + g12 * g12;
                    const double q2 = g20 * g20 + g21 * g21 + g22 * g22;
                    q[i] = q0 + q1 + q2;
                    r0[i] = u0 * u0 + q0;
                    r1[i] = u1 * u1 + q1;
                    r2[i] = u2 * u2 + q2;
                    const double dx = phn_[0][i] + wx, dy = phn_[1][i] + wy,
                                 dz = phn_[2][i] + wz;
                    const double m2 = dx * dx + dy * dy + dz * dz;
                    mag2_lo = std::min(mag2_lo, m2);
                    mag2_hi = std::max(mag2_hi, m2);
                    umax2 = std::max(umax2, u0 * u0 + u1 * u1 + u2 * u2);
                }
                constraint_dev_ = std::max(std::abs(std::sqrt(mag2_hi) - 1.0),
                                           std::abs(std::sqrt(mag2_lo) - 1.0));
                max_u_ = std::sqrt(umax2);
                if (stage1_observer) stage1_observer(phn_);
            } else {
                for (std::int64_t i = 0; i < S; ++i) {
                    const double g00 = gn_[0][0][i], g01 = gn_[0][1][i], g02 = gn_[0][2][i];
                    const double g10 = gn_[1][0][i], g11 = gn_[1][1][i], g12 = gn_[1][2][i];
                    const double g20 = gn_[2][0][i], g21 = gn_[2][1][i], g22 = gn_[2][2][i];
                    const double q0 = g00 * g00 + g01 * g01 + g02 * g02;
                    const double q1 = g10 * g10 + g11 * g11 + g12 * g12;
                    const double q2 = g20 * g20 + g21 * g21 + g22 * g22;
                    q[i] = q0 + q1 + q2;
                    r0[i] = phu_[0][i] * phu_[0][i] + q0;
                    r1[i] = phu_[1][i] * phu_[1][i] + q1;
                    r2[i] = phu_[2][i] * phu_[2][i] + q2;
                }
            }
            eng_.forward_r2c(rtmp3_[0], that_[tslot(0, 0)]);
            eng_.forward_r2c(rtmp3_[1], that_[tslot(1, 1)]);
            eng_.forward_r2c(rtmp3_[2], that_[tslot(2, 2)]);
        }
        // two-pass dealiasing: truncate |grad n|^2 before the cubic product
        if (p_.dealias_on) {
            eng_.forward_r2c(q_, qhat_);
            qhat_ *= msc_.cast<Cplx>();
            eng_.backward_c2r(qhat_, qd_);
        } else {
            qd_ = q_;
        }

        // director advection + cubic term, all three components in one sweep
        {
            const double wx = p_.w0.x(), wy = p_.w0.y(), wz = p_.w0.z();
            double* r0 = rtmp3_[0].data();
            double* r1 = rtmp3_[1].data();
            double* r2 = rtmp3_[2].data();
            for (std::int64_t i = 0; i < S; ++i) {
                const double u0 = phu_[0][i], u1 = phu_[1][i], u2 = phu_[2][i];
                const double qdi = qd_[i];
                r0[i] = -(u0 * gn_[0][0][i] + u1 * gn_[1][0][i] + u2 * gn_[2][0][i]) +
                        qdi * (phn_[0][i] + wx);
                r1[i] = -(u0 * gn_[0][1][i] + u1 * gn_[1][1][i] + u2 * gn_[2][1][i]) +
                        qdi * (phn_[1][i] + wy);
                r2[i] = -(u0 * gn_[0][2][i] + u1 * gn_[1][2][i] + u2 * gn_[2][2][i]) +
                        qdi * (phn_[2][i] + wz);
            }
            for (int a = 0; a < 3; ++a) eng_.forward_r2c(rtmp3_[a], out_n[a]);
        }

        // off-diagonal flux entries: T01, T02, T12
        {
            double* r0 = rtmp3_[0].data();
            double* r1 = rtmp3_[1].data();
            double* r2 = rtmp3_[2].data();
            for (std::int64_t i = 0; i < S; ++i) {
                const double g00 = gn_[0][0][i], g01 = gn_[0][1][i], g02 = gn_[0][2][i];
                const double g10 = gn_[1][0][i], g11 = gn_[1][1][i], g12 = gn_[1][2][i];
                const double g20 = gn_[2][0][i], g21 = gn_[2][1][i], g22 = gn_[2][2][i];
                r0[i] = phu_[0][i] * phu_[1][i] + g00 * g10 + g01 * g11 + g02 * g12;
                r1[i] = phu_[0][i] * phu_[2][i] + g00 * g20 + g01 * g21 + g02 * g22;
                r2[i] = phu_[1][i] * phu_[2][i] + g10 * g20 + g11 * g21 + g12 * g22;
            }
            eng_.forward_r2c(rtmp3_[0], that_[tslot(0, 1)]);
            eng_.forward_r2c(rtmp3_[1], that_[tslot(0, 2)]);
            eng_.forward_r2c(rtmp3_[2], that_[tslot(1, 2)]);
        }

        // -div T and Leray projection in one fused sweep per mode
        {
            const double* d0 = dkm_[0].data();
            const double* d1 = dkm_[1].data();
            const double* d2 = dkm_[2].data();
            const double* z0 = eng_.dk_h(0).data();
            const double* z1 = eng_.dk_h(1).data();
            const double* z2 = eng_.dk_h(2).data();
            const double* iv = eng_.inv_k2z_h().data();
            const Cplx* t00 = that_[tslot(0, 0)].data();
            const Cplx* t11 = that_[tslot(1, 1)].data();
            const Cplx* t22 = that_[tslot(2, 2)].data();
            const Cplx* t01 = that_[tslot(0, 1)].data();
            const Cplx* t02 = that_[tslot(0, 2)].data();
            const Cplx* t12 = that_[tslot(1, 2)].data();
            Cplx* o0 = out_u[0].data();
            Cplx* o1 = out_u[1].data();
            Cplx* o2 = out_u[2].data();
            for (std::int64_t i = 0; i < H; ++i) {
                // w_a = -i sum_j dkm_j T_ja
                const Cplx s0 = d0[i] * t00[i] + d1[i] * t01[i] + d2[i] * t02[i];
                const Cplx s1 = d0[i] * t01[i] + d1[i] * t11[i] + d2[i] * t12[i];
                const Cplx s2 = d0[i] * t02[i] + d1[i] * t12[i] + d2[i] * t22[i];
                Cplx w0c(s0.imag(), -s0.real());
                Cplx w1c(s1.imag(), -s1.real());
                Cplx w2c(s2.imag(), -s2.real());
                const Cplx div = (z0[i] * w0c + z1[i] * w1c + z2[i] * w2c) * iv[i];
                o0[i] = w0c - z0[i] * div;
                o1[i] = w1c - z1[i] * div;
                o2[i] = w2c - z2[i] * div;
            }
        }
    }

    void monitor_sweep(std::int64_t S) {
        const double wx = p_.w0.x(), wy = p_.w0.y(), wz = p_.w0.z();
        double mag2_lo = 1e300, mag2_hi = 0.0, umax2 = 0.0;
        for (std::int64_t i = 0; i < S; ++i) {
            const double dx = phn_[0][i] + wx, dy = phn_[1][i] + wy, dz = phn_[2][i] + wz;
            const double m2 = dx * dx + dy * dy + dz * dz;
            mag2_lo = std::min(mag2_lo, m2);
            mag2_hi = std::max(mag2_hi, m2);
            const double u2 = phu_[0][i] * phu_[0][i] + phu_[1][i] * phu_[1][i] +
                              phu_[2][i] * phu_[2][i];
            umax2 = std::max(umax2, u2);
        }
        constraint_dev_ = std::max(std::abs(std::sqrt(mag2_hi) - 1.0),
                                   std::abs(std::sqrt(mag2_lo) - 1.0));
        max_u_ = std::sqrt(umax2);
    }

    static int tslot(int j, int a) {
        if (j > a) std::swap(j, a);
        if (j == a) return j;
        return 2 + j + a; // (0,1)->3, (0,2)->4, (1,2)->5
    }

    void renormalize() {
        const double invn3 = 1.0 / static_cast<double>(grid_.size());
        for (int a = 0; a < 3; ++a) {
            ctmp_ = sn_[a];
            eng_.backward_c2r(ctmp_, phn_[a]);
        }
        rtmp_ = ((phn_[0] + p_.w0.x()).square() + (phn_[1] + p_.w0.y()).square() +
                 (phn_[2] + p_.w0.z()).square())
                    .sqrt();
        for (int a = 0; a < 3; ++a) {
            q_ = (phn_[a] + p_.w0[a]) / rtmp_ - p_.w0[a];
            eng_.forward_r2c(q_, sn_[a]);
            sn_[a] *= invn3;
        }
    }

    Grid grid_;
    ModelParams p_;
    const FftEngine& eng_;
    double t0_ = 0.0;
    long steps_ = 0;
    double constraint_dev_ = 0.0, max_u_ = 0.0, cfl_ = 0.0;

    ComplexArray su_[3], sn_[3];
    ComplexArray k1u_[3], k1n_[3], k2u_[3], k2n_[3], pu_[3], pn_[3];
    ComplexArray that_[6], qhat_, ctmp_;
    ComplexArray ctmp3_[3];
    RealArray phu_[3], phn_[3], gn_[3][3], q_, qd_, rtmp_;
    RealArray rtmp3_[3];
    RealArray msc_, eu_, en_, we_u_, we_n_;
    RealArray dkm_[3];
};

} // namespace detail

FlowState step(const FlowState& state, const ModelParams& params) {
    params.validate();
    if (!(state.u.grid() == state.n.grid()))
        throw std::invalid_argument("step: u and n live on different grids");
    detail::StepperCore core(state.u.grid(), params);
    core.load(state);
    StepTraceRow row;
    core.advance(&row);
    if (row.cfl > 0.5)
        std::cerr << "[nlc] CFL advisory: dt*max|u|*N/L = " << row.cfl << " > 0.5 at t=" << state.t
                  << "\n";
    return core.extract();
}

namespace {

struct LpMonitor {
    double p = 2.0;
    double cp = 1.0;
    bool have_prev = false;
    double prev_integral = 0.0, prev_dirichlet = 0.0;
    LpMonitorResult result;

    void feed(double integral, double dirichlet, double dt) {
        if (have_prev) {
            const double slack = (integral - prev_integral) / dt + cp * prev_dirichlet;
            const double tol = 1e-6 * prev_integral / dt;
            result.worst_excess = std::max(result.worst_excess, slack - tol);
            ++result.checked;
        }
        prev_integral = integral;
        prev_dirichlet = dirichlet;
        have_prev = true;
    }
};

void lp_quantities(const Grid& grid, const RealArray phys_n[3], double p, double& integral,
                   double& dirichlet) {
    RealArray mag2 = phys_n[0].square() + phys_n[1].square() + phys_n[2].square();
    RealArray g = p == 2.0 ? RealArray(mag2.sqrt())
                           : (p == 4.0 ? mag2 : RealArray(mag2.pow(0.25 * p)));
    integral = grid.cell_volume() * (p == 2.0 ? mag2.sum() : mag2.pow(0.5 * p).sum());
    dirichlet = grad_sq_integral_fd4(g, grid);
}

} // namespace

RunResult run(const FlowState& init, const ModelParams& params, const RunOptions& opt) {
    params.validate();
    if (!(opt.cadence > 0.0)) throw std::invalid_argument("run: cadence must be > 0");
    if (opt.k_max < 1) throw std::invalid_argument("run: k_max must be >= 1");
    const Grid grid = init.u.grid();

    auto warn = [&](const std::string& msg) {
        if (opt.warn)
            opt.warn(msg);
        else
            std::cerr << "[nlc] " << msg << "\n";
    };

    RunResult res{FlowState{init.t, transform(init.u, Basis::Spectral),
                            transform(init.n, Basis::Spectral)},
                  NormSeries{opt.k_max, opt.p_list, {}}};

    auto sm = smallness_check(init.u, init.n, opt.delta0);
    res.smallness_pass = sm.pass;
    res.smallness_value = sm.value;
    if (!sm.pass)
        warn("smallness hypothesis not met: ||u0||_H1^2+||n0||_H2^2 = " +
             std::to_string(sm.value) + " > delta0 = " + std::to_string(opt.delta0) +
             " (the solver proceeds; theory does not apply)");

    if (params.t_end <= init.t + 0.25 * params.dt) return res;

    const bool emit = !opt.out_dir.empty();
    if (emit) std::filesystem::create_directories(opt.out_dir);

    detail::StepperCore core(grid, params);
    core.load(res.final_state);

    std::vector<LpMonitor> monitors;
    for (double p : opt.lp_check_ps) {
        LpMonitor m;
        m.p = p;
        m.cp = 4.0 * (p - 1.5) / p;
        m.result.p = p;
        monitors.push_back(std::move(m));
    }
    if (!monitors.empty()) {
        core.stage1_observer = [&](const RealArray* phys_n) {
            for (auto& m : monitors) {
                double integral, dirichlet;
                lp_quantities(grid, phys_n, m.p, integral, dirichlet);
                m.feed(integral, dirichlet, params.dt);
            }
        };
    }

    auto do_record = [&](const FlowState& st) {
        res.series.append(record(st, params, opt.k_max, opt.p_list));
    };

    auto flush_outputs = [&](const FlowState& last) {
        if (!emit) return;
        if (opt.record_series && !res.series.rows.empty())
            write_series(res.series, opt.out_dir + "/series.csv");
        write_snapshot(last, opt.out_dir + "/final.nlcf");
    };

    double prev_energy = core.energy_m1();
    std::size_t record_idx = 0, snap_idx = 0;
    bool cfl_warned = false;

    try {
        if (opt.record_series) do_record(core.extract());
        if (emit) write_snapshot(core.extract(), opt.out_dir + "/initial.nlcf");

        while (core.t() < params.t_end - 0.5 * params.dt) {
            StepTraceRow row;
            core.advance(opt.track_trace ? &row : nullptr);
            ++res.steps;

            if (!opt.track_trace) {
                row.t = core.t();
                row.constraint_dev = core.last_constraint_dev();
                row.cfl = core.last_cfl();
            }
            res.max_div_residual = std::max(res.max_div_residual, row.div_residual);
            res.max_constraint_dev = std::max(res.max_constraint_dev, row.constraint_dev);
            res.max_cfl = std::max(res.max_cfl, row.cfl);
            if (row.cfl > 0.5 && !cfl_warned) {
                cfl_warned = true;
                warn("CFL advisory: dt*max|u|*N/L = " + std::to_string(row.cfl) +
                     " > 0.5 at t = " + std::to_string(core.t()));
            }
            if (opt.track_trace) {
                if (prev_energy > 0.0)
                    res.worst_energy_increase_rel =
                        std::max(res.worst_energy_increase_rel,
                                 (row.energy_m1 - prev_energy) / prev_energy);
                prev_energy = row.energy_m1;
                res.trace.push_back(row);
            }

            const double next_record = init.t + (record_idx + 1) * opt.cadence;
            if (opt.record_series && core.t() >= next_record - 1e-9 * opt.cadence) {
                ++record_idx;
                do_record(core.extract());
            }
            if (emit && opt.snapshot_interval > 0.0 &&
                core.t() >= init.t + (snap_idx + 1) * opt.snapshot_interval -
                                1e-9 * opt.snapshot_interval) {
                ++snap_idx;
                char name[64];
                std::snprintf(name, sizeof(name), "/snapshot_%05zu.nlcf", snap_idx);
                write_snapshot(core.extract(), opt.out_dir + name);
            }
        }
    } catch (const ConstraintAbort&) {
        flush_outputs(core.extract());
        throw;
    }

    // close the Lp monitors with the final state
    if (!monitors.empty()) {
        RealArray fin[3];
        core.current_phys_n(fin);
        for (auto& m : monitors) {
            double integral, dirichlet;
            lp_quantities(grid, fin, m.p, integral, dirichlet);
            m.feed(integral, dirichlet, params.dt);
        }
    }
    for (auto& m : monitors) res.lp_monitors.push_back(m.result);

    res.final_state = core.extract();
    if (opt.record_series &&
        (res.series.rows.empty() || res.series.rows.back().t < core.t() - 1e-9))
        do_record(res.final_state);
    flush_outputs(res.final_state);
    return res;
}

} // namespace nlc
