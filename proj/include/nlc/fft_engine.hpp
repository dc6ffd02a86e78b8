#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Core>

#include "nlc/field.hpp"
#include "nlc/grid.hpp"

namespace nlc {

/// Cached FFTW plans plus precomputed wavenumber tables for one grid size.
///
/// Two layouts are served:
///   - the full N^3 complex cube backing ScalarField's spectral basis, and
///   - the r2c half cube (N*N*(N/2+1), x index 0..N/2) used by the stepper.
///
/// First-derivative tables (dkx/dky/dkz) carry a zero in the Nyquist row of
/// their axis; odd-order mode multiplication with the asymmetric m = -N/2
/// wavenumber would break Hermitian symmetry. Leray projection and the
/// pressure Poisson solve divide by k2z = dkx^2+dky^2+dkz^2 so that
/// grad(recover_pressure) reproduces exactly the non-solenoidal part removed
/// by leray_project. Even-order operators (diffusion factors, |k|^s,
/// Sobolev weights) use the true k2 including Nyquist.
class FftEngine {
public:
    static const FftEngine& get(const Grid& grid);

    int n() const { return n_; }
    std::int64_t size() const { return size_; }
    std::int64_t half_size() const { return half_size_; }

    // Unnormalized transforms; callers apply the 1/N^3 forward scale.
    void forward_c2c(const ComplexArray& in, ComplexArray& out) const;
    void backward_c2c(const ComplexArray& in, ComplexArray& out) const;
    void forward_r2c(const RealArray& in, ComplexArray& half_out) const;
    /// Consumes (clobbers) the spectral input, as FFTW's multi-d c2r does.
    void backward_c2r(ComplexArray& half_in, RealArray& out) const;

    // Full-cube tables.
    const RealArray& k2() const { return k2_; }
    const RealArray& kmag() const { return kmag_; }
    const RealArray& dk(int axis) const { return dk_[axis]; }
    const RealArray& kabs(int axis) const { return kabs_[axis]; }
    const RealArray& k2z() const { return k2z_; }
    const RealArray& inv_k2z() const { return inv_k2z_; }
    const RealArray& dealias_mask() const { return mask_; }

    // Half-cube tables.
    const RealArray& k2_h() const { return k2_h_; }
    const RealArray& dk_h(int axis) const { return dk_h_[axis]; }
    const RealArray& k2z_h() const { return k2z_h_; }
    const RealArray& inv_k2z_h() const { return inv_k2z_h_; }
    const RealArray& dealias_mask_h() const { return mask_h_; }
    /// Hermitian multiplicity: 2 except on the self-conjugate planes ix=0, N/2.
    const RealArray& weight_h() const { return weight_h_; }

    std::int64_t half_index(int ix, int iy, int iz) const {
        return ix + static_cast<std::int64_t>(n_ / 2 + 1) *
                        (iy + static_cast<std::int64_t>(n_) * iz);
    }

    /// Copy the stored half of a Hermitian full cube.
    ComplexArray fold(const ComplexArray& full) const;
    /// Reconstruct the full cube from the half via c(-m) = conj(c(m)).
    ComplexArray unfold(const ComplexArray& half) const;

    ~FftEngine();
    FftEngine(const FftEngine&) = delete;
    FftEngine& operator=(const FftEngine&) = delete;

private:
    explicit FftEngine(const Grid& grid);

    int n_;
    std::int64_t size_;
    std::int64_t half_size_;

    void* plan_c2c_fwd_ = nullptr;
    void* plan_c2c_bwd_ = nullptr;
    void* plan_r2c_ = nullptr;
    void* plan_c2r_ = nullptr;

    RealArray k2_, kmag_, k2z_, inv_k2z_, mask_;
    RealArray dk_[3], kabs_[3];
    RealArray k2_h_, k2z_h_, inv_k2z_h_, mask_h_, weight_h_;
    RealArray dk_h_[3];
};

} // namespace nlc
