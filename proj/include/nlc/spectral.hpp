#pragma once

#include <complex>

#include "nlc/field.hpp"

namespace nlc {

/// Change of basis. Round trip reproduces the input to ~1e-15 relative;
/// Parseval ties (L/N)^3*sum|f|^2 to L^3*sum|c|^2. Non-finite data is
/// rejected with DataError.
ScalarField transform(const ScalarField& f, Basis target);
VectorField3 transform(const VectorField3& v, Basis target);

/// Fractional derivative Lambda^s: every mode scaled by |k|^s. The mean mode
/// is annihilated for s > 0; s = 0 is the identity. s < 0 is rejected.
ScalarField lambda_power(const ScalarField& f, double s);

/// Spectral partial derivative of given order along axis 1..3. Modes are
/// multiplied by (i*k_axis)^order; the Nyquist row is zeroed for odd orders.
ScalarField partial_derivative(const ScalarField& f, int axis, int order = 1);

/// Mode-wise projection onto divergence-free fields, I - k k^T/|k|^2.
/// The zero mode passes through unchanged.
VectorField3 leray_project(const VectorField3& v);

/// 2/3-rule truncation: zero all modes with any |m| > floor(N/3).
/// Input must already be spectral.
ScalarField dealias(const ScalarField& f);
VectorField3 dealias(const VectorField3& v);

/// ||Lambda^k f||_{L2} evaluated by Parseval; k >= 0 real.
double sobolev_seminorm(const ScalarField& f, double k);
double sobolev_seminorm(const VectorField3& v, double k);

/// L^p norm by physical quadrature, (L/N)^3 * sum |f|^p then p-th root.
/// Vector fields use the pointwise Euclidean magnitude. p >= 1.
double lp_norm(const ScalarField& f, double p);
double lp_norm(const VectorField3& v, double p);

/// Full H^s norm squared: sum of squared integer seminorms 0..s.
double h_norm_sq(const ScalarField& f, int s);
double h_norm_sq(const VectorField3& v, int s);

/// Worst deviation from c(-m) = conj(c(m)), relative to the largest |c|.
double hermitian_asymmetry(const ScalarField& f);

/// max_m |k . v(m)| over modes (Nyquist rows excluded, matching the
/// first-derivative convention).
double divergence_residual(const VectorField3& v);
/// Same, normalized by max_m |k| |v(m)|.
double divergence_residual_rel(const VectorField3& v);

std::complex<double> mean_mode(const ScalarField& f);
ScalarField remove_mean(const ScalarField& f);
VectorField3 remove_mean(const VectorField3& v);

} // namespace nlc
