#pragma once

#include <string>
#include <vector>

#include "nlc/field.hpp"
#include "nlc/model.hpp"
#include "nlc/series.hpp"

namespace nlc {

/// Compute one series row at the state's time. Time derivatives are taken
/// from the equations themselves: n_t = lap(n) + rhs_n and
/// u_t = lap(u) - grad(P) - u.grad(u) - div(del n (.) del n).
SeriesRow record(const FlowState& state, const ModelParams& params, int k_max,
                 const std::vector<double>& p_list);

enum class EnergyMode { L2Director, LevelK, FullHm };

/// Verifies E(t_{j+1}) <= E(t_j) (1 + 1e-8) over consecutive rows, where E is
///   L2Director: ||n||^2,  LevelK: ||del^k u||^2 + ||del^{k+1} n||^2,
///   FullHm:     ||u||_Hm^2 + ||n||_H{m+1}^2.
CheckReport check_energy_dissipation(const NormSeries& series, EnergyMode mode, int level = 0);

/// One-step Lp dissipation: (I_p(t+dt) - I_p(t))/dt + C_p D_p(t) <= tol with
/// C_p = 4(p - 3/2)/p, D_p the FD4 Dirichlet integral of |n|^{p/2}, and
/// tol = 1e-6 I_p(t)/dt. p >= 2.
CheckReport check_lp_dissipation(const FlowState& before, const FlowState& after, double p);

/// ||n(t)||_L1 <= ||n0||_L1 + int_0^t ||del n||^2 dtau + 1e-6 ||n0||_L1,
/// row by row, using the series' cumulative dissipation column.
CheckReport check_l1_bound(const NormSeries& series);

/// Fourier-splitting inequality at level j, splitting radius (R/(1+t))^{1/2}.
ShellReport check_shell_split(const ScalarField& f, int j, double R, double t);
ShellReport check_shell_split(const VectorField3& f, int j, double R, double t);

/// ||Lambda^s f|| <= ||f||^{1-s/l} ||Lambda^l f||^{s/l} with constant 1,
/// for mean-free f and 0 <= s <= l.
CheckReport check_interpolation(const ScalarField& f, double s, double l);
CheckReport check_interpolation(const VectorField3& f, double s, double l);

/// Least-squares slope of log(value^2) against log(1+t) over rows with
/// t in [t0, t1]. Requires >= 10 rows and positive values in the window.
DecayFit fit_decay(const NormSeries& series, const std::string& quantity, double t0, double t1);
DecayFit fit_decay_samples(const std::vector<double>& t, const std::vector<double>& value,
                           const std::string& quantity, double t0, double t1);

/// int |grad g|^2 dx with the gradient by 4th-order centered differences on
/// the periodic grid (for quantities like |n|^{p/2} that are not band-limited).
double grad_sq_integral_fd4(const RealArray& g, const Grid& grid);

} // namespace nlc
