#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nlc/field.hpp"
#include "nlc/grid.hpp"
#include "nlc/series.hpp"

namespace nlc {

enum class RenormalizePolicy { Off, EveryStep };

struct ModelParams {
    double mu = 1.0;                     // shear viscosity
    Eigen::Vector3d w0{0.0, 0.0, 1.0};   // far-field director, |w0| = 1
    double dt = 1e-3;
    double t_end = 1.0;
    bool dealias_on = true;
    RenormalizePolicy renormalize_director = RenormalizePolicy::Off;
    double constraint_abort_tol = 1e-2;
    bool nonlinear_enabled = true;       // test hook: heat-only dynamics when false

    void validate() const;
};

/// Velocity u and director deviation n = d - w0 at time t. The dynamics
/// preserve div u = 0 spectrally and the mean of u exactly; |n + w0| = 1
/// is monitored, not enforced (see ModelParams::renormalize_director).
struct FlowState {
    double t = 0.0;
    VectorField3 u;
    VectorField3 n;
};

/// 3x3 symmetric tensor with scalar-field entries (i, j in 1..3).
class SymTensorField {
public:
    SymTensorField(const Grid& grid, Basis basis);
    const ScalarField& entry(int i, int j) const { return e_[slot(i, j)]; }
    ScalarField& entry(int i, int j) { return e_[slot(i, j)]; }

private:
    static int slot(int i, int j);
    std::array<ScalarField, 6> e_;
};

/// Elastic stress del n (.) del n: entry (i,j) = sum_a d_i n_a * d_j n_a.
/// Entries are returned in spectral basis, dealiased when params say so.
SymTensorField elastic_stress(const VectorField3& n, const ModelParams& params);

/// Nonlinear momentum right-hand side, diffusion excluded:
/// leray_project(-u.grad u - div(elastic_stress)). Divergence-free output.
VectorField3 rhs_u(const FlowState& state, const ModelParams& params);

/// Nonlinear director right-hand side, diffusion excluded:
/// -u.grad n + |grad n|^2 (n + w0).
VectorField3 rhs_n(const FlowState& state, const ModelParams& params);

/// Pressure from the spectral Poisson solve
///   P_hat = i (k . N_hat) / |k|^2,  N = u.grad u + div(del n (.) del n),
/// zero mean. grad P equals the non-solenoidal part removed in rhs_u.
ScalarField recover_pressure(const FlowState& state, const ModelParams& params);

/// One integrating-factor Heun step: diffusion applied exactly through
/// exp(-mu |k|^2 dt) / exp(-|k|^2 dt), nonlinear terms second order.
FlowState step(const FlowState& state, const ModelParams& params);

/// Per-step monitor sample (times refer to the state after the step except
/// where noted).
struct StepTraceRow {
    double t = 0.0;
    double energy_m1 = 0.0;      // ||u||_H1^2 + ||n||_H2^2 after the step
    double div_residual = 0.0;   // relative spectral divergence after the step
    double constraint_dev = 0.0; // max||n+w0|-1| of the pre-step state
    double cfl = 0.0;            // dt * max|u| * N / L of the pre-step state
};

struct RunOptions {
    double cadence = 0.25;
    int k_max = 2;
    std::vector<double> p_list{1.0, 2.0, 4.0};
    std::vector<double> lp_check_ps{};   // per-step Lp dissipation monitor
    double delta0 = 1e-2;                // smallness budget (advisory at run start)
    std::string out_dir{};               // when set, series + snapshots are written
    double snapshot_interval = 0.0;      // extra snapshots every so often; 0 = final only
    bool record_series = true;
    bool track_trace = true;
    std::function<void(const std::string&)> warn{};
};

struct LpMonitorResult {
    double p = 0.0;
    double worst_excess = -1e300; // max over steps of (slack - tol); pass iff <= 0
    std::size_t checked = 0;
};

struct RunResult {
    FlowState final_state;
    NormSeries series;
    std::vector<StepTraceRow> trace;
    bool smallness_pass = false;
    double smallness_value = 0.0;
    double max_div_residual = 0.0;
    double max_constraint_dev = 0.0;
    double worst_energy_increase_rel = 0.0; // max over steps of (E_j+1 - E_j)/E_j
    double max_cfl = 0.0;
    std::vector<LpMonitorResult> lp_monitors;
    std::size_t steps = 0;
};

/// Advance to params.t_end, recording diagnostics every opt.cadence and
/// emitting series/snapshots when opt.out_dir is set. Partial outputs are
/// flushed before a constraint abort propagates.
RunResult run(const FlowState& init, const ModelParams& params, const RunOptions& opt);

} // namespace nlc
