#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace nlc {

/// One diagnostics record at time t. All entries are norms (not squared).
struct SeriesRow {
    double t = 0.0;
    std::vector<double> u_norms;     // ||del^k u||_L2, k = 0..k_max
    std::vector<double> n_norms;     // ||del^m n||_L2, m = 0..k_max+1
    std::vector<double> n_lp;        // ||n||_Lp per p_list
    std::vector<double> nt_norms;    // ||del^k n_t||_L2, k = 0..k_max-1
    std::vector<double> ut_norms;    // ||del^k u_t||_L2, k = 0..k_max-1
    std::vector<double> gradp_norms; // ||del^{k+1} P||_L2, k = 0..k_max-1
    double cum_dissipation = 0.0;    // int_0^t ||del n||^2 dtau, trapezoid
};

/// Time-indexed table of every monitored norm.
struct NormSeries {
    int k_max = 2;
    std::vector<double> p_list{1.0, 2.0, 4.0};
    std::vector<SeriesRow> rows;

    /// Appends a row, accumulating the dissipation integral by trapezoid
    /// over record times. Rows must arrive with strictly increasing t.
    void append(SeriesRow row);

    std::size_t column_count() const;
    std::vector<std::string> column_names() const;
    /// Column by CSV name ("t", "norm_u_k0", "lp_n_p2", ...).
    std::vector<double> column(const std::string& name) const;
};

/// Power-law fit of one monitored quantity against (1+t).
struct DecayFit {
    std::string quantity;
    double t0 = 0.0, t1 = 0.0;
    double slope = 0.0;     // d log(value^2) / d log(1+t)
    double exponent = 0.0;  // slope/2: the norm-level exponent
    double intercept = 0.0; // in log(value^2) space
    double r2 = 0.0;
    int points = 0;
};

/// One evaluation of the Fourier-splitting inequality
///   ||del^{j+1} f||^2 >= R/(1+t) ||del^j f||^2 - R^2/(1+t)^2 ||del^{j-1} f||^2.
struct ShellReport {
    int j = 1;
    double R = 0.0, t = 0.0;
    double lhs = 0.0, rhs = 0.0, slack = 0.0;
    bool pass = false;
};

/// Outcome of one inequality check.
struct CheckReport {
    std::string name;
    bool pass = false;
    double worst_slack = 0.0; // signed; positive means violation by that much
    double tol = 0.0;
    std::size_t checked = 0;
    std::string detail;
};

} // namespace nlc
