#pragma once

#include <string>
#include <vector>

#include "nlc/grid.hpp"
#include "nlc/initial_data.hpp"
#include "nlc/model.hpp"

namespace nlc {

struct DiagnosticsConfig {
    int k_max = 2;
    std::vector<double> p_list{1.0, 2.0, 4.0};
    double cadence = 0.25;
    double fit_t0 = 5.0;
    double fit_t1 = 100.0;
};

/// Parsed run configuration. The line format is
///   [section]
///   key = value          # comment
/// with sections grid/model/init/diagnostics/output, values typed as
/// integer, real, boolean, 3-vector "(a, b, c)", list "{a, b, c}" or bare
/// token. Unknown sections/keys and duplicate keys are errors.
struct RunConfig {
    int n = 64;
    double box_length = 32.0 * M_PI;
    ModelParams model;
    InitSpec init;
    DiagnosticsConfig diag;
    std::string output_dir = "out";

    Grid make_grid() const { return Grid(n, box_length); }
};

RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Canonical text form; parse(serialize(c)) reproduces c exactly and
/// serialize(parse(s)) is byte-identical for canonical inputs.
std::string serialize_config(const RunConfig& config);

} // namespace nlc
