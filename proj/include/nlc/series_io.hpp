#pragma once

#include <string>

#include "nlc/series.hpp"

namespace nlc {

/// CSV with one named column per monitored norm; reals as shortest
/// round-trip decimals, so read(write(s)) is exact.
void write_series(const NormSeries& series, const std::string& path);
NormSeries read_series(const std::string& path);

std::string format_double(double v);
double parse_double(const std::string& s); // throws DataError on garbage

} // namespace nlc
