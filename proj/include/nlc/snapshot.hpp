#pragma once

#include <string>

#include "nlc/model.hpp"

namespace nlc {

/// NLCF binary snapshot, bit-exact and little-endian:
///   magic "NLCF" | u32 version=1 | u32 N | f64 L | f64 t |
///   six N^3 f64 arrays (u1,u2,u3,n1,n2,n3), x-fastest.
void write_snapshot(const FlowState& state, const std::string& path);
FlowState read_snapshot(const std::string& path);

} // namespace nlc
