#include "nlc/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nlc {

Grid::Grid(int n, double length) : n_(n), length_(length) {
    if (n < 8 || n % 2 != 0)
        throw std::invalid_argument("Grid: N must be even and >= 8, got " + std::to_string(n));
    if (!(length > 0.0) || !std::isfinite(length))
        throw std::invalid_argument("Grid: L must be positive and finite");
}

double Grid::dk() const { return 2.0 * M_PI / length_; }

} // namespace nlc
