// fit.hpp: Ordinary least-squares line fits

#pragma once

#include <span>

namespace qratchet {

struct LineFit {
    double slope{0.0};
    double intercept{0.0};
    // Coefficient of determination in [0, 1]; 0 when y has no variance.
    double r_squared{0.0};
};

// Throws InvalidArgument for fewer than two points or mismatched lengths.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace qratchet
