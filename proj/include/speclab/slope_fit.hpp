#pragma once
// Power-law slope estimation by least squares in log-log coordinates.
//
// Given samples (x_i, y_i) with x_i, y_i > 0, fits  log2 y = slope·log2 x + c
// and reports the slope, intercept, and the maximum absolute residual in
// log2 units (a residual of r means the sample is off the fitted power law
// by a factor 2^r).

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace speclab {

struct power_law_fit {
    double slope = 0.0;
    double intercept = 0.0;       // log2 of the prefactor
    double max_residual = 0.0;    // max |log2 y - (slope·log2 x + intercept)|
    std::size_t n_samples = 0;
};

inline power_law_fit fit_power_law(const std::vector<double>& xs,
                                   const std::vector<double>& ys) {
    if (xs.size() != ys.size())
        throw std::invalid_argument("fit_power_law: size mismatch");
    if (xs.size() < 2)
        throw std::invalid_argument("fit_power_law: need at least two samples");

    const std::size_t n = xs.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw std::domain_error("fit_power_law: samples must be positive");
        lx[i] = std::log2(xs[i]);
        ly[i] = std::log2(ys[i]);
    }

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) { mx += lx[i]; my += ly[i]; }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0)
        throw std::domain_error("fit_power_law: all x values identical");

    power_law_fit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.n_samples = n;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::abs(ly[i] - (fit.slope * lx[i] + fit.intercept));
        fit.max_residual = std::max(fit.max_residual, r);
    }
    return fit;
}

}  // namespace speclab
