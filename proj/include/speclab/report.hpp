#pragma once
// Probe reports: per-scale ratio summaries with an optional power-law fit.
//
// Every empirical probe (convolution estimates, dyadic bilinear cases,
// indicator-support experiments) reduces to the same artifact: a list of
// scale values, the max and median LHS/RHS ratio observed at each scale, and
// a log₂–log₂ least-squares fit when at least three scales are present.
// Boundedness is summarized as the growth factor of the max ratio relative
// to the first scale; probes assert growth ≤ 2 rather than estimating true
// operator norms (random trial data only certifies lower bounds).
//
// Serialization: CSV with columns scale,max_ratio,median_ratio,samples and a
// JSON object carrying the seed, grid metadata, fit, and notes.  Both are
// deterministic for identical inputs (no timestamps, fixed key order).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "slope_fit.hpp"

namespace speclab {

struct ProbeReport {
    std::vector<double> scales;         // j or N values, ascending
    std::vector<double> max_ratios;     // per-scale max over samples
    std::vector<double> median_ratios;  // per-scale median over samples
    std::vector<std::size_t> samples_per_scale;  // sample count at each scale
    std::uint64_t seed = 0;

    bool has_fit = false;   // requires ≥ 3 scales with positive ratios
    power_law_fit fit{};    // log₂ max_ratio vs log₂ scale

    // Documented target slope for experiments that have one (NaN otherwise).
    double reference_slope = std::numeric_limits<double>::quiet_NaN();

    double growth_factor = 1.0;      // max over scales of ratio_i / ratio_0
    bool max_ratio_bounded = true;   // growth_factor ≤ 2

    std::string grid_note;  // grid/geometry metadata, e.g. "n=256 m=256 dxi=0.5"
    std::string notes;      // analogue mappings, interpretation flags
};

inline double median_of(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median_of: empty sample set");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Assemble a report from per-scale ratio samples, validating finiteness and
// computing the fit (when ≥ 3 scales and all ratios positive) and the
// growth factor relative to the first scale.
inline ProbeReport finalize_report(std::vector<double> scales,
                                   const std::vector<std::vector<double>>& ratio_samples,
                                   std::uint64_t seed) {
    if (scales.size() != ratio_samples.size())
        throw std::invalid_argument("finalize_report: scale/sample count mismatch");
    if (scales.empty()) throw std::invalid_argument("finalize_report: no scales");

    ProbeReport r;
    r.scales = std::move(scales);
    r.seed = seed;
    for (const auto& samples : ratio_samples) {
        if (samples.empty())
            throw std::invalid_argument("finalize_report: empty sample set at a scale");
        r.samples_per_scale.push_back(samples.size());
        double mx = 0.0;
        for (double x : samples) {
            if (!(x >= 0.0) || !std::isfinite(x))
                throw std::domain_error(
                    "finalize_report: ratios must be nonnegative and finite");
            mx = std::max(mx, x);
        }
        r.max_ratios.push_back(mx);
        r.median_ratios.push_back(median_of(samples));
    }

    const double first = r.max_ratios.front();
    r.growth_factor = 1.0;
    for (double m : r.max_ratios) {
        if (first > 0.0)
            r.growth_factor = std::max(r.growth_factor, m / first);
        else if (m > 0.0)
            r.growth_factor = std::numeric_limits<double>::infinity();
    }
    r.max_ratio_bounded = r.growth_factor <= 2.0;

    bool fittable = r.scales.size() >= 3;
    for (std::size_t i = 0; i < r.scales.size() && fittable; ++i)
        fittable = r.scales[i] > 0.0 && r.max_ratios[i] > 0.0;
    if (fittable) {
        r.fit = fit_power_law(r.scales, r.max_ratios);
        r.has_fit = true;
    }
    return r;
}

inline std::string to_csv(const ProbeReport& r) {
    std::string out = "scale,max_ratio,median_ratio,samples\n";
    char buf[128];
    for (std::size_t i = 0; i < r.scales.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%zu\n", r.scales[i],
                      r.max_ratios[i], r.median_ratios[i], r.samples_per_scale[i]);
        out += buf;
    }
    return out;
}

inline std::string to_json(const ProbeReport& r) {
    nlohmann::ordered_json j;
    j["scales"] = r.scales;
    j["max_ratios"] = r.max_ratios;
    j["median_ratios"] = r.median_ratios;
    j["samples_per_scale"] = r.samples_per_scale;
    j["seed"] = r.seed;
    j["grid"] = r.grid_note;
    if (r.has_fit) {
        j["fit"] = {{"slope", r.fit.slope},
                    {"intercept", r.fit.intercept},
                    {"max_residual", r.fit.max_residual}};
    } else {
        j["fit"] = nullptr;
    }
    if (std::isfinite(r.reference_slope))
        j["reference_slope"] = r.reference_slope;
    else
        j["reference_slope"] = nullptr;
    j["growth_factor"] = std::isfinite(r.growth_factor)
                             ? nlohmann::ordered_json(r.growth_factor)
                             : nlohmann::ordered_json("inf");
    j["max_ratio_bounded"] = r.max_ratio_bounded;
    j["notes"] = r.notes;
    return j.dump(2) + "\n";
}

}  // namespace speclab
