#pragma once
// Spatial grids, spectral states, the dispersion phase, Fourier multipliers,
// and the free evolution group.
//
// Conventions (fixed across the whole library):
//   • spatial transform   û(ξ) = Δx Σ_m u(x_m) e^{−iξ x_m}   (so ∂_x ↔ iξ),
//     inverse             u(x) = (1/L) Σ_k û(ξ_k) e^{+iξ_k x};
//   • frequencies ξ_k = 2πk/L for k ∈ [−n/2, n/2), stored ascending, so the
//     coefficient at array index m belongs to ξ = 2π(m − n/2)/L;
//   • dispersion phase p(ξ) = |β|ξ³ − γ/ξ (normalized β = −1 gives ξ³ − γ/ξ),
//     singular at ξ = 0, odd in ξ;
//   • free evolution multiplies û(ξ) by e^{−i t p(ξ)}; the ξ = 0 mode carries
//     the mean and must vanish whenever γ > 0 (∂_x^{−1} forces mean zero).

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "fft.hpp"
#include "rng.hpp"
#include "summation.hpp"

namespace speclab {

inline double bracket(double x) { return std::sqrt(1.0 + x * x); }

// ── grids ──────────────────────────────────────────────────────────────────

struct SpaceGrid {
    std::size_t n_points;
    double domain_length;

    SpaceGrid(std::size_t n, double length) : n_points(n), domain_length(length) {
        if (n < 8) throw std::domain_error("SpaceGrid: n_points must be >= 8");
        if ((n & (n - 1)) != 0)
            throw std::domain_error("SpaceGrid: n_points must be a power of two");
        if (!(length > 0.0))
            throw std::domain_error("SpaceGrid: domain_length must be positive");
    }

    // Default period 2π·32: the smallest nonzero |ξ| is 1/32 < 1/8, so the
    // low-frequency/high-modulation region is reachable on the grid.
    static SpaceGrid standard(std::size_t n = 64) {
        return SpaceGrid(n, 2.0 * std::numbers::pi * 32.0);
    }

    double dx() const { return domain_length / static_cast<double>(n_points); }
    double dxi() const { return 2.0 * std::numbers::pi / domain_length; }
    std::size_t zero_index() const { return n_points / 2; }

    // Frequency at ascending storage index m ∈ [0, n).
    double frequency(std::size_t m) const {
        return dxi() * (static_cast<double>(m) - static_cast<double>(n_points / 2));
    }

    std::vector<double> frequencies() const {
        std::vector<double> xs(n_points);
        for (std::size_t m = 0; m < n_points; ++m) xs[m] = frequency(m);
        return xs;
    }

    double x(std::size_t m) const { return dx() * static_cast<double>(m); }

    bool operator==(const SpaceGrid& o) const {
        return n_points == o.n_points && domain_length == o.domain_length;
    }
};

// ── spectral states ────────────────────────────────────────────────────────

struct SpectralState {
    SpaceGrid grid;
    std::vector<std::complex<double>> coeffs;  // ascending frequency order
    double time = 0.0;

    SpectralState(SpaceGrid g, std::vector<std::complex<double>> c, double t = 0.0)
        : grid(g), coeffs(std::move(c)), time(t) {
        if (coeffs.size() != grid.n_points)
            throw std::invalid_argument("SpectralState: coefficient count != n_points");
    }

    static SpectralState zero(SpaceGrid g) {
        return SpectralState(g, std::vector<std::complex<double>>(g.n_points), 0.0);
    }

    std::complex<double>& at_index(std::size_t m) { return coeffs[m]; }
    const std::complex<double>& at_index(std::size_t m) const { return coeffs[m]; }
    std::complex<double> mean_coefficient() const { return coeffs[grid.zero_index()]; }

    void set_mean_zero() { coeffs[grid.zero_index()] = 0.0; }

    bool is_mean_zero() const { return mean_coefficient() == std::complex<double>(0.0); }

    // Hermitian symmetry coeffs(−ξ) = conj(coeffs(ξ)) up to `tol` relative to
    // the largest coefficient; the Nyquist mode (no positive partner) and
    // the mean must be real.
    bool is_real_field(double tol = 1e-10) const {
        double scale = 0.0;
        for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
        if (scale == 0.0) return true;
        const std::size_t n = grid.n_points, z = grid.zero_index();
        if (std::abs(coeffs[z].imag()) > tol * scale) return false;
        if (std::abs(coeffs[0].imag()) > tol * scale) return false;  // Nyquist
        for (std::size_t m = z + 1; m < n; ++m) {
            const auto mirror = coeffs[2 * z - m];  // index of −ξ_m
            if (std::abs(mirror - std::conj(coeffs[m])) > tol * scale) return false;
        }
        return true;
    }
};

// ── dispersion phase ───────────────────────────────────────────────────────

struct PhaseParams {
    double beta = -1.0;
    double gamma = 1.0;

    PhaseParams() = default;
    PhaseParams(double b, double g) : beta(b), gamma(g) {
        if (!(beta < 0.0)) throw std::domain_error("PhaseParams: beta must be negative");
        if (!(gamma >= 0.0)) throw std::domain_error("PhaseParams: gamma must be >= 0");
    }
};

inline double phase(double xi, const PhaseParams& params = PhaseParams()) {
    if (xi == 0.0) throw std::domain_error("phase: xi = 0 is the singular point");
    return -params.beta * xi * xi * xi - params.gamma / xi;
}

// Extended-precision phase for unimodular factors: t·p(ξ) can be huge while
// group-law tests demand 1e−12 relative accuracy of the wrapped angle.
inline long double phase_l(long double xi, const PhaseParams& params) {
    return -static_cast<long double>(params.beta) * xi * xi * xi -
           static_cast<long double>(params.gamma) / xi;
}

// ── free evolution group ───────────────────────────────────────────────────

inline SpectralState free_evolution(const SpectralState& state, double t,
                                    const PhaseParams& params = PhaseParams()) {
    SpectralState out = state;
    out.time = state.time + t;
    const std::size_t z = state.grid.zero_index();
    if (params.gamma > 0.0 && state.coeffs[z] != std::complex<double>(0.0))
        throw std::domain_error(
            "free_evolution: nonzero mean coefficient with gamma > 0 (phase singular at xi = 0)");
    for (std::size_t m = 0; m < state.grid.n_points; ++m) {
        if (m == z) continue;  // mean mode: zero stays zero (p(0) irrelevant)
        const long double theta = -static_cast<long double>(t) *
                                  phase_l(state.grid.frequency(m), params);
        const long double w =
            std::remainder(theta, 2.0L * 3.14159265358979323846264338327950288L);
        out.coeffs[m] = state.coeffs[m] *
                        std::complex<double>(static_cast<double>(std::cos(w)),
                                             static_cast<double>(std::sin(w)));
    }
    return out;
}

// ── Fourier multipliers ────────────────────────────────────────────────────

enum class MultiplierSymbol { derivative, third_derivative, antiderivative, abs_power, bracket_power };

struct Multiplier {
    MultiplierSymbol symbol;
    double exponent = 1.0;  // a in |ξ|^a, s in ⟨ξ⟩^s

    static Multiplier d_dx() { return {MultiplierSymbol::derivative, 0.0}; }
    static Multiplier d_dx3() { return {MultiplierSymbol::third_derivative, 0.0}; }
    static Multiplier inv_dx() { return {MultiplierSymbol::antiderivative, 0.0}; }
    static Multiplier abs_power(double a) { return {MultiplierSymbol::abs_power, a}; }
    static Multiplier bracket_power(double s) { return {MultiplierSymbol::bracket_power, s}; }
};

inline SpectralState apply_multiplier(const SpectralState& state, const Multiplier& m) {
    SpectralState out = state;
    const std::size_t z = state.grid.zero_index();
    if (m.symbol == MultiplierSymbol::antiderivative &&
        state.coeffs[z] != std::complex<double>(0.0))
        throw std::domain_error("apply_multiplier: antiderivative of a nonzero-mean field");
    for (std::size_t idx = 0; idx < state.grid.n_points; ++idx) {
        const double xi = state.grid.frequency(idx);
        std::complex<double> factor;
        switch (m.symbol) {
            case MultiplierSymbol::derivative:
                factor = std::complex<double>(0.0, xi);
                break;
            case MultiplierSymbol::third_derivative:
                factor = std::complex<double>(0.0, -xi * xi * xi);
                break;
            case MultiplierSymbol::antiderivative:
                factor = (idx == z) ? 0.0 : 1.0 / std::complex<double>(0.0, xi);
                break;
            case MultiplierSymbol::abs_power:
                if (idx == z)
                    factor = (m.exponent > 0.0) ? 0.0 : (m.exponent == 0.0 ? 1.0 : 0.0);
                else
                    factor = std::pow(std::abs(xi), m.exponent);
                if (idx == z && m.exponent < 0.0 &&
                    state.coeffs[z] != std::complex<double>(0.0))
                    throw std::domain_error(
                        "apply_multiplier: |xi|^a with a < 0 on a nonzero-mean field");
                break;
            case MultiplierSymbol::bracket_power:
                factor = std::pow(bracket(xi), m.exponent);
                break;
        }
        out.coeffs[idx] = state.coeffs[idx] * factor;
    }
    return out;
}

// ── transforms ─────────────────────────────────────────────────────────────

inline SpectralState forward_transform_complex(const SpaceGrid& grid,
                                               const std::vector<std::complex<double>>& samples,
                                               double time = 0.0) {
    if (samples.size() != grid.n_points)
        throw std::invalid_argument("forward_transform: sample count != n_points");
    std::vector<std::complex<double>> work = samples;
    dft_1d(work, FFTW_FORWARD);  // Y_k = Σ_m u_m e^{−2πi km/n}, k in FFT order
    const std::size_t n = grid.n_points, z = grid.zero_index();
    std::vector<std::complex<double>> coeffs(n);
    const double dx = grid.dx();
    for (std::size_t m = 0; m < n; ++m) {
        // ascending index m holds k = m − n/2; FFT storage index is k mod n.
        const std::size_t fft_idx = (m + z) % n;
        coeffs[m] = dx * work[fft_idx];
    }
    return SpectralState(grid, std::move(coeffs), time);
}

inline SpectralState forward_transform(const SpaceGrid& grid,
                                       const std::vector<double>& samples,
                                       double time = 0.0) {
    std::vector<std::complex<double>> cs(samples.begin(), samples.end());
    return forward_transform_complex(grid, cs, time);
}

inline std::vector<std::complex<double>> inverse_transform_complex(const SpectralState& state) {
    const std::size_t n = state.grid.n_points, z = state.grid.zero_index();
    std::vector<std::complex<double>> work(n);
    for (std::size_t m = 0; m < n; ++m) work[(m + z) % n] = state.coeffs[m];
    dft_1d(work, FFTW_BACKWARD);  // u_m = Σ_k Y_k e^{+2πi km/n}
    const double inv_len = 1.0 / state.grid.domain_length;
    for (auto& v : work) v *= inv_len;
    return work;
}

inline std::vector<double> inverse_transform(const SpectralState& state) {
    const auto complex_samples = inverse_transform_complex(state);
    std::vector<double> out(complex_samples.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = complex_samples[i].real();
    return out;
}

// ── norms of states ────────────────────────────────────────────────────────

// ‖u‖_{H^s} = ( (1/L) Σ_k ⟨ξ_k⟩^{2s} |û(ξ_k)|² )^{1/2}; s = 0 matches the
// physical L² norm by the discrete Parseval identity.
inline double hs_norm(const SpectralState& state, double s) {
    std::vector<double> terms(state.grid.n_points);
    for (std::size_t m = 0; m < state.grid.n_points; ++m)
        terms[m] = std::pow(bracket(state.grid.frequency(m)), 2.0 * s) *
                   std::norm(state.coeffs[m]);
    return std::sqrt(pairwise_sum(terms) / state.grid.domain_length);
}

inline double l2_norm(const SpectralState& state) { return hs_norm(state, 0.0); }

// ── built-in initial data ──────────────────────────────────────────────────

// Gaussian bump, mean removed exactly (solver states must be mean-zero).
inline SpectralState gaussian_state(const SpaceGrid& grid, double amplitude = 0.1,
                                    double width = 2.0) {
    const double center = 0.5 * grid.domain_length;
    std::vector<double> u(grid.n_points);
    for (std::size_t m = 0; m < grid.n_points; ++m) {
        const double r = (grid.x(m) - center) / width;
        u[m] = amplitude * std::exp(-r * r);
    }
    SpectralState s = forward_transform(grid, u);
    s.set_mean_zero();
    return s;
}

// Soliton-like sech² profile (KdV traveling-wave shape), mean removed.
inline SpectralState sech2_state(const SpaceGrid& grid, double amplitude = 0.1,
                                 double width = 2.0) {
    const double center = 0.5 * grid.domain_length;
    std::vector<double> u(grid.n_points);
    for (std::size_t m = 0; m < grid.n_points; ++m) {
        const double c = std::cosh((grid.x(m) - center) / width);
        u[m] = amplitude / (c * c);
    }
    SpectralState s = forward_transform(grid, u);
    s.set_mean_zero();
    return s;
}

// Random band-limited real field: complex Gaussian coefficients on frequency
// band |ξ| ∈ [xi_lo, xi_hi], Hermitian-symmetrized, L²-normalized.
inline SpectralState random_band_state(const SpaceGrid& grid, double xi_lo,
                                       double xi_hi, std::uint64_t seed,
                                       double l2_target = 1.0) {
    counter_rng rng(seed, /*stream=*/17);
    SpectralState s = SpectralState::zero(grid);
    const std::size_t z = grid.zero_index();
    for (std::size_t m = z + 1; m < grid.n_points; ++m) {
        const double xi = grid.frequency(m);
        if (std::abs(xi) < xi_lo || std::abs(xi) > xi_hi) continue;
        const std::complex<double> c(rng.normal(), rng.normal());
        s.coeffs[m] = c;
        s.coeffs[2 * z - m] = std::conj(c);
    }
    const double norm = l2_norm(s);
    if (norm == 0.0)
        throw std::domain_error("random_band_state: band contains no grid frequencies");
    for (auto& c : s.coeffs) c *= l2_target / norm;
    return s;
}

}  // namespace speclab
