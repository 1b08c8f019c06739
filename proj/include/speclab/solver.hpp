#pragma once
// Time integration of the third-order dispersive evolution with the nonlocal
// rotation term,
//
//     u_t = ∂³ₓu − γ ∂ₓ^{−1}u + ½ ∂ₓ(u²),      i.e.  u_t = −Au + F(u)
//
// with A = −∂³ₓ + γ∂ₓ^{−1} (Fourier symbol i·p(ξ), so e^{−tA} is exactly the
// unimodular free evolution e^{−itp(ξ)}) and forcing F(u) = ½∂ₓ(u²).  Two
// schemes share this decomposition:
//
//   • IF_RK4 — integrating-factor Runge–Kutta: the substitution w = e^{tA}u
//     removes the stiff linear part exactly (no CFL restriction from p);
//     classical four-stage quadrature handles the forcing, giving fourth-
//     order convergence in dt and, with the padded product, exact
//     semi-discrete conservation of ∫u² (⟨u, ∂ₓP(u²)⟩ = −⅓∫(u³)ₓ = 0).
//   • PICARD — fixed-point iteration of the integral map
//         Φ(u)(t) = e^{−tA}u₀ + ∫₀ᵗ e^{−(t−s)A} F(u(s)) ds,
//     with the time integral evaluated by the trapezoid rule over the stored
//     stamps.  Picard is a contraction diagnostic, not a production scheme:
//     its quadrature resolves the oscillation e^{isp(ξ)} only while
//     dt·max|p(ξ)| stays moderate (recorded in the diagnostics).
//
// The quadratic product is formed pseudospectrally; the default dealiasing
// pads to a doubled grid (the power-of-two form of the 3/2-rule), which
// represents the product spectrum exactly before truncation.  All states
// are mean-zero: ∂ₓ annihilates the mean and γ > 0 requires it.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "grid.hpp"

namespace speclab {

enum class TimeScheme { PICARD, IF_RK4 };
enum class Dealias { TWO_THIRDS, NONE };

inline const char* to_string(TimeScheme s) {
    return s == TimeScheme::PICARD ? "PICARD" : "IF_RK4";
}
inline const char* to_string(Dealias d) {
    return d == Dealias::TWO_THIRDS ? "TWO_THIRDS" : "NONE";
}

struct SolverConfig {
    SpaceGrid grid;
    double dt;
    double t_final;
    PhaseParams params;
    TimeScheme scheme = TimeScheme::IF_RK4;
    Dealias dealias = Dealias::TWO_THIRDS;
    std::size_t picard_iters = 20;

    SolverConfig(SpaceGrid g, double step, double horizon,
                 PhaseParams p = PhaseParams(),
                 TimeScheme sc = TimeScheme::IF_RK4,
                 Dealias da = Dealias::TWO_THIRDS, std::size_t iters = 20)
        : grid(g), dt(step), t_final(horizon), params(p), scheme(sc),
          dealias(da), picard_iters(iters) {
        if (!(dt > 0.0)) throw std::domain_error("SolverConfig: dt must be positive");
        if (!(t_final > 0.0 && t_final <= 1.0))
            throw std::domain_error("SolverConfig: t_final must lie in (0, 1]");
        if (dt > t_final) throw std::domain_error("SolverConfig: dt must be <= t_final");
        const double steps = t_final / dt;
        if (std::abs(steps - std::round(steps)) > 1e-9 * steps)
            throw std::domain_error("SolverConfig: dt must divide t_final");
        if (picard_iters == 0)
            throw std::domain_error("SolverConfig: picard_iters must be >= 1");
    }

    std::size_t step_count() const {
        return static_cast<std::size_t>(std::llround(t_final / dt));
    }
};

// Time-ordered states at t = 0, dt, 2·dt, …; a truncated trajectory stopped
// early (nonfinite coefficients or L² growth beyond 10×) and says why.
struct Trajectory {
    SolverConfig config;
    std::vector<SpectralState> states;
    bool truncated = false;
    std::string diagnostic;

    std::size_t size() const { return states.size(); }
    const SpectralState& state(std::size_t k) const { return states.at(k); }
    double time(std::size_t k) const { return states.at(k).time; }
};

namespace detail {

inline void require_mean_zero(const SpectralState& u, const char* who) {
    if (!u.is_mean_zero())
        throw std::domain_error(std::string(who) + ": state must be mean-zero");
}

// y ← y + s·x on coefficients (grids must already agree).
inline void axpy(SpectralState& y, double s, const SpectralState& x) {
    for (std::size_t m = 0; m < y.coeffs.size(); ++m)
        y.coeffs[m] += s * x.coeffs[m];
}

inline SpectralState scaled_sum(const SpectralState& a, double s,
                                const SpectralState& b, double time) {
    SpectralState out = a;
    axpy(out, s, b);
    out.time = time;
    return out;
}

}  // namespace detail

// Forcing term F(u) = ½∂ₓ(u²), formed pseudospectrally.  TWO_THIRDS pads the
// coefficients onto a doubled grid before the physical-space square, so the
// quadratic spectrum is exact up to the retained band; NONE squares on the
// native grid (the aliased circular convolution, kept for small-grid
// oracle comparisons).  The mean mode is annihilated exactly by ∂ₓ.
inline SpectralState nonlinearity(const SpectralState& u,
                                  Dealias dealias = Dealias::TWO_THIRDS) {
    detail::require_mean_zero(u, "nonlinearity");
    const SpaceGrid& grid = u.grid;
    const std::size_t n = grid.n_points;

    std::vector<std::complex<double>> squared;
    if (dealias == Dealias::NONE) {
        std::vector<std::complex<double>> samples = inverse_transform_complex(u);
        for (auto& v : samples) v *= v;
        squared = forward_transform_complex(grid, samples, u.time).coeffs;
    } else {
        const SpaceGrid padded(2 * n, grid.domain_length);
        SpectralState big = SpectralState::zero(padded);
        // Identical Δξ: coefficient of ξ_m moves from index m to m + n/2.
        for (std::size_t m = 0; m < n; ++m)
            big.coeffs[m + n / 2] = u.coeffs[m];
        std::vector<std::complex<double>> samples = inverse_transform_complex(big);
        for (auto& v : samples) v *= v;
        const SpectralState product =
            forward_transform_complex(padded, samples, u.time);
        squared.resize(n);
        for (std::size_t m = 0; m < n; ++m)
            squared[m] = product.coeffs[m + n / 2];
    }

    SpectralState out(grid, std::move(squared), u.time);
    for (std::size_t m = 0; m < n; ++m)
        out.coeffs[m] *= std::complex<double>(0.0, 0.5 * grid.frequency(m));
    out.set_mean_zero();  // exact zero even if the square overflowed
    return out;
}

// One integrating-factor RK4 step of size dt.  E = e^{−(dt/2)A} is applied
// with the exact unimodular multiplier (free_evolution), so only the forcing
// is approximated.
inline SpectralState step_if_rk4(const SpectralState& u, double dt,
                                 const PhaseParams& params = PhaseParams(),
                                 Dealias dealias = Dealias::TWO_THIRDS) {
    detail::require_mean_zero(u, "step_if_rk4");
    const double h = dt;
    const auto half = [&](const SpectralState& s) {
        return free_evolution(s, h / 2.0, params);
    };

    const SpectralState eu = half(u);            // E·u
    const SpectralState eeu = half(eu);          // E²·u
    const SpectralState f1 = nonlinearity(u, dealias);
    const SpectralState ef1 = half(f1);
    const SpectralState f2 =
        nonlinearity(detail::scaled_sum(eu, h / 2.0, ef1, u.time), dealias);
    const SpectralState f3 =
        nonlinearity(detail::scaled_sum(eu, h / 2.0, f2, u.time), dealias);
    const SpectralState ef3 = half(f3);
    const SpectralState f4 =
        nonlinearity(detail::scaled_sum(eeu, h, ef3, u.time), dealias);

    SpectralState next = eeu;                    // E²·u + (h/6)(E²f1 + 2Ef2 + 2Ef3 + f4)
    detail::axpy(next, h / 6.0, half(ef1));
    detail::axpy(next, h / 3.0, half(f2));
    detail::axpy(next, h / 3.0, ef3);
    detail::axpy(next, h / 6.0, f4);
    next.time = u.time + dt;
    next.set_mean_zero();
    return next;
}

// March IF_RK4 from u0 over [0, t_final].  Nonfinite coefficients or L²
// growth beyond 10× truncate the trajectory with a structured diagnostic.
inline Trajectory solve_if_rk4(const SpectralState& u0, const SolverConfig& config) {
    if (!(u0.grid == config.grid))
        throw std::invalid_argument("solve: initial state grid != config grid");
    detail::require_mean_zero(u0, "solve");

    Trajectory traj{config, {}, false, ""};
    traj.states.reserve(config.step_count() + 1);
    SpectralState u = u0;
    u.time = 0.0;
    traj.states.push_back(u);
    const double initial_l2 = l2_norm(u0);

    for (std::size_t k = 0; k < config.step_count(); ++k) {
        u = step_if_rk4(u, config.dt, config.params, config.dealias);
        u.time = static_cast<double>(k + 1) * config.dt;

        bool finite = true;
        for (const auto& c : u.coeffs)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
                finite = false;
                break;
            }
        const double norm_now = finite ? l2_norm(u) : 0.0;
        if (!finite || (initial_l2 > 0.0 && norm_now > 10.0 * initial_l2)) {
            traj.truncated = true;
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "blow-up detected at t = %.6g after %zu steps: %s",
                          u.time, k + 1,
                          finite ? "L2 norm grew beyond 10x the initial value"
                                 : "nonfinite coefficient");
            traj.diagnostic = buf;
            return traj;
        }
        traj.states.push_back(u);
    }
    return traj;
}

// The integral map Φ(u)(t) = e^{−tA}u₀ + ∫₀ᵗ e^{−(t−s)A}F(u(s)) ds evaluated
// at the trajectory's own stamps, trapezoid rule in s.  Because every
// semigroup factor is unimodular, the integral is accumulated in the
// rotating frame: Φ(tₖ) = e^{−tₖA}[u₀ + Σᵢ wᵢ e^{+sᵢA}F(u(sᵢ))].
// Φ(0) = u₀ exactly.
inline Trajectory picard_step(const Trajectory& u, const SpectralState& u0) {
    const SolverConfig& config = u.config;
    if (!(u0.grid == config.grid))
        throw std::invalid_argument("picard_step: initial state grid != config grid");
    if (u.states.empty())
        throw std::invalid_argument("picard_step: empty trajectory");
    for (std::size_t k = 0; k < u.states.size(); ++k) {
        if (!(u.states[k].grid == config.grid))
            throw std::invalid_argument("picard_step: trajectory grid mismatch");
        if (std::abs(u.states[k].time - static_cast<double>(k) * config.dt) >
            1e-12 * std::max(1.0, config.t_final))
            throw std::invalid_argument("picard_step: nonuniform timestamps");
    }
    detail::require_mean_zero(u0, "picard_step");

    Trajectory out{config, {}, false, ""};
    out.states.reserve(u.states.size());
    SpectralState first = u0;
    first.time = 0.0;
    out.states.push_back(first);

    // Rotating-frame forcing g(s) = e^{+sA}F(u(s)) and its running trapezoid
    // prefix sum S(tₖ) = Σ (dt/2)(gᵢ₋₁ + gᵢ).
    SpectralState prefix = SpectralState::zero(config.grid);
    SpectralState g_prev = free_evolution(
        nonlinearity(u.states[0], config.dealias), 0.0, config.params);
    for (std::size_t k = 1; k < u.states.size(); ++k) {
        const double sk = static_cast<double>(k) * config.dt;
        SpectralState fk = nonlinearity(u.states[k], config.dealias);
        fk.time = 0.0;
        const SpectralState g_now = free_evolution(fk, -sk, config.params);
        detail::axpy(prefix, config.dt / 2.0, g_prev);
        detail::axpy(prefix, config.dt / 2.0, g_now);
        g_prev = g_now;

        SpectralState acc = u0;
        detail::axpy(acc, 1.0, prefix);
        acc.time = 0.0;
        SpectralState phi = free_evolution(acc, sk, config.params);
        phi.time = sk;
        phi.set_mean_zero();
        out.states.push_back(phi);
    }
    return out;
}

struct PicardDiagnostics {
    std::vector<double> increments;  // d_n = sup_t ‖u^{n+1} − u^n‖_{H^{−3/4}}
    std::vector<double> ratios;      // d_{n+1} / d_n
    bool converged = false;
    bool diverged = false;           // three consecutive increases
    std::size_t iterations = 0;
    double quadrature_resolution = 0.0;  // dt · max|p(ξ)| on the grid
};

struct PicardResult {
    Trajectory trajectory;
    PicardDiagnostics diagnostics;
};

inline double sup_hs_distance(const Trajectory& a, const Trajectory& b, double s) {
    if (a.states.size() != b.states.size())
        throw std::invalid_argument("sup_hs_distance: trajectory lengths differ");
    double worst = 0.0;
    for (std::size_t k = 0; k < a.states.size(); ++k) {
        SpectralState d = a.states[k];
        detail::axpy(d, -1.0, b.states[k]);
        worst = std::max(worst, hs_norm(d, s));
    }
    return worst;
}

// Iterate Φ from the free trajectory; record increments d_n in sup-t H^{−3/4}
// and their geometric ratios.  Convergence: d_n < 1e−10.  Divergence (three
// consecutive increases) is reported in the diagnostics, never thrown.
inline PicardResult solve_picard(const SpectralState& u0, const SolverConfig& config) {
    if (!(u0.grid == config.grid))
        throw std::invalid_argument("solve: initial state grid != config grid");
    detail::require_mean_zero(u0, "solve_picard");

    PicardResult result{Trajectory{config, {}, false, ""}, PicardDiagnostics{}};
    double max_phase = 0.0;
    for (std::size_t m = 0; m < config.grid.n_points; ++m) {
        if (m == config.grid.zero_index()) continue;
        max_phase = std::max(max_phase,
                             std::abs(phase(config.grid.frequency(m), config.params)));
    }
    result.diagnostics.quadrature_resolution = config.dt * max_phase;

    // Iterate 0: the free evolution of the data.
    Trajectory current{config, {}, false, ""};
    {
        SpectralState u = u0;
        u.time = 0.0;
        current.states.push_back(u);
        for (std::size_t k = 1; k <= config.step_count(); ++k) {
            SpectralState s = free_evolution(u0, static_cast<double>(k) * config.dt,
                                             config.params);
            s.time = static_cast<double>(k) * config.dt;
            current.states.push_back(s);
        }
    }

    std::size_t rising = 0;
    for (std::size_t n = 0; n < config.picard_iters; ++n) {
        Trajectory next = picard_step(current, u0);
        const double d = sup_hs_distance(next, current, -0.75);
        if (!std::isfinite(d)) {
            result.diagnostics.increments.push_back(d);
            result.diagnostics.iterations = n + 1;
            result.diagnostics.diverged = true;
            result.trajectory = std::move(current);
            return result;
        }
        if (!result.diagnostics.increments.empty()) {
            const double prev = result.diagnostics.increments.back();
            result.diagnostics.ratios.push_back(prev > 0.0 ? d / prev
                                                           : 0.0);
            rising = d > prev ? rising + 1 : 0;
        }
        result.diagnostics.increments.push_back(d);
        result.diagnostics.iterations = n + 1;
        current = std::move(next);
        if (d < 1e-10) {
            result.diagnostics.converged = true;
            break;
        }
        if (rising >= 3) {
            result.diagnostics.diverged = true;
            break;
        }
    }
    result.trajectory = std::move(current);
    return result;
}

// Scheme dispatch: IF_RK4 marches; PICARD returns the fixed-point iterate.
inline Trajectory solve(const SpectralState& u0, const SolverConfig& config) {
    if (config.scheme == TimeScheme::IF_RK4) return solve_if_rk4(u0, config);
    return solve_picard(u0, config).trajectory;
}

// Large-data rescaling u_λ(x) = λ^{−2} u(x/λ) via the exact Fourier rule
// û_λ(ξ) = λ^{−1} û(λξ): the grid period multiplies by λ, so frequencies
// divide by λ index-by-index and no interpolation is needed.  For λ ≥ 1,
// ‖u_λ‖_{H^{−3/4}} ≤ λ^{−3/4}‖u‖_{H^{−3/4}} holds exactly in the discrete
// norm (⟨ξ/λ⟩ ≥ ⟨ξ⟩/λ).
inline SpectralState rescale_initial(const SpectralState& u0, double lambda) {
    if (!(lambda >= 1.0))
        throw std::domain_error("rescale_initial: lambda must be >= 1");
    const SpaceGrid scaled(u0.grid.n_points, u0.grid.domain_length * lambda);
    std::vector<std::complex<double>> coeffs = u0.coeffs;
    for (auto& c : coeffs) c /= lambda;
    SpectralState out(scaled, std::move(coeffs), u0.time);
    return out;
}

// Rotation-limit experiment: solve with each γ in a nonincreasing list and
// compare against the γ = 0 run of the same data/config in sup-t L².
struct RotationLimitRow {
    double gamma;
    double error;  // sup_t ‖u_γ(t) − u_{γ=0}(t)‖_{L²}
};

inline std::vector<RotationLimitRow> kdv_limit_experiment(
    const SpectralState& u0, const std::vector<double>& gamma_list,
    const SolverConfig& config) {
    if (gamma_list.empty())
        throw std::invalid_argument("kdv_limit_experiment: empty gamma list");
    for (std::size_t i = 0; i < gamma_list.size(); ++i) {
        if (!(gamma_list[i] >= 0.0))
            throw std::domain_error("kdv_limit_experiment: gamma must be >= 0");
        if (i > 0 && !(gamma_list[i] < gamma_list[i - 1]))
            throw std::domain_error("kdv_limit_experiment: gamma list must decrease");
    }

    const auto run = [&](double gamma) {
        SolverConfig c(config.grid, config.dt, config.t_final,
                       PhaseParams(config.params.beta, gamma),
                       TimeScheme::IF_RK4, config.dealias, config.picard_iters);
        Trajectory t = solve_if_rk4(u0, c);
        if (t.truncated)
            throw std::runtime_error("kdv_limit_experiment: " + t.diagnostic);
        return t;
    };

    const Trajectory reference = run(0.0);
    std::vector<RotationLimitRow> rows;
    for (double gamma : gamma_list) {
        const Trajectory t = run(gamma);
        double worst = 0.0;
        for (std::size_t k = 0; k < t.states.size(); ++k) {
            SpectralState d = t.states[k];
            detail::axpy(d, -1.0, reference.states[k]);
            worst = std::max(worst, l2_norm(d));
        }
        rows.push_back({gamma, worst});
    }
    return rows;
}

// Data-to-solution stability quotient: perturb the data by δ·w and return
// sup_t ‖u_{δ} − u‖_{H^{−3/4}} / (δ‖w‖_{H^{−3/4}}).
inline double lipschitz_probe(const SpectralState& u0, const SpectralState& w,
                              double delta, const SolverConfig& config) {
    if (!(delta > 0.0))
        throw std::domain_error("lipschitz_probe: delta must be positive");
    if (!(w.grid == u0.grid))
        throw std::invalid_argument("lipschitz_probe: perturbation grid mismatch");
    detail::require_mean_zero(w, "lipschitz_probe");
    const double w_norm = hs_norm(w, -0.75);
    if (w_norm == 0.0)
        throw std::domain_error("lipschitz_probe: zero perturbation direction");

    const Trajectory base = solve_if_rk4(u0, config);
    SpectralState shifted = u0;
    detail::axpy(shifted, delta, w);
    const Trajectory moved = solve_if_rk4(shifted, config);
    if (base.truncated || moved.truncated)
        throw std::runtime_error("lipschitz_probe: blow-up in a branch: " +
                                 (base.truncated ? base.diagnostic : moved.diagnostic));
    return sup_hs_distance(moved, base, -0.75) / (delta * w_norm);
}

// ── file interfaces ────────────────────────────────────────────────────────

// Initial data from CSV rows "x,u" (optional header).  The row count must be
// a power of two ≥ 8; the (uniform) spacing defines the period L = n·Δx.
// The sample order defines the grid; the mean is removed exactly.
inline SpectralState load_initial_csv(std::istream& in) {
    std::vector<double> xs, us;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string a, b;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ','))
            throw std::invalid_argument("load_initial_csv: expected rows 'x,u'");
        char* end = nullptr;
        const double x = std::strtod(a.c_str(), &end);
        if (end == a.c_str()) {
            if (xs.empty()) continue;  // header line
            throw std::invalid_argument("load_initial_csv: non-numeric row");
        }
        char* end_b = nullptr;
        const double u = std::strtod(b.c_str(), &end_b);
        if (end_b == b.c_str())
            throw std::invalid_argument("load_initial_csv: non-numeric row");
        xs.push_back(x);
        us.push_back(u);
    }
    const std::size_t n = xs.size();
    if (n < 8 || (n & (n - 1)) != 0)
        throw std::invalid_argument(
            "load_initial_csv: row count must be a power of two >= 8");
    const double dx = xs[1] - xs[0];
    if (!(dx > 0.0))
        throw std::invalid_argument("load_initial_csv: x must increase");
    for (std::size_t m = 1; m < n; ++m)
        if (std::abs(xs[m] - xs[m - 1] - dx) > 1e-9 * dx)
            throw std::invalid_argument("load_initial_csv: nonuniform spacing");
    const SpaceGrid grid(n, dx * static_cast<double>(n));
    SpectralState s = forward_transform(grid, us);
    s.set_mean_zero();
    return s;
}

// Trajectory to CSV rows "t,x,u" (physical samples, %.17g round-trip).
inline void trajectory_to_csv(const Trajectory& traj, std::ostream& out) {
    out << "t,x,u\n";
    char buf[96];
    for (const SpectralState& s : traj.states) {
        const std::vector<double> u = inverse_transform(s);
        for (std::size_t m = 0; m < u.size(); ++m) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.time,
                          s.grid.x(m), u[m]);
            out << buf;
        }
    }
}

// Config echo and shape for the run manifest (no timestamps: reruns are
// byte-identical).
inline nlohmann::json trajectory_manifest(const Trajectory& traj) {
    nlohmann::json j;
    j["scheme"] = to_string(traj.config.scheme);
    j["dealias"] = to_string(traj.config.dealias);
    j["n_points"] = traj.config.grid.n_points;
    j["domain_length"] = traj.config.grid.domain_length;
    j["dt"] = traj.config.dt;
    j["t_final"] = traj.config.t_final;
    j["beta"] = traj.config.params.beta;
    j["gamma"] = traj.config.params.gamma;
    j["picard_iters"] = traj.config.picard_iters;
    j["states"] = traj.states.size();
    j["truncated"] = traj.truncated;
    j["diagnostic"] = traj.diagnostic;
    return j;
}

}  // namespace speclab
