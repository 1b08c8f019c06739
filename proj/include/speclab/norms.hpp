#pragma once
// Norm zoo on spacetime fields:
//   XSB   ‖⟨ξ⟩^s ⟨τ−p(ξ)⟩^b F‖_{L²_{τξ}}
//   XSB1  ℓ²_j of 2^{js}·Σ_k 2^{bk}·‖F‖_{L²(A_j∩B_k)}   (ℓ¹ over modulation)
//   XMOD  XSB1(−3/4, 1/2) on D^c  +  XSB(−3/4, 1/2) on D  (unweighted sum)
//   Y     ‖⟨ξ⟩^{−3/4} F‖ with inner L¹_τ (trapezoid) and outer L²_ξ
//   HS    ‖⟨ξ⟩^s F‖_{L²_{τξ}}  (spacetime Sobolev hybrid; XSB with b = 0)
// plus the embedding-ratio probe and the windowed restriction-norm upper
// bound for trajectories.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fft.hpp"
#include "spacetime.hpp"
#include "summation.hpp"

namespace speclab {

// ── norm specification and its string form ─────────────────────────────────

struct NormSpec {
    enum class Variant { XSB, XSB1, XMOD, Y, HS };
    Variant variant;
    double s = 0.0;
    double b = 0.0;

    static NormSpec xsb(double s, double b) { return {Variant::XSB, s, b}; }
    static NormSpec xsb1(double s, double b) { return {Variant::XSB1, s, b}; }
    // The modified norm is pinned at (s, b) = (−3/4, 1/2).
    static NormSpec xmod() { return {Variant::XMOD, -0.75, 0.5}; }
    static NormSpec y() { return {Variant::Y, -0.75, 0.0}; }
    static NormSpec hs(double s) { return {Variant::HS, s, 0.0}; }

    std::string to_string() const {
        char buf[64];
        switch (variant) {
            case Variant::XSB:
                std::snprintf(buf, sizeof buf, "Xsb(s=%g,b=%g)", s, b);
                return buf;
            case Variant::XSB1:
                std::snprintf(buf, sizeof buf, "Xsb1(s=%g,b=%g)", s, b);
                return buf;
            case Variant::XMOD: return "Xmod";
            case Variant::Y: return "Y";
            case Variant::HS:
                std::snprintf(buf, sizeof buf, "Hs(s=%g)", s);
                return buf;
        }
        return "?";
    }

    static NormSpec parse(const std::string& text);
};

namespace detail {

inline std::map<std::string, double> parse_kv_args(const std::string& inner,
                                                   const std::string& context) {
    std::map<std::string, double> kv;
    std::size_t pos = 0;
    while (pos < inner.size()) {
        std::size_t comma = inner.find(',', pos);
        if (comma == std::string::npos) comma = inner.size();
        const std::string item = inner.substr(pos, comma - pos);
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("NormSpec: expected key=value in " + context);
        const std::string key = item.substr(0, eq);
        try {
            kv[key] = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw std::invalid_argument("NormSpec: bad number for '" + key + "' in " +
                                        context);
        }
        pos = comma + 1;
    }
    return kv;
}

}  // namespace detail

inline NormSpec NormSpec::parse(const std::string& text) {
    std::string t;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
    if (t == "Xmod") return xmod();
    if (t == "Y") return y();
    const std::size_t open = t.find('(');
    if (open == std::string::npos || t.back() != ')')
        throw std::invalid_argument("NormSpec: cannot parse '" + text + "'");
    const std::string name = t.substr(0, open);
    const std::string inner = t.substr(open + 1, t.size() - open - 2);
    const auto kv = detail::parse_kv_args(inner, text);
    const auto need = [&](const char* key) {
        const auto it = kv.find(key);
        if (it == kv.end())
            throw std::invalid_argument("NormSpec: missing '" + std::string(key) +
                                        "' in " + text);
        return it->second;
    };
    if (name == "Xsb") return xsb(need("s"), need("b"));
    if (name == "Xsb1") return xsb1(need("s"), need("b"));
    if (name == "Hs") return hs(need("s"));
    throw std::invalid_argument("NormSpec: unknown variant '" + name + "'");
}

// ── norm evaluation ────────────────────────────────────────────────────────

namespace detail {

inline void require_modulation_admissible(const SpacetimeField& f, const char* who) {
    if (!f.zero_frequency_column_vanishes())
        throw std::domain_error(std::string(who) +
                                ": nonzero xi = 0 column with a modulation-weighted norm");
}

// Weighted L²: ‖⟨ξ⟩^s ⟨τ−p⟩^b F‖ with b = 0 allowed on the ξ = 0 column.
inline double weighted_l2(const SpacetimeField& f, double s, double b,
                          const PhaseParams& params) {
    const std::size_t z = f.grid.space.zero_index();
    std::vector<double> terms;
    terms.reserve(f.values.size());
    for (std::size_t m = 0; m < f.grid.n_xi(); ++m) {
        const double xi = f.grid.xi(m);
        const double xw = std::pow(bracket(xi), 2.0 * s);
        for (std::size_t i = 0; i < f.grid.m_points; ++i) {
            const double a2 = std::norm(f.at(m, i));
            if (a2 == 0.0) continue;
            double w = xw;
            if (b != 0.0) {
                if (m == z)
                    throw std::domain_error(
                        "norm: nonzero xi = 0 column with a modulation-weighted norm");
                w *= std::pow(bracket(f.grid.tau(i) - phase(xi, params)), 2.0 * b);
            }
            terms.push_back(w * a2);
        }
    }
    return std::sqrt(pairwise_sum(terms) * f.grid.cell_area());
}

// Besov-type sum from per-(j,k) block L² norms.
inline double besov_from_blocks(const std::map<std::pair<int, int>, double>& blocks,
                                double s, double b) {
    std::map<int, double> per_j;  // Σ_k 2^{bk} mass_{jk}
    for (const auto& [jk, mass] : blocks)
        per_j[jk.first] += std::exp2(b * jk.second) * mass;
    std::vector<double> sq;
    sq.reserve(per_j.size());
    for (const auto& [j, sum_k] : per_j) {
        const double v = std::exp2(s * j) * sum_k;
        sq.push_back(v * v);
    }
    return std::sqrt(pairwise_sum(sq));
}

inline double xsb1_norm(const SpacetimeField& f, double s, double b,
                        const PhaseParams& params) {
    require_modulation_admissible(f, "norm[Xsb1]");
    return besov_from_blocks(decompose(f, params).masses, s, b);
}

inline double y_norm(const SpacetimeField& f) {
    const std::size_t M = f.grid.m_points;
    std::vector<double> col(M);
    std::vector<double> outer(f.grid.n_xi());
    for (std::size_t m = 0; m < f.grid.n_xi(); ++m) {
        for (std::size_t i = 0; i < M; ++i) col[i] = std::abs(f.at(m, i));
        // Trapezoid rule on the uniform τ lattice.
        const double inner =
            (pairwise_sum(col) - 0.5 * (col.front() + col.back())) * f.grid.dtau;
        const double w = std::pow(bracket(f.grid.xi(m)), -0.75);
        outer[m] = w * inner * w * inner;
    }
    return std::sqrt(pairwise_sum(outer) * f.grid.space.dxi());
}

}  // namespace detail

inline double norm(const SpacetimeField& f, const NormSpec& spec,
                   const PhaseParams& params = PhaseParams()) {
    switch (spec.variant) {
        case NormSpec::Variant::XSB:
            return detail::weighted_l2(f, spec.s, spec.b, params);
        case NormSpec::Variant::XSB1:
            return detail::xsb1_norm(f, spec.s, spec.b, params);
        case NormSpec::Variant::XMOD: {
            detail::require_modulation_admissible(f, "norm[Xmod]");
            const BlockDecomposition blocks = decompose(f, params);
            const double besov_part = detail::besov_from_blocks(blocks.dc_masses, -0.75, 0.5);
            const double d_part =
                detail::weighted_l2(restrict_region_D(f, true), -0.75, 0.5, params);
            return besov_part + d_part;
        }
        case NormSpec::Variant::Y:
            return detail::y_norm(f);
        case NormSpec::Variant::HS:
            return detail::weighted_l2(f, spec.s, 0.0, params);
    }
    throw std::logic_error("norm: unreachable");
}

// ── embedding-ratio probe ──────────────────────────────────────────────────

// Three inequalities of the embedding chain, reported as LHS/RHS ratios:
//   mod_vs_xsb   : ‖F‖_{Xmod}           vs ‖F‖_{Xsb(−3/4, b)}   (needs b > 1/2)
//   l2_vs_mod    : ‖⟨ξ⟩^{−3/4}F‖_{L²}   vs ‖F‖_{Xmod}            (L^p_τ at p = 2)
//   y_vs_besov   : ‖F‖_Y                vs ‖F‖_{Xsb1(−3/4, 1/2)}
// Zero denominators with zero numerators report ratio 0.
struct EmbeddingRatios {
    double mod_vs_xsb = 0.0;
    double l2_vs_mod = 0.0;
    double y_vs_besov = 0.0;
};

inline EmbeddingRatios probe_embedding(const SpacetimeField& f, double b,
                                       const PhaseParams& params = PhaseParams()) {
    if (!(b > 0.5))
        throw std::invalid_argument("probe_embedding: requires b > 1/2");
    const auto ratio = [](double num, double den) {
        if (den == 0.0 && num == 0.0) return 0.0;
        return num / den;
    };
    EmbeddingRatios r;
    const double xmod = norm(f, NormSpec::xmod(), params);
    r.mod_vs_xsb = ratio(xmod, norm(f, NormSpec::xsb(-0.75, b), params));
    r.l2_vs_mod = ratio(norm(f, NormSpec::hs(-0.75), params), xmod);
    r.y_vs_besov = ratio(norm(f, NormSpec::y(), params),
                         norm(f, NormSpec::xsb1(-0.75, 0.5), params));
    return r;
}

// ── windowed restriction-norm upper bound ──────────────────────────────────

// Smooth time cutoff: ≡ 1 on [0, 1], supported in [−1, 2], cosine ramps.
inline double time_cutoff(double r) {
    if (r >= 0.0 && r <= 1.0) return 1.0;
    if (r > 1.0 && r < 2.0) {
        const double c = std::cos(0.5 * std::numbers::pi * (r - 1.0));
        return c * c;
    }
    if (r < 0.0 && r > -1.0) {
        const double c = std::cos(0.5 * std::numbers::pi * r);
        return c * c;
    }
    return 0.0;
}

// Upper bound for the restriction norm on [−T, T]: evaluates the modified
// norm of ψ(|t|/T)·u(t), where ψ is the cutoff above (so the even window is
// ≡ 1 on [−T, T] and supported in [−2T, 2T]) and u is read from uniformly-
// stamped states (dt apart), extended over the window's support by the free
// group from the nearest stamp (exact for linear trajectories).  The windowed
// field agrees with u on [−T, T], i.e. it is one particular extension — hence
// an upper bound for the infimum over all extensions.
//
// Discretization: the time transform is evaluated in the rotating frame.
// With v̂(t, ξ) = e^{+itp(ξ)} û(t, ξ) (constant in t for free evolution),
//   𝓕_t[ψ(·/T) û](τ, ξ) = ∫ ψ(t/T) v̂(t, ξ) e^{i(τ−p(ξ))t} dt = Ṽ(τ−p(ξ), ξ),
// so sampling Ṽ on a uniform modulation lattice μ_q captures the norm weights
// ⟨τ−p⟩ exactly and avoids aliasing the fast phase e^{−itp(ξ)}, whose rate at
// the largest grid frequencies would otherwise exceed any affordable time
// Nyquist rate.  ψ·v̂ itself varies on the window/nonlinear time scale, far
// below the lattice Nyquist π·M_t/(4T).
inline double restriction_norm_upper(const std::vector<SpectralState>& states,
                                     double dt, double T,
                                     const PhaseParams& params = PhaseParams(),
                                     std::size_t time_samples = 256) {
    if (!(T > 0.0)) throw std::domain_error("restriction_norm_upper: T must be > 0");
    if (states.empty())
        throw std::invalid_argument("restriction_norm_upper: empty trajectory");
    if (!(dt > 0.0))
        throw std::invalid_argument("restriction_norm_upper: dt must be > 0");
    const std::size_t Mt = time_samples;
    if (Mt < 8 || Mt > 4096 || (Mt & (Mt - 1)) != 0)
        throw std::invalid_argument(
            "restriction_norm_upper: time_samples must be a power of two in [8, 4096]");
    const SpaceGrid space = states.front().grid;
    for (const auto& s : states) {
        if (!(s.grid == space))
            throw std::invalid_argument("restriction_norm_upper: mixed grids");
        if (!s.is_mean_zero())
            throw std::domain_error("restriction_norm_upper: states must be mean-zero");
    }

    const double dtw = 4.0 * T / static_cast<double>(Mt);
    const double t0 = states.front().time;
    const std::size_t n = space.n_points;
    const std::size_t z = space.zero_index();

    // Rotating-frame envelopes e^{+it_n p(ξ)}·û_n(ξ) for the stamps actually
    // referenced by window samples (free extension = hold nearest envelope).
    std::map<std::size_t, std::vector<std::complex<double>>> envelope;
    const auto envelope_of = [&](std::size_t idx) -> const std::vector<std::complex<double>>& {
        auto it = envelope.find(idx);
        if (it != envelope.end()) return it->second;
        const SpectralState& st = states[idx];
        std::vector<std::complex<double>> env(n, std::complex<double>(0.0));
        for (std::size_t m = 0; m < n; ++m) {
            if (m == z) continue;
            const long double theta = static_cast<long double>(st.time) *
                                      phase_l(space.frequency(m), params);
            const long double w =
                std::remainder(theta, 2.0L * 3.14159265358979323846264338327950288L);
            env[m] = st.coeffs[m] *
                     std::complex<double>(static_cast<double>(std::cos(w)),
                                          static_cast<double>(std::sin(w)));
        }
        return envelope.emplace(idx, std::move(env)).first->second;
    };

    // ψ(|t|/T)·v̂ sampled on t_i = −2T + i·dtw, i = 0..M_t−1 (covers [−2T, 2T)).
    std::vector<std::vector<std::complex<double>>> samples(Mt);
    for (std::size_t i = 0; i < Mt; ++i) {
        const double t = -2.0 * T + dtw * static_cast<double>(i);
        const double w = time_cutoff(std::abs(t) / T);
        if (w == 0.0) {
            samples[i].assign(n, 0.0);
            continue;
        }
        const double idx_f = (t - t0) / dt;
        std::size_t idx = 0;
        if (idx_f > 0.0)
            idx = std::min(states.size() - 1,
                           static_cast<std::size_t>(std::llround(idx_f)));
        samples[i] = envelope_of(idx);
        for (auto& c : samples[i]) c *= w;
    }

    // Per ξ: Ṽ(μ_q) = dtw·e^{−iμ_q T}·Σ_i g_i e^{2πiqi/M_t}, μ_q = Δμ·q with
    // Δμ = 2π/(M_t·dtw), q signed.  Then accumulate the modified norm with
    // modulation μ_q and τ = p(ξ) + μ_q for the region-D test.
    const double dmu = 2.0 * std::numbers::pi / (static_cast<double>(Mt) * dtw);
    const double area = dmu * space.dxi();
    std::map<std::pair<int, int>, double> dc_mass2;
    std::vector<double> d_terms;
    std::vector<std::complex<double>> column(Mt);
    for (std::size_t m = 0; m < n; ++m) {
        if (m == z) continue;
        const double xi = space.frequency(m);
        const int j = dyadic_index_xi(xi);
        const double p = phase(xi, params);
        for (std::size_t i = 0; i < Mt; ++i) column[i] = samples[i][m];
        dft_1d(column, FFTW_BACKWARD);
        for (std::size_t q_idx = 0; q_idx < Mt; ++q_idx) {
            const long long q = static_cast<long long>(q_idx) -
                                static_cast<long long>(Mt / 2);
            const double mu = dmu * static_cast<double>(q);
            const std::size_t fft_bin = (q_idx + Mt / 2) % Mt;
            const std::complex<double> val =
                dtw * std::exp(std::complex<double>(0.0, -mu * 2.0 * T)) *
                column[fft_bin];
            const double w2 = std::norm(val) * area;
            if (w2 == 0.0) continue;
            if (in_region_D(p + mu, xi)) {
                d_terms.push_back(std::pow(bracket(xi), -1.5) * bracket(mu) * w2);
            } else {
                dc_mass2[{j, std::ilogb(bracket(mu))}] += w2;
            }
        }
    }
    std::map<std::pair<int, int>, double> dc_masses;
    for (const auto& [jk, v] : dc_mass2) dc_masses[jk] = std::sqrt(v);
    return detail::besov_from_blocks(dc_masses, -0.75, 0.5) +
           std::sqrt(pairwise_sum(d_terms));
}

}  // namespace speclab
