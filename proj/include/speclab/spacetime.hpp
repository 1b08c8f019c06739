#pragma once
// Spacetime (τ, ξ) lattices, the low-frequency/high-modulation region D,
// dyadic shell indices, and the block decomposition underlying every norm.
//
// The τ lattice is uniform and centered: τ_i = (i − M/2)·Δτ.  The ξ lattice
// is the ascending frequency list of a SpaceGrid.  A field's ξ = 0 column is
// special: the modulation weight ⟨τ − p(ξ)⟩ is undefined there, so any
// operation that classifies by modulation requires that column to vanish.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "grid.hpp"
#include "summation.hpp"

namespace speclab {

// ── dyadic shell indices ───────────────────────────────────────────────────

// j with 2^j ≤ ⟨ξ⟩ < 2^{j+1} (⟨0⟩ = 1 → j = 0).
inline int dyadic_index_xi(double xi) { return std::ilogb(bracket(xi)); }

// k with 2^k ≤ ⟨τ − p(ξ)⟩ < 2^{k+1}; the phase needs ξ ≠ 0.
inline int dyadic_index_mod(double tau, double xi,
                            const PhaseParams& params = PhaseParams()) {
    return std::ilogb(bracket(tau - phase(xi, params)));
}

// ── region D ───────────────────────────────────────────────────────────────

// D = { |ξ| ≤ 1/8, |τ| ≥ |ξ|^{−3} }; ξ = 0 is excluded (the threshold is
// infinite, unreachable on a finite lattice).
inline bool in_region_D(double tau, double xi) {
    if (xi == 0.0) return false;
    const double a = std::abs(xi);
    return a <= 0.125 && std::abs(tau) >= 1.0 / (a * a * a);
}

// ── spacetime lattice and fields ───────────────────────────────────────────

struct SpacetimeGrid {
    SpaceGrid space;
    std::size_t m_points;  // τ count M
    double dtau;

    SpacetimeGrid(SpaceGrid s, std::size_t m, double tau_extent)
        : space(s), m_points(m), dtau(2.0 * tau_extent / static_cast<double>(m)) {
        if (m < 8) throw std::domain_error("SpacetimeGrid: m_points must be >= 8");
        if ((m & (m - 1)) != 0)
            throw std::domain_error("SpacetimeGrid: m_points must be a power of two");
        if (!(tau_extent > 0.0))
            throw std::domain_error("SpacetimeGrid: tau_extent must be positive");
    }

    // Default τ extent: 4·max(|ξ|³ + |ξ|^{−1}) over nonzero grid frequencies,
    // so the characteristic curve τ = p(ξ) fits inside the box and modulation
    // weights are not truncation-biased.
    static double default_tau_extent(const SpaceGrid& s) {
        double m = 0.0;
        for (std::size_t i = 0; i < s.n_points; ++i) {
            const double xi = std::abs(s.frequency(i));
            if (xi == 0.0) continue;
            m = std::max(m, xi * xi * xi + 1.0 / xi);
        }
        return 4.0 * m;
    }

    static SpacetimeGrid standard(SpaceGrid s, std::size_t m) {
        return SpacetimeGrid(s, m, default_tau_extent(s));
    }

    double tau(std::size_t i) const {
        return dtau * (static_cast<double>(i) - static_cast<double>(m_points / 2));
    }
    double xi(std::size_t m) const { return space.frequency(m); }
    std::size_t n_xi() const { return space.n_points; }
    double cell_area() const { return dtau * space.dxi(); }

    bool operator==(const SpacetimeGrid& o) const {
        return space == o.space && m_points == o.m_points && dtau == o.dtau;
    }
};

struct SpacetimeField {
    SpacetimeGrid grid;
    std::vector<std::complex<double>> values;  // ξ-major: index = m·M + i

    explicit SpacetimeField(SpacetimeGrid g)
        : grid(g), values(g.n_xi() * g.m_points) {}

    std::complex<double>& at(std::size_t m_xi, std::size_t i_tau) {
        return values[m_xi * grid.m_points + i_tau];
    }
    const std::complex<double>& at(std::size_t m_xi, std::size_t i_tau) const {
        return values[m_xi * grid.m_points + i_tau];
    }

    bool zero_frequency_column_vanishes() const {
        const std::size_t z = grid.space.zero_index();
        for (std::size_t i = 0; i < grid.m_points; ++i)
            if (at(z, i) != std::complex<double>(0.0)) return false;
        return true;
    }

    void zero_out_mean_column() {
        const std::size_t z = grid.space.zero_index();
        for (std::size_t i = 0; i < grid.m_points; ++i) at(z, i) = 0.0;
    }

    double l2_norm() const {
        std::vector<double> terms(values.size());
        for (std::size_t idx = 0; idx < values.size(); ++idx)
            terms[idx] = std::norm(values[idx]);
        return std::sqrt(pairwise_sum(terms) * grid.cell_area());
    }

    SpacetimeField& operator*=(double c) {
        for (auto& v : values) v *= c;
        return *this;
    }
};

// Zero the field outside (keep_inside = true) or inside region D.
inline SpacetimeField restrict_region_D(const SpacetimeField& f, bool keep_inside) {
    SpacetimeField out = f;
    for (std::size_t m = 0; m < f.grid.n_xi(); ++m) {
        const double xi = f.grid.xi(m);
        for (std::size_t i = 0; i < f.grid.m_points; ++i)
            if (in_region_D(f.grid.tau(i), xi) != keep_inside) out.at(m, i) = 0.0;
    }
    return out;
}

// ── block decomposition ────────────────────────────────────────────────────

// Per-(j, k) L² norms over the shells A_j ∩ B_k, with the D / D^c split.
// The squares of `masses` partition the squared L² norm, as do d² + dc².
struct BlockDecomposition {
    std::map<std::pair<int, int>, double> masses;     // full-plane block L² norms
    std::map<std::pair<int, int>, double> dc_masses;  // restricted to D^c
    double d_mass = 0.0;    // L² norm on D
    double dc_mass = 0.0;   // L² norm on D^c
    double total = 0.0;     // overall L² norm

    double mass(int j, int k) const {
        const auto it = masses.find({j, k});
        return it == masses.end() ? 0.0 : it->second;
    }
};

// CSV form: header "j,k,mass" then one row per populated block, j-major
// ascending (map order), full double precision.
inline std::string to_csv(const BlockDecomposition& d) {
    std::string out = "j,k,mass\n";
    char buf[64];
    for (const auto& [jk, mass] : d.masses) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", jk.first, jk.second, mass);
        out += buf;
    }
    return out;
}

inline BlockDecomposition decompose(const SpacetimeField& f,
                                    const PhaseParams& params = PhaseParams()) {
    if (!f.zero_frequency_column_vanishes())
        throw std::domain_error(
            "decompose: nonzero xi = 0 column (modulation shells undefined there)");
    const double area = f.grid.cell_area();
    std::map<std::pair<int, int>, double> mass2, dc_mass2;
    double d2 = 0.0, dc2 = 0.0;
    std::vector<double> all_terms;
    all_terms.reserve(f.values.size());
    const std::size_t z = f.grid.space.zero_index();
    for (std::size_t m = 0; m < f.grid.n_xi(); ++m) {
        if (m == z) continue;
        const double xi = f.grid.xi(m);
        const int j = dyadic_index_xi(xi);
        for (std::size_t i = 0; i < f.grid.m_points; ++i) {
            const double w = std::norm(f.at(m, i)) * area;
            if (w == 0.0) continue;
            const double tau = f.grid.tau(i);
            const int k = dyadic_index_mod(tau, xi, params);
            mass2[{j, k}] += w;
            all_terms.push_back(w);
            if (in_region_D(tau, xi)) {
                d2 += w;
            } else {
                dc2 += w;
                dc_mass2[{j, k}] += w;
            }
        }
    }
    BlockDecomposition out;
    for (const auto& [jk, v] : mass2) out.masses[jk] = std::sqrt(v);
    for (const auto& [jk, v] : dc_mass2) out.dc_masses[jk] = std::sqrt(v);
    out.d_mass = std::sqrt(d2);
    out.dc_mass = std::sqrt(dc2);
    out.total = std::sqrt(pairwise_sum(all_terms));
    return out;
}

}  // namespace speclab
