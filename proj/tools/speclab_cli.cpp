// Reproducible experiment runner: every probe and experiment in the library
// is a subcommand that writes plot-ready CSV plus a JSON manifest (inputs,
// seed, content hashes — no timestamps, so identical configs produce
// byte-identical artifacts).  Configuration comes from a flat key=value file
// (--config) with command-line overrides winning.  Exit codes: 0 ok,
// 2 config error, 3 numerical divergence.
#include <CLI11.hpp>
#include <json.hpp>

#include <speclab/bilinear.hpp>
#include <speclab/counterexample.hpp>
#include <speclab/identities.hpp>
#include <speclab/norms.hpp>
#include <speclab/report.hpp>
#include <speclab/rng.hpp>
#include <speclab/solver.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace speclab;

constexpr const char* kLibraryVersion = "1.0.0";

const std::vector<std::pair<std::string, std::string>>& catalog() {
    static const std::vector<std::pair<std::string, std::string>> c = {
        {"identities", "verify phase/resonance identities on random frequency samples"},
        {"gamma-seq", "descending logarithmic sequence partial-sum bound sweep"},
        {"norms", "evaluate spacetime norms of a deterministic trial field"},
        {"probe-conv", "probe one weighted convolution estimate across shells"},
        {"probe-bilinear", "probe one dyadic bilinear case across output shells"},
        {"counterexample", "indicator-shape scaling sweeps certifying estimate failure"},
        {"solve", "integrate the dispersive evolution and export the trajectory"},
        {"picard", "fixed-point iteration diagnostics for the integral map"},
        {"kdv-limit", "vanishing-rotation comparison against the dispersive core"},
        {"scaling-check", "weak-norm contraction under the exact rescaling law"},
        {"lipschitz", "data-to-solution stability quotient across perturbation sizes"},
    };
    return c;
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1,
                               diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

std::string nearest_subcommand(const std::string& name) {
    std::string best;
    std::size_t best_d = std::string::npos;
    for (const auto& [sub, desc] : catalog()) {
        const std::size_t d = levenshtein(name, sub);
        if (d < best_d) {
            best_d = d;
            best = sub;
        }
    }
    return best;
}

// ── deterministic artifact plumbing ─────────────────────────────────────────

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct ArtifactSink {
    std::filesystem::path dir;
    json outputs = json::array();

    explicit ArtifactSink(const std::string& out_dir) : dir(out_dir) {
        std::filesystem::create_directories(dir);
    }

    void write(const std::string& name, const std::string& content) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + name);
        f << content;
        char hash[32];
        std::snprintf(hash, sizeof hash, "0x%016llx",
                      static_cast<unsigned long long>(fnv1a64(content)));
        outputs.push_back(
            {{"file", name}, {"bytes", content.size()}, {"fnv1a64", hash}});
    }
};

int finish(ArtifactSink& sink, const std::string& subcommand, std::uint64_t seed,
           const json& config, const json& summary, bool divergence) {
    json manifest;
    manifest["subcommand"] = subcommand;
    manifest["seed"] = seed;
    manifest["config"] = config;
    manifest["library_version"] = kLibraryVersion;
    manifest["outputs"] = sink.outputs;
    manifest["summary"] = summary;
    manifest["status"] = divergence ? "divergence" : "ok";
    std::ofstream f(sink.dir / "manifest.json", std::ios::binary);
    f << manifest.dump(2) << "\n";
    return divergence ? 3 : 0;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> parse_double_list(const std::string& text, const char* field) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str())
            throw std::invalid_argument(std::string(field) + ": cannot parse '" +
                                        item + "'");
        out.push_back(v);
    }
    if (out.empty())
        throw std::invalid_argument(std::string(field) + ": empty list");
    return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* field) {
    std::vector<int> out;
    for (double v : parse_double_list(text, field))
        out.push_back(static_cast<int>(std::llround(v)));
    return out;
}

// ── shared option blocks ────────────────────────────────────────────────────

struct CommonOpts {
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    std::string config_file;  // consumed by the pre-pass; kept so parsing accepts it
};

void add_common(CLI::App* sub, CommonOpts& c) {
    sub->add_option("--out", c.out_dir, "output directory for artifacts")
        ->capture_default_str();
    sub->add_option("--seed", c.seed, "64-bit experiment seed")->capture_default_str();
    sub->add_option("--config", c.config_file,
                    "flat key=value config file (command line wins)");
}

struct DataOpts {
    std::string data = "gaussian";
    std::string data_csv;
    std::size_t n = 256;
    double length = 0.0;  // 0 → library standard period
    double amplitude = 0.1;
    double width = 2.0;
    double band_lo = 0.03125;
    double band_hi = 1.0;
};

void add_data(CLI::App* sub, DataOpts& d) {
    sub->add_option("--data", d.data,
                    "initial data: gaussian | sech2 | random-band")
        ->capture_default_str();
    sub->add_option("--data-csv", d.data_csv,
                    "load initial data from CSV rows 'x,u' (overrides --data)");
    sub->add_option("--n", d.n, "grid points (power of two >= 8)")
        ->capture_default_str();
    sub->add_option("--length", d.length,
                    "domain period (0 selects the library standard)")
        ->capture_default_str();
    sub->add_option("--amplitude", d.amplitude, "built-in data amplitude")
        ->capture_default_str();
    sub->add_option("--width", d.width, "built-in data width")->capture_default_str();
    sub->add_option("--band-lo", d.band_lo, "random-band lower frequency")
        ->capture_default_str();
    sub->add_option("--band-hi", d.band_hi, "random-band upper frequency")
        ->capture_default_str();
}

SpectralState make_data(const DataOpts& d, std::uint64_t seed) {
    if (!d.data_csv.empty()) {
        std::ifstream f(d.data_csv);
        if (!f)
            throw std::invalid_argument("data-csv: cannot open '" + d.data_csv + "'");
        return load_initial_csv(f);
    }
    const SpaceGrid grid =
        d.length > 0.0 ? SpaceGrid(d.n, d.length) : SpaceGrid::standard(d.n);
    if (d.data == "gaussian") return gaussian_state(grid, d.amplitude, d.width);
    if (d.data == "sech2") return sech2_state(grid, d.amplitude, d.width);
    if (d.data == "random-band")
        return random_band_state(grid, d.band_lo, d.band_hi, seed);
    throw std::invalid_argument("data: unknown built-in '" + d.data +
                                "' (gaussian | sech2 | random-band)");
}

json data_config(const DataOpts& d) {
    json j;
    j["data"] = d.data_csv.empty() ? d.data : ("csv:" + d.data_csv);
    j["n"] = d.n;
    j["length"] = d.length;
    j["amplitude"] = d.amplitude;
    j["width"] = d.width;
    j["band_lo"] = d.band_lo;
    j["band_hi"] = d.band_hi;
    return j;
}

// ── enum name maps ──────────────────────────────────────────────────────────

ConvolutionEstimate parse_estimate(std::string name) {
    std::transform(name.begin(), name.end(), name.begin(), ::toupper);
    static const std::map<std::string, ConvolutionEstimate> m = {
        {"INPUT_SEP_NONRESONANT_QUARTER", ConvolutionEstimate::INPUT_SEP_NONRESONANT_QUARTER},
        {"INPUT_SEP_NONRESONANT_HALF", ConvolutionEstimate::INPUT_SEP_NONRESONANT_HALF},
        {"INPUT_SEP_RESONANT_QUARTER", ConvolutionEstimate::INPUT_SEP_RESONANT_QUARTER},
        {"INPUT_SEP_RESONANT_HALF", ConvolutionEstimate::INPUT_SEP_RESONANT_HALF},
        {"INPUT_SEP_ANY_HALF", ConvolutionEstimate::INPUT_SEP_ANY_HALF},
        {"OUTPUT_REGION_NONRESONANT_QUARTER", ConvolutionEstimate::OUTPUT_REGION_NONRESONANT_QUARTER},
        {"OUTPUT_REGION_NONRESONANT_HALF", ConvolutionEstimate::OUTPUT_REGION_NONRESONANT_HALF},
        {"OUTPUT_REGION_RESONANT_QUARTER", ConvolutionEstimate::OUTPUT_REGION_RESONANT_QUARTER},
        {"OUTPUT_REGION_RESONANT_HALF", ConvolutionEstimate::OUTPUT_REGION_RESONANT_HALF},
        {"OUTPUT_REGION_ANY_HALF", ConvolutionEstimate::OUTPUT_REGION_ANY_HALF},
    };
    const auto it = m.find(name);
    if (it == m.end()) {
        std::string best;
        std::size_t best_d = std::string::npos;
        for (const auto& [k, v] : m)
            if (levenshtein(name, k) < best_d) {
                best_d = levenshtein(name, k);
                best = k;
            }
        throw std::invalid_argument("estimate: unknown '" + name +
                                    "'; nearest is '" + best + "'");
    }
    return it->second;
}

DyadicCase parse_case(std::string name) {
    std::transform(name.begin(), name.end(), name.begin(), ::tolower);
    std::replace(name.begin(), name.end(), '-', '_');
    static const std::map<std::string, DyadicCase> m = {
        {"all_low", DyadicCase::ALL_LOW},
        {"output_bottom", DyadicCase::OUTPUT_BOTTOM},
        {"right_bottom", DyadicCase::RIGHT_BOTTOM},
        {"left_bottom", DyadicCase::LEFT_BOTTOM},
        {"balanced_inputs", DyadicCase::BALANCED_INPUTS},
        {"output_matches_left", DyadicCase::OUTPUT_MATCHES_LEFT},
        {"output_matches_right", DyadicCase::OUTPUT_MATCHES_RIGHT},
        {"all_comparable", DyadicCase::ALL_COMPARABLE},
    };
    const auto it = m.find(name);
    if (it == m.end())
        throw std::invalid_argument("case: unknown '" + name +
                                    "' (all_low, output_bottom, right_bottom, "
                                    "left_bottom, balanced_inputs, "
                                    "output_matches_left, output_matches_right, "
                                    "all_comparable)");
    return it->second;
}

SignPattern parse_signs(std::string name) {
    std::transform(name.begin(), name.end(), name.begin(), ::tolower);
    if (name == "any") return SignPattern::ANY;
    if (name == "same") return SignPattern::SAME;
    if (name == "opposite") return SignPattern::OPPOSITE;
    throw std::invalid_argument("signs: unknown '" + name +
                                "' (any | same | opposite)");
}

// ── subcommand runners ──────────────────────────────────────────────────────

int run_identities(const CommonOpts& common, std::size_t samples) {
    if (samples == 0) throw std::invalid_argument("samples: must be positive");
    counter_rng rng(common.seed);
    const auto random_frequency = [&]() {
        const double mag = std::exp2(rng.uniform(-10.0, 10.0));
        return rng.uniform01() < 0.5 ? -mag : mag;
    };
    const auto random_triple = [&](bool with_taus) {
        for (;;) {
            const double x1 = random_frequency();
            const double x2 = random_frequency();
            if (x1 + x2 == 0.0) continue;
            if (!with_taus) return FrequencyTriple(x1, x2);
            return FrequencyTriple(x1, x2, rng.uniform(-1e6, 1e6),
                                   rng.uniform(-1e6, 1e6));
        }
    };

    struct Row {
        const char* name;
        double worst = 0.0;
        std::size_t violations = 0;
    };
    std::vector<Row> rows = {{"quartered_phase"},      {"phase_increment"},
                             {"resonance_closed_form"}, {"modulation_sum"},
                             {"modulation_difference"}, {"resonance_sandwich"}};
    for (std::size_t i = 0; i < samples; ++i) {
        const double a = random_frequency();
        const double b = random_frequency();
        rows[0].worst = std::max(rows[0].worst,
                                 quartered_phase_identity(a, b).relative_residual());
        rows[1].worst = std::max(rows[1].worst,
                                 phase_increment_identity(a, b).relative_residual());

        const FrequencyTriple t = random_triple(true);
        rows[2].worst =
            std::max(rows[2].worst, resonance_identity(t).relative_residual());
        rows[3].worst =
            std::max(rows[3].worst, modulation_sum_identity(t).relative_residual());
        const double xi = t.xi(), xi1 = t.xi1;
        if (xi != 0.0 && xi1 != 0.0 && xi - xi1 != 0.0)
            rows[4].worst = std::max(
                rows[4].worst,
                modulation_difference_identity(xi, xi1, t.tau(), t.tau1)
                    .relative_residual());

        const resonance_sandwich sw = resonance_bounds(t);
        const double h = std::abs(resonance(t));
        if (!(sw.lower * (1.0 - 1e-12) <= h && h <= sw.upper * (1.0 + 1e-12))) {
            rows[5].violations += 1;
            rows[5].worst = std::max(
                rows[5].worst, std::max(sw.lower - h, h - sw.upper) /
                                   (1.0 + h));
        }
    }

    std::string csv = "identity,samples,max_relative_residual,violations\n";
    double overall = 0.0;
    for (const Row& r : rows) {
        csv += std::string(r.name) + "," + std::to_string(samples) + "," +
               fmt17(r.worst) + "," + std::to_string(r.violations) + "\n";
        overall = std::max(overall, r.worst);
    }

    ArtifactSink sink(common.out_dir);
    sink.write("identities.csv", csv);
    json summary;
    summary["max_relative_residual"] = overall;
    summary["sandwich_violations"] = rows[5].violations;
    std::printf("identities: max relative residual %.3e over %zu samples, "
                "%zu sandwich violations\n",
                overall, samples, rows[5].violations);
    json config{{"samples", samples}};
    return finish(sink, "identities", common.seed, config, summary, false);
}

int run_gamma_seq(const CommonOpts& common, std::uint64_t j_min,
                  std::uint64_t j_max, std::uint64_t factor) {
    if (j_min < 16) throw std::invalid_argument("j-min: must be >= 16");
    if (j_max < j_min) throw std::invalid_argument("j-max: must be >= j-min");
    if (factor < 2) throw std::invalid_argument("factor: must be >= 2");

    std::string csv =
        "j,steps,partial_sum,terminal_in_range,doubling_lower_bound\n";
    const double bound = 0.5 * (std::sqrt(2.0) + 1.0);
    double worst = 0.0;
    bool all_within = true;
    std::size_t rows = 0;
    for (std::uint64_t j = j_min; j <= j_max; j *= factor) {
        const GammaSequence seq = gamma_sequence(j);
        csv += std::to_string(j) + "," + std::to_string(seq.steps()) + "," +
               fmt17(seq.partial_sum) + "," +
               (seq.terminal_in_range ? "1," : "0,") +
               (seq.doubling_lower_bound ? "1" : "0") + "\n";
        if (seq.terminal_in_range) {
            worst = std::max(worst, seq.partial_sum);
            all_within = all_within && seq.partial_sum <= bound;
        }
        ++rows;
        if (j > j_max / factor) break;  // avoid overflow on the last multiply
    }

    ArtifactSink sink(common.out_dir);
    sink.write("gamma_seq.csv", csv);
    json summary;
    summary["rows"] = rows;
    summary["bound"] = bound;
    summary["max_partial_sum_in_range"] = worst;
    summary["all_within_bound"] = all_within;
    std::printf("gamma-seq: %zu rows, max in-range partial sum %.6f (bound %.5f)\n",
                rows, worst, bound);
    json config{{"j_min", j_min}, {"j_max", j_max}, {"factor", factor}};
    return finish(sink, "gamma-seq", common.seed, config, summary, false);
}

int run_norms(const CommonOpts& common, std::size_t n, std::size_t m, int shell,
              int k_max, const std::string& norm_list) {
    const SpacetimeGrid grid = SpacetimeGrid::standard(SpaceGrid::standard(n), m);
    const DyadicSupportSpec spec(shell, k_max);
    const SpacetimeField f =
        make_trial_field(grid, spec, PairSide::LEFT, common.seed, PhaseParams());

    std::vector<std::string> items;
    std::istringstream in(norm_list);
    std::string item;
    while (std::getline(in, item, ';'))
        if (!item.empty()) items.push_back(item);
    if (items.empty()) throw std::invalid_argument("norms: empty norm list");

    std::string csv = "norm,value\n";
    json values;
    for (const std::string& text : items) {
        const NormSpec ns = NormSpec::parse(text);
        const double v = norm(f, ns, PhaseParams());
        csv += text + "," + fmt17(v) + "\n";
        values[text] = v;
        std::printf("norms: %-24s = %.12g\n", text.c_str(), v);
    }

    ArtifactSink sink(common.out_dir);
    sink.write("norms.csv", csv);
    json summary;
    summary["values"] = values;
    summary["grid"] = {{"n", n}, {"m", m}, {"dxi", grid.space.dxi()},
                       {"dtau", grid.dtau}};
    json config{{"n", n}, {"m", m}, {"shell", shell}, {"k_max", k_max},
                {"norms", norm_list}};
    return finish(sink, "norms", common.seed, config, summary, false);
}

int run_probe_conv(const CommonOpts& common, const std::string& estimate_name,
                   const std::string& scales_text, std::size_t samples,
                   std::size_t n, std::size_t m, int left_shell, int right_shell,
                   int k_max, const std::string& signs_name, double separation) {
    const ConvolutionEstimate estimate = parse_estimate(estimate_name);
    const std::vector<int> scales = parse_int_list(scales_text, "scales");
    const SignPattern signs = parse_signs(signs_name);
    const SpacetimeGrid grid = SpacetimeGrid::standard(SpaceGrid::standard(n), m);
    const DyadicSupportSpec left(left_shell, k_max, signs, separation);
    const DyadicSupportSpec right(right_shell, k_max, signs, separation);

    const ProbeReport report = probe_convolution_estimate(
        grid, estimate, left, right, scales, samples, common.seed);

    ArtifactSink sink(common.out_dir);
    sink.write("probe_conv.csv", to_csv(report));
    sink.write("probe_conv.json", to_json(report));
    json summary;
    summary["growth_factor"] = report.growth_factor;
    summary["max_ratio_bounded"] = report.max_ratio_bounded;
    summary["grid_note"] = report.grid_note;
    std::printf("probe-conv: %s growth factor %.4f (%s)\n",
                to_string(estimate), report.growth_factor,
                report.max_ratio_bounded ? "bounded" : "exceeds 2x");
    json config{{"estimate", to_string(estimate)}, {"scales", scales_text},
                {"samples", samples}, {"n", n}, {"m", m},
                {"left_shell", left_shell}, {"right_shell", right_shell},
                {"k_max", k_max}, {"signs", signs_name},
                {"separation", separation}};
    return finish(sink, "probe-conv", common.seed, config, summary, false);
}

int run_probe_bilinear(const CommonOpts& common, const std::string& case_name,
                       const std::string& j_text, std::size_t samples,
                       std::size_t n, std::size_t m,
                       const std::string& target_name) {
    const DyadicCase probe_case = parse_case(case_name);
    const std::vector<int> j_values = parse_int_list(j_text, "j-list");
    std::string t = target_name;
    std::transform(t.begin(), t.end(), t.begin(), ::tolower);
    BilinearTarget target;
    if (t == "xmod") target = BilinearTarget::XMOD;
    else if (t == "y") target = BilinearTarget::Y;
    else throw std::invalid_argument("target: unknown '" + target_name +
                                     "' (xmod | y)");
    const SpacetimeGrid grid = SpacetimeGrid::standard(SpaceGrid::standard(n), m);

    const ProbeReport report = probe_dyadic_bilinear(grid, probe_case, j_values,
                                                     samples, common.seed, target);

    ArtifactSink sink(common.out_dir);
    sink.write("probe_bilinear.csv", to_csv(report));
    sink.write("probe_bilinear.json", to_json(report));
    json summary;
    summary["growth_factor"] = report.growth_factor;
    summary["max_ratio_bounded"] = report.max_ratio_bounded;
    summary["notes"] = report.notes;
    std::printf("probe-bilinear: %s growth factor %.4f (%s)\n", case_name.c_str(),
                report.growth_factor,
                report.max_ratio_bounded ? "bounded" : "exceeds 2x");
    json config{{"case", case_name}, {"j_list", j_text}, {"samples", samples},
                {"n", n}, {"m", m}, {"target", t}};
    return finish(sink, "probe-bilinear", common.seed, config, summary, false);
}

int run_counterexample(const CommonOpts& common, int example, double b,
                       const std::string& n_text) {
    const std::vector<double> n_list = parse_double_list(n_text, "n-list");
    CounterexampleRun run = [&] {
        if (example == 1) return counterexample_above_half(n_list, b);
        if (example == 2) return counterexample_below_half(n_list, b);
        throw std::invalid_argument("example: must be 1 or 2");
    }();

    std::string csv = "N,u_norm,v_norm,numerator,ratio\n";
    for (std::size_t i = 0; i < run.n_values.size(); ++i)
        csv += fmt17(run.n_values[i]) + "," + fmt17(run.u_norms[i]) + "," +
               fmt17(run.v_norms[i]) + "," + fmt17(run.numerators[i]) + "," +
               fmt17(run.report.max_ratios[i]) + "\n";

    ArtifactSink sink(common.out_dir);
    sink.write("counterexample.csv", csv);
    sink.write("counterexample.json", to_json(run.report));
    json summary;
    summary["ratio_slope"] = run.report.fit.slope;
    summary["reference_ratio_slope"] = run.reference_ratio_slope;
    summary["u_slope"] = run.u_fit.slope;
    summary["reference_u_slope"] = run.reference_u_slope;
    summary["v_slope"] = run.v_fit.slope;
    summary["reference_v_slope"] = run.reference_v_slope;
    std::printf("counterexample %d (b=%g): ratio slope %.4f (reference %.4f), "
                "u slope %.4f, v slope %.4f\n",
                example, b, run.report.fit.slope, run.reference_ratio_slope,
                run.u_fit.slope, run.v_fit.slope);
    json config{{"example", example}, {"b", b}, {"n_list", n_text}};
    return finish(sink, "counterexample", common.seed, config, summary, false);
}

SolverConfig build_solver_config(const SpaceGrid& grid, double dt, double horizon,
                                 double beta, double gamma,
                                 const std::string& scheme_name,
                                 const std::string& dealias_name,
                                 std::size_t iters) {
    std::string s = scheme_name, d = dealias_name;
    std::transform(s.begin(), s.end(), s.begin(), ::tolower);
    std::transform(d.begin(), d.end(), d.begin(), ::tolower);
    TimeScheme scheme;
    if (s == "if_rk4") scheme = TimeScheme::IF_RK4;
    else if (s == "picard") scheme = TimeScheme::PICARD;
    else throw std::invalid_argument("scheme: unknown '" + scheme_name +
                                     "' (if_rk4 | picard)");
    Dealias dealias;
    if (d == "two-thirds" || d == "two_thirds") dealias = Dealias::TWO_THIRDS;
    else if (d == "none") dealias = Dealias::NONE;
    else throw std::invalid_argument("dealias: unknown '" + dealias_name +
                                     "' (two-thirds | none)");
    return SolverConfig(grid, dt, horizon, PhaseParams(beta, gamma), scheme,
                        dealias, iters);
}

int run_solve(const CommonOpts& common, const DataOpts& data, double dt,
              double horizon, double beta, double gamma,
              const std::string& scheme_name, const std::string& dealias_name,
              std::size_t iters) {
    const SpectralState u0 = make_data(data, common.seed);
    const SolverConfig config = build_solver_config(
        u0.grid, dt, horizon, beta, gamma, scheme_name, dealias_name, iters);

    bool divergence = false;
    std::string diagnostic;
    Trajectory traj = [&] {
        if (config.scheme == TimeScheme::PICARD) {
            PicardResult r = solve_picard(u0, config);
            if (r.diagnostics.diverged) {
                divergence = true;
                diagnostic = "picard iteration diverged";
            }
            return std::move(r.trajectory);
        }
        Trajectory t = solve_if_rk4(u0, config);
        if (t.truncated) {
            divergence = true;
            diagnostic = t.diagnostic;
        }
        return t;
    }();

    std::ostringstream csv;
    trajectory_to_csv(traj, csv);
    json header = trajectory_manifest(traj);
    header["seed"] = common.seed;
    header["data"] = data.data_csv.empty() ? data.data : ("csv:" + data.data_csv);

    ArtifactSink sink(common.out_dir);
    sink.write("trajectory.csv", csv.str());
    sink.write("trajectory.json", header.dump(2) + "\n");

    const double l0 = l2_norm(traj.states.front());
    double drift = 0.0;
    for (const SpectralState& s : traj.states)
        drift = std::max(drift, std::abs(l2_norm(s) / l0 - 1.0));
    json summary;
    summary["states"] = traj.states.size();
    summary["l2_drift"] = drift;
    summary["truncated"] = traj.truncated;
    summary["diagnostic"] = traj.diagnostic;
    std::printf("solve: %zu states, L2 drift %.3e%s\n", traj.states.size(), drift,
                divergence ? " [divergence]" : "");
    if (divergence) std::fprintf(stderr, "numerical divergence: %s\n",
                                 diagnostic.c_str());

    json config_echo = data_config(data);
    config_echo["dt"] = dt;
    config_echo["T"] = horizon;
    config_echo["beta"] = beta;
    config_echo["gamma"] = gamma;
    config_echo["scheme"] = scheme_name;
    config_echo["dealias"] = dealias_name;
    config_echo["picard_iters"] = iters;
    return finish(sink, "solve", common.seed, config_echo, summary, divergence);
}

int run_picard(const CommonOpts& common, const DataOpts& data, double dt,
               double horizon, double beta, double gamma,
               const std::string& dealias_name, std::size_t iters) {
    const SpectralState u0 = make_data(data, common.seed);
    const SolverConfig config = build_solver_config(
        u0.grid, dt, horizon, beta, gamma, "picard", dealias_name, iters);
    const PicardResult r = solve_picard(u0, config);

    std::string csv = "iteration,increment,ratio\n";
    for (std::size_t i = 0; i < r.diagnostics.increments.size(); ++i) {
        csv += std::to_string(i + 1) + "," + fmt17(r.diagnostics.increments[i]) + ",";
        csv += (i == 0 ? std::string("nan")
                       : fmt17(r.diagnostics.ratios[i - 1])) + "\n";
    }

    ArtifactSink sink(common.out_dir);
    sink.write("picard.csv", csv);
    json summary;
    summary["iterations"] = r.diagnostics.iterations;
    summary["converged"] = r.diagnostics.converged;
    summary["diverged"] = r.diagnostics.diverged;
    summary["quadrature_resolution"] = r.diagnostics.quadrature_resolution;
    if (!r.diagnostics.increments.empty())
        summary["final_increment"] = r.diagnostics.increments.back();
    std::printf("picard: %zu iterations, %s\n", r.diagnostics.iterations,
                r.diagnostics.converged   ? "converged"
                : r.diagnostics.diverged ? "diverged"
                                         : "iteration cap reached");
    if (r.diagnostics.diverged)
        std::fprintf(stderr, "numerical divergence: picard iteration diverged\n");

    json config_echo = data_config(data);
    config_echo["dt"] = dt;
    config_echo["T"] = horizon;
    config_echo["beta"] = beta;
    config_echo["gamma"] = gamma;
    config_echo["dealias"] = dealias_name;
    config_echo["picard_iters"] = iters;
    return finish(sink, "picard", common.seed, config_echo, summary,
                  r.diagnostics.diverged);
}

int run_kdv_limit(const CommonOpts& common, const DataOpts& data, double dt,
                  double horizon, double beta, const std::string& gamma_text) {
    const std::vector<double> gammas = parse_double_list(gamma_text, "gamma-list");
    const SpectralState u0 = make_data(data, common.seed);
    const SolverConfig config(u0.grid, dt, horizon, PhaseParams(beta, 1.0));
    const std::vector<RotationLimitRow> rows =
        kdv_limit_experiment(u0, gammas, config);

    std::string csv = "gamma,error\n";
    bool monotone = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        csv += fmt17(rows[i].gamma) + "," + fmt17(rows[i].error) + "\n";
        if (i > 0 && !(rows[i].error < rows[i - 1].error)) monotone = false;
    }

    ArtifactSink sink(common.out_dir);
    sink.write("kdv_limit.csv", csv);
    json summary;
    summary["monotone_decreasing"] = monotone;
    summary["errors"] = json::array();
    for (const auto& r : rows)
        summary["errors"].push_back({{"gamma", r.gamma}, {"error", r.error}});
    std::printf("kdv-limit: %zu gammas, errors %s\n", rows.size(),
                monotone ? "strictly decreasing" : "NOT monotone");

    json config_echo = data_config(data);
    config_echo["dt"] = dt;
    config_echo["T"] = horizon;
    config_echo["beta"] = beta;
    config_echo["gamma_list"] = gamma_text;
    return finish(sink, "kdv-limit", common.seed, config_echo, summary, false);
}

int run_scaling_check(const CommonOpts& common, const DataOpts& data,
                      const std::string& lambda_text, double s) {
    const std::vector<double> lambdas = parse_double_list(lambda_text, "lambdas");
    for (double l : lambdas)
        if (!(l >= 1.0))
            throw std::invalid_argument("lambdas: every scale must be >= 1");
    const SpectralState u0 = make_data(data, common.seed);
    const double base = hs_norm(u0, s);

    std::string csv = "lambda,norm,bound,quotient\n";
    double c_max = 0.0;
    for (double l : lambdas) {
        const double nrm = hs_norm(rescale_initial(u0, l), s);
        const double bound = std::pow(l, s) * base;  // λ^s with s = −3/4
        csv += fmt17(l) + "," + fmt17(nrm) + "," + fmt17(bound) + "," +
               fmt17(nrm / bound) + "\n";
        c_max = std::max(c_max, nrm / bound);
    }

    ArtifactSink sink(common.out_dir);
    sink.write("scaling_check.csv", csv);
    json summary;
    summary["base_norm"] = base;
    summary["c_max"] = c_max;
    summary["bound_holds"] = c_max <= 1.0 + 1e-12;
    std::printf("scaling-check: max quotient vs lambda^{%g} bound = %.6f\n", s,
                c_max);
    json config_echo = data_config(data);
    config_echo["lambdas"] = lambda_text;
    config_echo["s"] = s;
    return finish(sink, "scaling-check", common.seed, config_echo, summary, false);
}

int run_lipschitz(const CommonOpts& common, const DataOpts& data, double dt,
                  double horizon, double beta, double gamma,
                  const std::string& delta_text, std::uint64_t w_seed) {
    const std::vector<double> deltas = parse_double_list(delta_text, "deltas");
    const SpectralState u0 = make_data(data, common.seed);
    const SpectralState w =
        random_band_state(u0.grid, data.band_lo, data.band_hi, w_seed);
    const SolverConfig config(u0.grid, dt, horizon, PhaseParams(beta, gamma));

    std::string csv = "delta,ratio\n";
    std::vector<double> ratios;
    for (double delta : deltas) {
        const double r = lipschitz_probe(u0, w, delta, config);
        csv += fmt17(delta) + "," + fmt17(r) + "\n";
        ratios.push_back(r);
    }
    double max_var = 0.0;
    for (std::size_t i = 1; i < ratios.size(); ++i)
        max_var = std::max(max_var, std::abs(ratios[i] / ratios[i - 1] - 1.0));

    ArtifactSink sink(common.out_dir);
    sink.write("lipschitz.csv", csv);
    json summary;
    summary["ratios"] = ratios;
    summary["max_relative_variation"] = max_var;
    summary["stable"] = max_var < 0.2;
    std::printf("lipschitz: %zu deltas, max variation %.4f (%s)\n", ratios.size(),
                max_var, max_var < 0.2 ? "stable" : "UNSTABLE");
    json config_echo = data_config(data);
    config_echo["dt"] = dt;
    config_echo["T"] = horizon;
    config_echo["beta"] = beta;
    config_echo["gamma"] = gamma;
    config_echo["deltas"] = delta_text;
    config_echo["w_seed"] = w_seed;
    return finish(sink, "lipschitz", common.seed, config_echo, summary, false);
}

// ── config file pre-pass ────────────────────────────────────────────────────

// Flat key=value lines; '#' comments.  Keys become --key options of the
// invoked subcommand unless the command line already provides them
// (command line wins).
std::vector<std::pair<std::string, std::string>> load_config_file(
    const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto strip = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key=value");
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config: empty key on line " +
                                        std::to_string(lineno));
        kv.emplace_back(key, value);
    }
    return kv;
}

void print_catalog() {
    std::printf("speclab experiments:\n");
    for (const auto& [sub, desc] : catalog())
        std::printf("  %-16s %s\n", sub.c_str(), desc.c_str());
    std::printf("\nrun 'speclab <experiment> --help' for the parameter table\n");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc == 1) {
        print_catalog();
        return 0;
    }

    // The first argument names the experiment (options must follow it).
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string sub_name;
    if (args[0].rfind("-", 0) != 0) sub_name = args[0];
    const bool known =
        std::any_of(catalog().begin(), catalog().end(),
                    [&](const auto& p) { return p.first == sub_name; });
    if (!sub_name.empty() && !known) {
        std::fprintf(stderr, "unknown experiment '%s'; did you mean '%s'?\n",
                     sub_name.c_str(), nearest_subcommand(sub_name).c_str());
        return 2;
    }

    // Config pre-pass: inject file values as options unless already given.
    try {
        std::string config_path;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size())
                config_path = args[i + 1];
            else if (args[i].rfind("--config=", 0) == 0)
                config_path = args[i].substr(9);
        }
        if (!config_path.empty() && known) {
            const auto kv = load_config_file(config_path);
            const auto user_has = [&](const std::string& key) {
                const std::string flag = "--" + key;
                for (const std::string& a : args)
                    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
                return false;
            };
            std::vector<std::string> merged;
            merged.push_back(sub_name);
            for (const auto& [k, v] : kv)
                if (!user_has(k)) {
                    merged.push_back("--" + k);
                    merged.push_back(v);
                }
            merged.insert(merged.end(), args.begin() + 1, args.end());
            args = std::move(merged);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    CLI::App app{"spectral laboratory experiment runner"};
    app.require_subcommand(0, 1);

    // identities
    CommonOpts c_id;
    std::size_t id_samples = 100000;
    CLI::App* s_id = app.add_subcommand("identities", catalog()[0].second);
    add_common(s_id, c_id);
    s_id->add_option("--samples", id_samples, "random frequency samples")
        ->capture_default_str();

    // gamma-seq
    CommonOpts c_gs;
    std::uint64_t gs_min = 16, gs_max = 1ULL << 20, gs_factor = 2;
    CLI::App* s_gs = app.add_subcommand("gamma-seq", catalog()[1].second);
    add_common(s_gs, c_gs);
    s_gs->add_option("--j-min", gs_min, "first frequency scale (>= 16)")
        ->capture_default_str();
    s_gs->add_option("--j-max", gs_max, "last frequency scale")->capture_default_str();
    s_gs->add_option("--factor", gs_factor, "multiplicative step")
        ->capture_default_str();

    // norms
    CommonOpts c_no;
    std::size_t no_n = 64, no_m = 64;
    int no_shell = 0, no_kmax = 10;
    std::string no_list = "Xsb(s=-0.75,b=0.5);Xsb1(s=-0.75,b=0.5);Xmod;Y";
    CLI::App* s_no = app.add_subcommand("norms", catalog()[2].second);
    add_common(s_no, c_no);
    s_no->add_option("--n", no_n, "frequency columns")->capture_default_str();
    s_no->add_option("--m", no_m, "modulation rows")->capture_default_str();
    s_no->add_option("--shell", no_shell, "frequency shell of the trial field")
        ->capture_default_str();
    s_no->add_option("--k-max", no_kmax, "modulation shell cap")->capture_default_str();
    s_no->add_option("--norms", no_list, "semicolon-separated norm specs")
        ->capture_default_str();

    // probe-conv
    CommonOpts c_pc;
    std::string pc_estimate = "INPUT_SEP_NONRESONANT_HALF";
    std::string pc_scales = "1,2", pc_signs = "opposite";
    std::size_t pc_samples = 20, pc_n = 256, pc_m = 256;
    int pc_left = 1, pc_right = 1, pc_kmax = 30;
    double pc_sep = 2.0;
    CLI::App* s_pc = app.add_subcommand("probe-conv", catalog()[3].second);
    add_common(s_pc, c_pc);
    s_pc->add_option("--estimate", pc_estimate, "estimate name (see docs)")
        ->capture_default_str();
    s_pc->add_option("--scales", pc_scales, "comma-separated shell scales")
        ->capture_default_str();
    s_pc->add_option("--samples", pc_samples, "trial pairs per scale")
        ->capture_default_str();
    s_pc->add_option("--n", pc_n, "frequency columns")->capture_default_str();
    s_pc->add_option("--m", pc_m, "modulation rows")->capture_default_str();
    s_pc->add_option("--left-shell", pc_left, "left support shell")
        ->capture_default_str();
    s_pc->add_option("--right-shell", pc_right, "right support shell")
        ->capture_default_str();
    s_pc->add_option("--k-max", pc_kmax, "modulation shell cap")->capture_default_str();
    s_pc->add_option("--signs", pc_signs, "sign pattern: any | same | opposite")
        ->capture_default_str();
    s_pc->add_option("--separation", pc_sep, "minimum frequency separation")
        ->capture_default_str();

    // probe-bilinear
    CommonOpts c_pb;
    std::string pb_case = "balanced_inputs", pb_j = "0", pb_target = "xmod";
    std::size_t pb_samples = 30, pb_n = 256, pb_m = 256;
    CLI::App* s_pb = app.add_subcommand("probe-bilinear", catalog()[4].second);
    add_common(s_pb, c_pb);
    s_pb->add_option("--case", pb_case, "dyadic case name")->capture_default_str();
    s_pb->add_option("--j-list", pb_j, "comma-separated output shells")
        ->capture_default_str();
    s_pb->add_option("--samples", pb_samples, "trial pairs per shell")
        ->capture_default_str();
    s_pb->add_option("--n", pb_n, "frequency columns")->capture_default_str();
    s_pb->add_option("--m", pb_m, "modulation rows")->capture_default_str();
    s_pb->add_option("--target", pb_target, "output norm: xmod | y")
        ->capture_default_str();

    // counterexample
    CommonOpts c_ce;
    int ce_example = 1;
    double ce_b = 0.6;
    std::string ce_n = "64,128,256,512";
    CLI::App* s_ce = app.add_subcommand("counterexample", catalog()[5].second);
    add_common(s_ce, c_ce);
    s_ce->add_option("--example", ce_example, "1 (b > 1/2) or 2 (b < 1/2)")
        ->capture_default_str();
    s_ce->add_option("--b", ce_b, "modulation exponent")->capture_default_str();
    s_ce->add_option("--n-list", ce_n, "comma-separated frequency scales N")
        ->capture_default_str();

    // solve
    CommonOpts c_so;
    DataOpts d_so;
    double so_dt = 1e-3, so_T = 0.5, so_beta = -1.0, so_gamma = 1.0;
    std::string so_scheme = "if_rk4", so_dealias = "two-thirds";
    std::size_t so_iters = 20;
    CLI::App* s_so = app.add_subcommand("solve", catalog()[6].second);
    add_common(s_so, c_so);
    add_data(s_so, d_so);
    s_so->add_option("--dt", so_dt, "time step")->capture_default_str();
    s_so->add_option("--T", so_T, "time horizon in (0, 1]")->capture_default_str();
    s_so->add_option("--beta", so_beta, "dispersion coefficient (negative)")
        ->capture_default_str();
    s_so->add_option("--gamma", so_gamma, "rotation coefficient (>= 0)")
        ->capture_default_str();
    s_so->add_option("--scheme", so_scheme, "if_rk4 | picard")->capture_default_str();
    s_so->add_option("--dealias", so_dealias, "two-thirds | none")
        ->capture_default_str();
    s_so->add_option("--picard-iters", so_iters, "iteration cap for picard")
        ->capture_default_str();

    // picard
    CommonOpts c_pi;
    DataOpts d_pi;
    d_pi.n = 128;
    d_pi.amplitude = 0.05;
    double pi_dt = 2e-3, pi_T = 0.1, pi_beta = -1.0, pi_gamma = 1.0;
    std::string pi_dealias = "two-thirds";
    std::size_t pi_iters = 20;
    CLI::App* s_pi = app.add_subcommand("picard", catalog()[7].second);
    add_common(s_pi, c_pi);
    add_data(s_pi, d_pi);
    s_pi->add_option("--dt", pi_dt, "time step")->capture_default_str();
    s_pi->add_option("--T", pi_T, "time horizon in (0, 1]")->capture_default_str();
    s_pi->add_option("--beta", pi_beta, "dispersion coefficient (negative)")
        ->capture_default_str();
    s_pi->add_option("--gamma", pi_gamma, "rotation coefficient (>= 0)")
        ->capture_default_str();
    s_pi->add_option("--dealias", pi_dealias, "two-thirds | none")
        ->capture_default_str();
    s_pi->add_option("--iters", pi_iters, "iteration cap")->capture_default_str();

    // kdv-limit
    CommonOpts c_kl;
    DataOpts d_kl;
    d_kl.n = 128;
    double kl_dt = 1e-3, kl_T = 0.25, kl_beta = -1.0;
    std::string kl_gammas = "0.1,0.01,0.001";
    CLI::App* s_kl = app.add_subcommand("kdv-limit", catalog()[8].second);
    add_common(s_kl, c_kl);
    add_data(s_kl, d_kl);
    s_kl->add_option("--dt", kl_dt, "time step")->capture_default_str();
    s_kl->add_option("--T", kl_T, "time horizon in (0, 1]")->capture_default_str();
    s_kl->add_option("--beta", kl_beta, "dispersion coefficient (negative)")
        ->capture_default_str();
    s_kl->add_option("--gamma-list", kl_gammas,
                     "comma-separated rotation strengths, decreasing")
        ->capture_default_str();

    // scaling-check
    CommonOpts c_sc;
    DataOpts d_sc;
    d_sc.n = 128;
    d_sc.amplitude = 0.5;
    std::string sc_lambdas = "1,2,4,8,16,32,64";
    double sc_s = -0.75;
    CLI::App* s_sc = app.add_subcommand("scaling-check", catalog()[9].second);
    add_common(s_sc, c_sc);
    add_data(s_sc, d_sc);
    s_sc->add_option("--lambdas", sc_lambdas, "comma-separated scales >= 1")
        ->capture_default_str();
    s_sc->add_option("--s", sc_s, "Sobolev exponent of the checked norm")
        ->capture_default_str();

    // lipschitz
    CommonOpts c_li;
    DataOpts d_li;
    d_li.n = 128;
    double li_dt = 1e-3, li_T = 0.25, li_beta = -1.0, li_gamma = 1.0;
    std::string li_deltas = "1e-2,1e-3,1e-4";
    std::uint64_t li_wseed = 3;
    CLI::App* s_li = app.add_subcommand("lipschitz", catalog()[10].second);
    add_common(s_li, c_li);
    add_data(s_li, d_li);
    s_li->add_option("--dt", li_dt, "time step")->capture_default_str();
    s_li->add_option("--T", li_T, "time horizon in (0, 1]")->capture_default_str();
    s_li->add_option("--beta", li_beta, "dispersion coefficient (negative)")
        ->capture_default_str();
    s_li->add_option("--gamma", li_gamma, "rotation coefficient (>= 0)")
        ->capture_default_str();
    s_li->add_option("--deltas", li_deltas, "comma-separated perturbation sizes")
        ->capture_default_str();
    s_li->add_option("--w-seed", li_wseed, "seed of the perturbation direction")
        ->capture_default_str();

    // parse
    std::vector<const char*> cargv;
    cargv.push_back(argv[0]);
    for (const std::string& a : args) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()),
                  const_cast<char**>(cargv.data()));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (app.get_subcommands().empty()) {
        print_catalog();
        return 0;
    }

    try {
        if (s_id->parsed()) return run_identities(c_id, id_samples);
        if (s_gs->parsed()) return run_gamma_seq(c_gs, gs_min, gs_max, gs_factor);
        if (s_no->parsed())
            return run_norms(c_no, no_n, no_m, no_shell, no_kmax, no_list);
        if (s_pc->parsed())
            return run_probe_conv(c_pc, pc_estimate, pc_scales, pc_samples, pc_n,
                                  pc_m, pc_left, pc_right, pc_kmax, pc_signs,
                                  pc_sep);
        if (s_pb->parsed())
            return run_probe_bilinear(c_pb, pb_case, pb_j, pb_samples, pb_n, pb_m,
                                      pb_target);
        if (s_ce->parsed()) return run_counterexample(c_ce, ce_example, ce_b, ce_n);
        if (s_so->parsed())
            return run_solve(c_so, d_so, so_dt, so_T, so_beta, so_gamma, so_scheme,
                             so_dealias, so_iters);
        if (s_pi->parsed())
            return run_picard(c_pi, d_pi, pi_dt, pi_T, pi_beta, pi_gamma,
                              pi_dealias, pi_iters);
        if (s_kl->parsed())
            return run_kdv_limit(c_kl, d_kl, kl_dt, kl_T, kl_beta, kl_gammas);
        if (s_sc->parsed()) return run_scaling_check(c_sc, d_sc, sc_lambdas, sc_s);
        if (s_li->parsed())
            return run_lipschitz(c_li, d_li, li_dt, li_T, li_beta, li_gamma,
                                 li_deltas, li_wseed);
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::runtime_error& e) {
        std::fprintf(stderr, "numerical divergence: %s\n", e.what());
        return 3;
    }
    print_catalog();
    return 0;
}
