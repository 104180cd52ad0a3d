#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ssq/certify.hpp"
#include "ssq/csv.hpp"
#include "ssq/curves.hpp"
#include "ssq/dynamics.hpp"
#include "ssq/errors.hpp"
#include "ssq/moments.hpp"
#include "ssq/variational.hpp"
#include "ssq/version.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

struct CommonFlags {
    int two_j = 0;
    std::string spin_text;
    std::string output = "-";
    bool no_timestamp = false;
    std::string cache_dir_flag;
    std::uint64_t seed = 1;
};

void add_spin_flags(CLI::App* cmd, CommonFlags& c) {
    auto* tj = cmd->add_option("--two-j", c.two_j, "spin as 2J (integer, >= 1)");
    auto* sp = cmd->add_option("--spin", c.spin_text, "spin as J, e.g. 3/2 or 1.5 (sugar for --two-j)");
    tj->excludes(sp);
}

ssq::Spin resolve_spin(const CommonFlags& c) {
    if (c.two_j > 0) return ssq::Spin(c.two_j);
    if (c.spin_text.empty()) throw ssq::input_error("spin required: pass --two-j or --spin");
    const std::string& s = c.spin_text;
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const long num = std::strtol(s.substr(0, slash).c_str(), nullptr, 10);
        const long den = std::strtol(s.substr(slash + 1).c_str(), nullptr, 10);
        if (den == 2) return ssq::Spin(static_cast<int>(num));
        if (den == 1) return ssq::Spin(static_cast<int>(2 * num));
        throw ssq::input_error("cannot parse --spin '" + s + "': denominator must be 1 or 2");
    }
    const double j = ssq::io::parse_double(s);
    const double two_j = 2.0 * j;
    if (std::abs(two_j - std::lround(two_j)) > 1e-9)
        throw ssq::input_error("--spin must be an integer or half-integer, got '" + s + "'");
    return ssq::Spin(static_cast<int>(std::lround(two_j)));
}

std::optional<fs::path> resolve_cache_dir(const CommonFlags& c) {
    if (!c.cache_dir_flag.empty()) return fs::path(c.cache_dir_flag);
    if (const char* env = std::getenv("SSQ_CACHE_DIR"); env && *env) return fs::path(env);
    return std::nullopt;
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::string> meta_lines(const std::string& sub, const std::string& config,
                                    bool no_timestamp) {
    std::vector<std::string> lines = {
        "ssq " + sub + " v" + std::string(ssq::kVersion),
        "config: " + config,
        "config_hash: " + ssq::io::fnv1a64_hex(sub + "|" + config + "|" + ssq::kVersion),
    };
    if (!no_timestamp) lines.push_back("generated: " + iso_timestamp());
    return lines;
}

ordered_json meta_json(const std::string& sub, const std::string& config, bool no_timestamp) {
    ordered_json m;
    m["tool"] = "ssq " + sub;
    m["version"] = ssq::kVersion;
    m["config_hash"] = ssq::io::fnv1a64_hex(sub + "|" + config + "|" + ssq::kVersion);
    if (!no_timestamp) m["generated"] = iso_timestamp();
    return m;
}

void write_output(const std::string& target, const std::string& content) {
    if (target == "-") {
        std::cout << content;
        return;
    }
    ssq::io::atomic_write(target, content);
}

std::string d2s(double v) { return ssq::io::format_double(v); }

// ---------------------------------------------------------------- curve ----

struct CurveArgs {
    CommonFlags common;
    int points = 0;
    double mu_min = 1e-4, mu_max = 1e4;
    std::vector<double> x_targets;
    bool locate_bif = false;
    bool variational_branches = false;
    int branch_points = 8;
};

int run_curve(const CurveArgs& a) {
    const ssq::Spin spin = resolve_spin(a.common);
    ssq::CurveGrid grid;
    grid.neg_mu_min = a.mu_min;
    grid.neg_mu_max = a.mu_max;
    if (a.points > 1) {
        const double decades = std::log10(a.mu_max / a.mu_min);
        grid.points_per_decade =
            std::max(1, static_cast<int>(std::lround((a.points - 1) / std::max(decades, 0.1))));
    }
    grid.x_targets = a.x_targets;

    std::ostringstream config;
    config << "two_j=" << spin.two_j() << " grid=" << grid.canonical() << " seed="
           << a.common.seed << " locate_bifurcation=" << a.locate_bif
           << " variational_branches=" << a.variational_branches;

    const ssq::CurveTable table =
        ssq::load_or_compute_curve(spin, grid, resolve_cache_dir(a.common));

    std::vector<std::string> meta = meta_lines("curve", config.str(), a.common.no_timestamp);
    if (spin.two_j() == 1)
        meta.push_back(
            "note: J=1/2 diagonalization degenerates to the coherent point (x=1, f=1/2); "
            "the frontier elsewhere is Var(Jx) = <Jz>^2 (variational regime)");
    if (!spin.is_integer_spin() && spin.two_j() > 1)
        meta.push_back("validity: table certified for x >= " + d2s(table.x_valid_lo()) +
                       " (right of the bifurcation)");

    std::optional<ssq::BifurcationReport> bif;
    if (a.locate_bif) {
        ssq::BifurcationOptions bo;
        bo.inner.rng_seed = a.common.seed;
        bif = ssq::locate_bifurcation(spin, bo);
        meta.push_back("bifurcation_x_critical: " + d2s(bif->x_critical));
        meta.push_back("bifurcation_bracket: [" + d2s(bif->bracket.first) + ", " +
                       d2s(bif->bracket.second) + "]");
    }

    std::string out = ssq::curve_csv(table, meta);
    if (a.variational_branches && !spin.is_integer_spin() && spin.two_j() > 1) {
        std::ostringstream extra;
        extra << "# variational branch points (upper-bound data, not certification-grade)\n";
        const double x_hi = table.x_valid_lo();
        for (int i = 0; i < a.branch_points; ++i) {
            const double x = x_hi * (i + 0.5) / a.branch_points;
            ssq::MinimizeAtXOptions opts;
            opts.rng_seed = a.common.seed + static_cast<std::uint64_t>(i);
            const ssq::VariationalResult r = ssq::minimize_at_x(spin, x, opts);
            extra << spin.two_j() << ',' << "nan" << ',' << d2s(r.x) << ',' << d2s(r.f) << ','
                  << "nan" << '\n';
        }
        out += extra.str();
    }
    write_output(a.common.output, out);
    return 0;
}

// ---------------------------------------------------------------- bound ----

int run_bound(const CommonFlags& common, double x, long long n, const std::string& mode_name) {
    const ssq::Spin spin = resolve_spin(common);
    const ssq::BoundMode mode =
        (mode_name == "exact") ? ssq::BoundMode::exact : ssq::BoundMode::analytic;
    std::ostringstream config;
    config << "two_j=" << spin.two_j() << " x=" << d2s(x) << " n=" << n << " mode=" << mode_name;
    const double bound = ssq::separability_bound(spin, n, x, mode, resolve_cache_dir(common));
    const double scaled = bound / (static_cast<double>(n) * spin.j());

    std::ostringstream out;
    for (const auto& l : meta_lines("bound", config.str(), common.no_timestamp))
        out << "# " << l << '\n';
    out << "scaled_bound=" << d2s(scaled) << '\n';
    out << "var_bound=" << d2s(bound) << '\n';
    write_output(common.output, out.str());
    return 0;
}

// ------------------------------------------------------------------- xi ----

int run_xi(const CommonFlags& common, double var_jx, double mean_jz) {
    const ssq::Spin spin = resolve_spin(common);
    if (var_jx < 0.0) throw ssq::input_error("xi: --var-jx must be >= 0");
    ssq::SpinMoments m;
    m.var_jx = var_jx;
    m.mean_jz = mean_jz;
    const double xi = ssq::squeezing_parameter(m, spin);
    std::ostringstream config;
    config << "two_j=" << spin.two_j() << " var_jx=" << d2s(var_jx)
           << " mean_jz=" << d2s(mean_jz);
    std::ostringstream out;
    for (const auto& l : meta_lines("xi", config.str(), common.no_timestamp))
        out << "# " << l << '\n';
    out << "xi=" << d2s(xi) << '\n';
    write_output(common.output, out.str());
    return 0;
}

// ---------------------------------------------------------- bifurcation ----

int run_bifurcation(const CommonFlags& common, double bracket_width) {
    const ssq::Spin spin = resolve_spin(common);
    ssq::BifurcationOptions opts;
    opts.bracket_width = bracket_width;
    opts.inner.rng_seed = common.seed;
    std::ostringstream config;
    config << "two_j=" << spin.two_j() << " bracket_width=" << d2s(bracket_width)
           << " seed=" << common.seed;
    const ssq::BifurcationReport rep = ssq::locate_bifurcation(spin, opts);

    ordered_json j;
    j["_meta"] = meta_json("bifurcation", config.str(), common.no_timestamp);
    j["two_j"] = spin.two_j();
    j["x_critical"] = rep.x_critical;
    j["jz_critical"] = rep.x_critical * spin.j();
    j["bracket"] = {rep.bracket.first, rep.bracket.second};
    j["branches_indistinguishable"] = rep.branches_indistinguishable;
    ordered_json samples = ordered_json::array();
    for (const auto& [x, mjx] : rep.branch_samples) {
        ordered_json s;
        s["x"] = x;
        s["mean_jx"] = mjx;
        samples.push_back(std::move(s));
    }
    j["branch_samples"] = std::move(samples);
    write_output(common.output, j.dump(2) + "\n");
    return 0;
}

// ------------------------------------------------------------- dynamics ----

struct DynamicsArgs {
    CommonFlags common;
    std::string kind;
    double omega = std::numeric_limits<double>::quiet_NaN();
    double chi = 1.0;
    double tmax = 0.0;
    double ramp_T = 0.0;
    int samples = 101;
    std::string frontier_path;
};

int run_dynamics(const DynamicsArgs& a) {
    const ssq::Spin spin = resolve_spin(a.common);
    ssq::HamiltonianSpec spec;
    if (a.kind == "one-axis")
        spec.kind = ssq::HamiltonianKind::one_axis;
    else if (a.kind == "two-axis")
        spec.kind = ssq::HamiltonianKind::two_axis;
    else if (a.kind == "adiabatic")
        spec.kind = ssq::HamiltonianKind::adiabatic_ramp;
    else
        throw ssq::input_error("dynamics: --kind must be one-axis, two-axis or adiabatic");
    const bool ramp = spec.kind == ssq::HamiltonianKind::adiabatic_ramp;
    spec.omega = std::isnan(a.omega) ? (ramp ? -1.0 : 0.0) : a.omega;
    spec.chi = a.chi;
    double tmax = a.tmax;
    if (ramp) {
        if (!(a.ramp_T > 0.0)) throw ssq::input_error("dynamics: adiabatic ramp needs --T > 0");
        spec.ramp_duration = a.ramp_T;
        tmax = a.ramp_T;
    } else if (!(tmax > 0.0)) {
        throw ssq::input_error("dynamics: --tmax must be > 0");
    }
    if (a.samples < 2) throw ssq::input_error("dynamics: --samples must be >= 2");

    std::ostringstream config;
    config << "two_j=" << spin.two_j() << " kind=" << a.kind << " omega=" << d2s(spec.omega)
           << " chi=" << d2s(spec.chi) << " tmax=" << d2s(tmax) << " samples=" << a.samples
           << " compare_frontier=" << (a.frontier_path.empty() ? 0 : 1);

    std::vector<double> times(a.samples);
    for (int i = 0; i < a.samples; ++i) times[i] = tmax * i / (a.samples - 1);

    const ssq::StateVector initial = ssq::StateVector::coherent_up(spin);
    const ssq::Trajectory traj = ssq::evolve(initial, spec, times);

    std::ostringstream out;
    for (const auto& l : meta_lines("dynamics", config.str(), a.common.no_timestamp))
        out << "# " << l << '\n';
    out << "t,mean_jx,mean_jy,mean_jz,var_jx,var_jy,var_jz,min_transverse_var,optimal_angle\n";
    for (const auto& s : traj.samples) {
        const auto& m = s.moments;
        out << d2s(s.t) << ',' << d2s(m.mean_jx) << ',' << d2s(m.mean_jy) << ','
            << d2s(m.mean_jz) << ',' << d2s(m.var_jx) << ',' << d2s(m.var_jy) << ','
            << d2s(m.var_jz) << ',' << d2s(s.min_transverse_variance) << ','
            << d2s(s.optimal_angle) << '\n';
    }
    out << "# max_norm_drift=" << d2s(traj.max_norm_drift) << '\n';
    if (ramp) {
        const double mu_final = spec.omega / spec.chi_at(spec.ramp_duration);
        const ssq::GroundStateResult gs = ssq::ground_state_of(mu_final, spin);
        out << "# ramp_steps=" << traj.ramp_steps << '\n';
        out << "# final_ground_state_fidelity=" << d2s(ssq::fidelity(gs.state, traj.final_state))
            << '\n';
    }
    write_output(a.common.output, out.str());

    if (!a.frontier_path.empty()) {
        const ssq::CurveTable table =
            ssq::load_or_compute_curve(spin, ssq::CurveGrid{}, resolve_cache_dir(a.common));
        std::ostringstream fr;
        for (const auto& l : meta_lines("dynamics-frontier", config.str(), a.common.no_timestamp))
            fr << "# " << l << '\n';
        fr << "x,scaled_min_transverse_var,envelope,excess\n";
        for (const auto& s : traj.samples) {
            const double x = s.moments.mean_jz / spin.j();
            if (!table.covers(x)) continue;
            const double v = s.min_transverse_variance / spin.j();
            const double env = table.lower_envelope(x);
            fr << d2s(x) << ',' << d2s(v) << ',' << d2s(env) << ',' << d2s(v - env) << '\n';
        }
        ssq::io::atomic_write(a.frontier_path, fr.str());
    }
    return 0;
}

// -------------------------------------------------------------- certify ----

struct CertifyArgs {
    CommonFlags common;
    std::string input;
    std::string mode = "exact";
    long long max_k = 0;
    double z = 3.0;
    int dim_cap = 20001;
};

int run_certify(const CertifyArgs& a) {
    std::string text;
    {
        std::ifstream in(a.input, std::ios::binary);
        if (!in) throw ssq::input_error("certify: cannot read input file '" + a.input + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    const std::vector<ssq::MeasurementRecord> records = ssq::parse_records_json(text);

    ssq::CertifyOptions opts;
    opts.mode = (a.mode == "analytic") ? ssq::BoundMode::analytic : ssq::BoundMode::exact;
    if (a.mode != "analytic" && a.mode != "exact")
        throw ssq::input_error("certify: --mode must be exact or analytic");
    opts.max_k = a.max_k;
    opts.margin = ssq::MarginPolicy{a.z};
    opts.dim_cap = a.dim_cap;
    opts.cache_dir = resolve_cache_dir(a.common);

    std::ostringstream config;
    config << "input_hash=" << ssq::io::fnv1a64_hex(text) << " mode=" << a.mode
           << " max_k=" << a.max_k << " z=" << d2s(a.z) << " dim_cap=" << a.dim_cap;

    ordered_json out;
    out["_meta"] = meta_json("certify", config.str(), a.common.no_timestamp);
    ordered_json certs = ordered_json::array();
    for (const auto& rec : records) {
        const ssq::DepthCertificate cert = ssq::certify_depth(rec, opts);
        certs.push_back(ordered_json::parse(ssq::certificate_json(rec, cert)));
    }
    out["certificates"] = std::move(certs);
    write_output(a.common.output, out.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimal spin-squeezing curves, squeezing dynamics and entanglement-depth "
                 "certification from collective-spin data"};
    app.require_subcommand(1);

    CurveArgs curve_args;
    auto* curve = app.add_subcommand("curve", "compute the optimal frontier F_J(x)");
    add_spin_flags(curve, curve_args.common);
    curve->add_option("--points", curve_args.points, "total sweep points (default 401)");
    curve->add_option("--mu-min", curve_args.mu_min, "smallest -mu in the sweep");
    curve->add_option("--mu-max", curve_args.mu_max, "largest -mu in the sweep");
    curve->add_option("--x", curve_args.x_targets, "refine these x targets instead of sweeping");
    curve->add_flag("--locate-bifurcation", curve_args.locate_bif,
                    "annotate the located bifurcation (half-integer spins)");
    curve->add_flag("--variational-branches", curve_args.variational_branches,
                    "append variational branch points left of the bifurcation");
    curve->add_option("--branch-points", curve_args.branch_points,
                      "number of appended branch points");

    CommonFlags bound_common;
    double bound_x = 0.0;
    long long bound_n = 1;
    std::string bound_mode = "analytic";
    auto* bound = app.add_subcommand("bound", "closed-form or exact separability bound");
    add_spin_flags(bound, bound_common);
    bound->add_option("--x", bound_x, "<Jz>/(NJ)")->required();
    bound->add_option("--n", bound_n, "number of particles (default 1)");
    bound->add_option("--mode", bound_mode, "exact|analytic (default analytic)");

    CommonFlags xi_common;
    double xi_var = 0.0, xi_mean = 0.0;
    auto* xi = app.add_subcommand("xi", "squeezing parameter sqrt(2J)*dJx/|<Jz>|");
    add_spin_flags(xi, xi_common);
    xi->add_option("--var-jx", xi_var, "Var(Jx)")->required();
    xi->add_option("--mean-jz", xi_mean, "<Jz>")->required();

    CommonFlags bif_common;
    double bif_width = 1e-3;
    auto* bif = app.add_subcommand("bifurcation", "locate the symmetry-breaking bifurcation");
    add_spin_flags(bif, bif_common);
    bif->add_option("--bracket-width", bif_width, "bisection bracket width in x");

    DynamicsArgs dyn_args;
    auto* dyn = app.add_subcommand("dynamics", "evolve |Jz=J> under a squeezing Hamiltonian");
    add_spin_flags(dyn, dyn_args.common);
    dyn->add_option("--kind", dyn_args.kind, "one-axis|two-axis|adiabatic")->required();
    dyn->add_option("--omega", dyn_args.omega, "Jz coefficient (default 0; adiabatic: -1)");
    dyn->add_option("--chi", dyn_args.chi, "Jx^2 coefficient (ramp peak for adiabatic)");
    dyn->add_option("--tmax", dyn_args.tmax, "evolution time (one-axis/two-axis)");
    dyn->add_option("--T", dyn_args.ramp_T, "ramp duration (adiabatic)");
    dyn->add_option("--samples", dyn_args.samples, "number of sample times (default 101)");
    dyn->add_option("--compare-frontier", dyn_args.frontier_path,
                    "also write (x, scaled min variance, envelope) rows to this file");

    CertifyArgs cert_args;
    auto* cert = app.add_subcommand("certify", "entanglement depth from measurement records");
    cert->add_option("--input", cert_args.input, "record file (JSON object or array)")
        ->required();
    cert->add_option("--mode", cert_args.mode, "exact|analytic (default exact)");
    cert->add_option("--max-k", cert_args.max_k, "largest group size to test (default N)");
    cert->add_option("--z", cert_args.z, "margin policy: subtract z standard errors (default 3)");
    cert->add_option("--dim-cap", cert_args.dim_cap,
                     "largest 2kJ+1 solved exactly (default 20001)");

    for (auto& [sub, common] :
         std::initializer_list<std::pair<CLI::App*, CommonFlags*>>{
             {curve, &curve_args.common},
             {bound, &bound_common},
             {xi, &xi_common},
             {bif, &bif_common},
             {dyn, &dyn_args.common},
             {cert, &cert_args.common}}) {
        sub->add_option("-o,--output", common->output, "output file ('-' = stdout)");
        sub->add_flag("--no-timestamp", common->no_timestamp,
                      "omit the generated timestamp from metadata");
        sub->add_option("--cache-dir", common->cache_dir_flag,
                        "curve cache directory (or set SSQ_CACHE_DIR)");
        sub->add_option("--seed", common->seed, "RNG seed for variational runs");
    }

    try {
        app.parse(argc, argv);
        if (curve->parsed()) return run_curve(curve_args);
        if (bound->parsed()) return run_bound(bound_common, bound_x, bound_n, bound_mode);
        if (xi->parsed()) return run_xi(xi_common, xi_var, xi_mean);
        if (bif->parsed()) return run_bifurcation(bif_common, bif_width);
        if (dyn->parsed()) return run_dynamics(dyn_args);
        if (cert->parsed()) return run_certify(cert_args);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ssq::numerical_error& e) {
        std::cerr << "ssq: numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const ssq::input_error& e) {
        std::cerr << "ssq: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "ssq: unexpected error: " << e.what() << '\n';
        return 2;
    }
}
