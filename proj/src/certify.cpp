#include "ssq/certify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ssq/curves.hpp"
#include "ssq/errors.hpp"

namespace ssq {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kHalfIntegerEdge = 0.88; // upper edge of the bifurcation interval
constexpr double kXTolNearOne = 1e-6;

struct BoundValue {
    double value;
    const char* method;
};

// Certified scaled lower bound on F_{J'}(x) for one effective spin.
class BoundEvaluator {
  public:
    BoundEvaluator(BoundMode mode, int dim_cap,
                   std::optional<std::filesystem::path> cache_dir)
        : mode_(mode), dim_cap_(dim_cap), cache_dir_(std::move(cache_dir)) {}

    BoundValue eval(long long two_j, double x) {
        const double ax = std::min(std::abs(x), 1.0);
        const double j = 0.5 * static_cast<double>(two_j);
        if (ax >= 1.0 - 1e-12) return {0.5, "closed-form"}; // F_J(1) = 1/2 for every J
        if (two_j == 1) {
            // exact J=1/2 frontier F(x) = x²/2; the analytic-only mode keeps
            // the uniformly weaker closed-form bound instead
            if (mode_ == BoundMode::exact) return {0.5 * ax * ax, "closed-form"};
            return {analytic_bound_j(j, ax), "analytic"};
        }
        const double closed = analytic_bound_j(j, ax);
        if (mode_ == BoundMode::analytic) return {closed, "analytic"};
        const bool regime_ok = (two_j % 2 == 0) || ax >= kHalfIntegerEdge;
        if (!regime_ok || two_j + 1 > dim_cap_ || ax > 1.0 - kXTolNearOne)
            return {closed, "analytic"};
        const double env = tangent_bound(static_cast<int>(two_j), ax);
        if (env > closed) return {env, "curve"};
        return {closed, "analytic"};
    }

  private:
    double tangent_bound(int two_j, double ax) {
        const auto key = std::make_pair(two_j, ax);
        auto it = memo_.find(key);
        if (it == memo_.end()) {
            CurveGrid grid;
            grid.x_targets = {ax};
            const CurveTable table = load_or_compute_curve(Spin(two_j), grid, cache_dir_);
            it = memo_.emplace(key, table.lower_envelope(ax)).first;
        }
        return it->second;
    }

    BoundMode mode_;
    int dim_cap_;
    std::optional<std::filesystem::path> cache_dir_;
    std::map<std::pair<int, double>, double> memo_;
};

struct ScanResult {
    long long depth;
    std::vector<PerKBound> per_k;
    bool fallback = false;
};

ScanResult scan_depth(const Spin& spin, long long n, double x, double v, long long max_k,
                      BoundEvaluator& bounds) {
    std::map<long long, BoundValue> evaluated;
    auto bound_at = [&](long long k) -> const BoundValue& {
        auto it = evaluated.find(k);
        if (it == evaluated.end())
            it = evaluated.emplace(k, bounds.eval(k * spin.two_j(), x)).first;
        return it->second;
    };
    auto passes = [&](long long k) { return v < bound_at(k).value; };

    long long largest_pass = 0;
    if (passes(1)) {
        largest_pass = 1;
        // exponential stepping to the first failing k
        long long k = 1;
        long long first_fail = 0;
        while (true) {
            const long long next = std::min(max_k, k * 2);
            if (next == k) break; // reached max_k while still passing
            if (passes(next)) {
                largest_pass = next;
                k = next;
            } else {
                first_fail = next;
                break;
            }
        }
        if (first_fail > 0) {
            long long lo = largest_pass, hi = first_fail;
            while (hi - lo > 1) {
                const long long mid = lo + (hi - lo) / 2;
                if (passes(mid))
                    lo = mid;
                else
                    hi = mid;
            }
            largest_pass = lo;
        }
    }

    // re-verify the monotone ordering of the bounds over the probe points
    bool monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& [k, bv] : evaluated) {
        if (bv.value > prev + 1e-12 * std::max(1.0, prev)) {
            monotone = false;
            break;
        }
        prev = bv.value;
    }
    ScanResult res;
    if (!monotone) {
        res.fallback = true;
        largest_pass = 0;
        for (long long k = 1; k <= max_k; ++k)
            if (passes(k)) largest_pass = k;
    }
    res.depth = std::min<long long>(largest_pass + 1, n);
    res.per_k.reserve(evaluated.size());
    for (const auto& [k, bv] : evaluated)
        res.per_k.push_back(PerKBound{k, bv.value, bv.method, v - bv.value});
    return res;
}

} // namespace

void MeasurementRecord::validate() const {
    if (num_particles < 1) throw input_error("record: num_particles must be >= 1");
    const double nj = static_cast<double>(num_particles) * spin.j();
    if (!std::isfinite(mean_jz) || std::abs(mean_jz) > nj * (1.0 + 1e-12))
        throw input_error("record: |mean_jz| must not exceed N*J");
    if (!std::isfinite(var_jx) || var_jx < 0.0)
        throw input_error("record: var_jx must be >= 0");
    if (se_mean_jz && !(*se_mean_jz >= 0.0))
        throw input_error("record: se_mean_jz must be >= 0");
    if (se_var_jx && !(*se_var_jx >= 0.0))
        throw input_error("record: se_var_jx must be >= 0");
}

double separability_bound(const Spin& spin, long long n, double x, BoundMode mode,
                          const std::optional<std::filesystem::path>& cache_dir) {
    if (n < 1) throw input_error("separability_bound: n must be >= 1");
    if (std::abs(x) > 1.0 + 1e-12)
        throw domain_error("separability_bound: |x| must be <= 1");
    const double ax = std::min(std::abs(x), 1.0);
    const double nj = static_cast<double>(n) * spin.j();

    if (mode == BoundMode::analytic) return nj * analytic_bound(spin, ax);

    if (ax >= 1.0 - 1e-12) return nj * 0.5;
    if (spin.two_j() == 1) return nj * (0.5 * ax * ax);
    if (!spin.is_integer_spin() && ax < kHalfIntegerEdge)
        throw regime_error(
            "separability_bound: exact mode is invalid for half-integer spin at x < " +
            std::to_string(kHalfIntegerEdge) + " (left of the bifurcation); use analytic mode");

    CurveGrid grid;
    grid.x_targets = {std::min(ax, 1.0 - kXTolNearOne)};
    const CurveTable table = load_or_compute_curve(spin, grid, cache_dir);
    // a tangent evaluated slightly beyond its refined x is still a tangent
    double env = 0.0;
    for (const CurvePoint& p : table.points()) {
        if (!std::isfinite(p.slope)) continue;
        env = std::max(env, p.f + p.slope * (ax - p.x));
    }
    return nj * std::max(env, analytic_bound(spin, ax));
}

DepthCertificate certify_depth(const MeasurementRecord& record, const CertifyOptions& opts) {
    record.validate();
    if (record.has_errors() && !opts.margin)
        throw input_error(
            "certify_depth: record carries standard errors; an explicit margin policy is "
            "required");
    const long long n = record.num_particles;
    long long max_k = (opts.max_k == 0) ? n : opts.max_k;
    if (max_k < 1 || max_k > n)
        throw input_error("certify_depth: max_k must lie in [1, N]");

    const double nj = static_cast<double>(n) * record.spin.j();
    const double x = std::abs(record.mean_jz) / nj;
    const double v = record.var_jx / nj;
    if (x > 1.0 + 1e-12) throw input_error("certify_depth: x exceeds 1");
    if (v < 0.0) throw input_error("certify_depth: v is negative");

    BoundEvaluator bounds(opts.mode, opts.dim_cap, opts.cache_dir);
    ScanResult raw = scan_depth(record.spin, n, std::min(x, 1.0), v, max_k, bounds);

    DepthCertificate cert;
    cert.certified_depth = raw.depth;
    cert.x = std::min(x, 1.0);
    cert.v = v;
    cert.per_k = std::move(raw.per_k);
    cert.monotone_fallback = raw.fallback;

    if (record.has_errors() && opts.margin) {
        const double z = opts.margin->z;
        const double se_mz = record.se_mean_jz.value_or(0.0);
        const double se_vx = record.se_var_jx.value_or(0.0);
        // conservative shift: smaller |mean_jz| lowers the bound, larger
        // var_jx weakens the violation
        const double x_adj =
            std::clamp((std::abs(record.mean_jz) - z * se_mz) / nj, 0.0, 1.0);
        const double v_adj = (record.var_jx + z * se_vx) / nj;
        ScanResult adj = scan_depth(record.spin, n, x_adj, v_adj, max_k, bounds);
        cert.certified_depth_adjusted = adj.depth;
        cert.x_adjusted = x_adj;
        cert.v_adjusted = v_adj;
    }
    return cert;
}

EntanglementCheck is_entangled(const MeasurementRecord& record, const CertifyOptions& opts) {
    record.validate();
    if (record.has_errors() && !opts.margin)
        throw input_error(
            "is_entangled: record carries standard errors; an explicit margin policy is "
            "required");
    const double nj = static_cast<double>(record.num_particles) * record.spin.j();
    const double x = std::min(std::abs(record.mean_jz) / nj, 1.0);
    const double v = record.var_jx / nj;
    BoundEvaluator bounds(opts.mode, opts.dim_cap, opts.cache_dir);
    const BoundValue b = bounds.eval(record.spin.two_j(), x);
    return EntanglementCheck{v < b.value, v - b.value};
}

// --- serialization -----------------------------------------------------------

namespace {

MeasurementRecord record_from_json(const ordered_json& j) {
    if (!j.is_object()) throw input_error("record: expected a JSON object");
    auto require = [&](const char* key) -> const ordered_json& {
        auto it = j.find(key);
        if (it == j.end())
            throw input_error(std::string("record: missing field '") + key + "'");
        return *it;
    };
    const auto& jn = require("num_particles");
    if (!jn.is_number_integer() || jn.get<long long>() < 1)
        throw input_error("record: field 'num_particles' must be a positive integer");
    const auto& jt = require("two_j");
    if (!jt.is_number_integer() || jt.get<long long>() < 1)
        throw input_error("record: field 'two_j' must be a positive integer");
    auto number = [&](const char* key) {
        const auto& val = require(key);
        if (!val.is_number())
            throw input_error(std::string("record: field '") + key + "' must be a number");
        return val.get<double>();
    };
    MeasurementRecord r{jn.get<long long>(), Spin(static_cast<int>(jt.get<long long>())),
                        number("mean_jz"), number("var_jx"), std::nullopt, std::nullopt};
    for (const char* key : {"se_mean_jz", "se_var_jx"}) {
        auto it = j.find(key);
        if (it == j.end()) continue;
        if (!it->is_number() || it->get<double>() < 0.0)
            throw input_error(std::string("record: field '") + key +
                              "' must be a nonnegative number");
        if (std::string(key) == "se_mean_jz")
            r.se_mean_jz = it->get<double>();
        else
            r.se_var_jx = it->get<double>();
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        static const char* known[] = {"num_particles", "two_j", "mean_jz", "var_jx",
                                      "se_mean_jz", "se_var_jx"};
        if (std::none_of(std::begin(known), std::end(known),
                         [&](const char* k) { return it.key() == k; }))
            throw input_error("record: unknown field '" + it.key() + "'");
    }
    r.validate();
    return r;
}

} // namespace

std::vector<MeasurementRecord> parse_records_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("record file: invalid JSON: ") + e.what());
    }
    std::vector<MeasurementRecord> out;
    if (j.is_array()) {
        for (const auto& item : j) out.push_back(record_from_json(item));
    } else {
        out.push_back(record_from_json(j));
    }
    if (out.empty()) throw input_error("record file: no records");
    return out;
}

std::string records_json(const std::vector<MeasurementRecord>& records) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : records) {
        ordered_json j;
        j["num_particles"] = r.num_particles;
        j["two_j"] = r.spin.two_j();
        j["mean_jz"] = r.mean_jz;
        j["var_jx"] = r.var_jx;
        if (r.se_mean_jz) j["se_mean_jz"] = *r.se_mean_jz;
        if (r.se_var_jx) j["se_var_jx"] = *r.se_var_jx;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::string certificate_json(const MeasurementRecord& record, const DepthCertificate& cert,
                             int indent) {
    ordered_json j;
    j["num_particles"] = record.num_particles;
    j["two_j"] = record.spin.two_j();
    j["x"] = cert.x;
    j["v"] = cert.v;
    j["certified_depth"] = cert.certified_depth;
    j["entangled"] = cert.certified_depth >= 2;
    ordered_json per_k = ordered_json::array();
    for (const auto& p : cert.per_k) {
        ordered_json e;
        e["k"] = p.k;
        e["bound"] = p.bound;
        e["method"] = p.method;
        e["margin"] = p.margin;
        per_k.push_back(std::move(e));
    }
    j["per_k"] = std::move(per_k);
    if (cert.monotone_fallback) j["monotone_fallback"] = true;
    if (cert.certified_depth_adjusted) {
        ordered_json adj;
        adj["x"] = *cert.x_adjusted;
        adj["v"] = *cert.v_adjusted;
        adj["certified_depth"] = *cert.certified_depth_adjusted;
        j["adjusted"] = std::move(adj);
    }
    return j.dump(indent);
}

} // namespace ssq
