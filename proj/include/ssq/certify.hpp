#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ssq/spin.hpp"

namespace ssq {

/// Collective-spin measurement data for N spin-J particles (hbar = 1).
struct MeasurementRecord {
    long long num_particles;
    Spin spin;
    double mean_jz;
    double var_jx;
    std::optional<double> se_mean_jz;
    std::optional<double> se_var_jx;

    bool has_errors() const { return se_mean_jz.has_value() || se_var_jx.has_value(); }
    void validate() const;
};

enum class BoundMode {
    exact,    // curve tangents where the diagonalization regime is valid, Eq.-(3)-style
              // closed form elsewhere
    analytic, // closed-form lower bound only
};

/// Conservative handling of reported standard errors: shift the data point
/// against the certificate by z standard errors before testing each bound.
struct MarginPolicy {
    double z = 3.0;
};

struct CertifyOptions {
    BoundMode mode = BoundMode::exact;
    long long max_k = 0; // 0 means N
    std::optional<MarginPolicy> margin;
    int dim_cap = 20001; // largest 2kJ+1 for which exact tables are used
    std::optional<std::filesystem::path> cache_dir;
};

struct PerKBound {
    long long k;
    double bound;       // scaled lower bound on F_{kJ}(x)
    std::string method; // "closed-form", "curve" or "analytic"
    double margin;      // v - bound (negative = bound violated)
};

struct DepthCertificate {
    long long certified_depth; // 1 = no entanglement certified
    double x;                  // <Jz>/(NJ)
    double v;                  // Var(Jx)/(NJ)
    std::vector<PerKBound> per_k;
    bool monotone_fallback = false; // bound family was not monotone; linear scan used
    // present when a margin policy was applied to reported standard errors
    std::optional<long long> certified_depth_adjusted;
    std::optional<double> x_adjusted;
    std::optional<double> v_adjusted;
};

/// NJ * L_J(x): the separability bound on Var(collective Jx). In exact mode
/// L is the tangent lower envelope of the diagonalization curve (valid
/// regimes only; throws regime_error for half-integer spin left of the
/// bifurcation); in analytic mode L is the closed-form bound.
double separability_bound(const Spin& spin, long long n, double x, BoundMode mode,
                          const std::optional<std::filesystem::path>& cache_dir = {});

/// Tests v < L_{kJ}(x) for k = 1, 2, ... (groups of k particles acting as
/// effective spin kJ); certified depth is the largest violated k plus one.
/// Scans k exponentially with bisection, re-verifying the monotone ordering
/// of the bounds at the probe points (linear scan fallback on violation).
DepthCertificate certify_depth(const MeasurementRecord& record, const CertifyOptions& opts = {});

struct EntanglementCheck {
    bool entangled;
    double margin; // v - L_J(x), scaled
};

/// Equivalent to certify_depth(...) >= 2.
EntanglementCheck is_entangled(const MeasurementRecord& record, const CertifyOptions& opts = {});

// --- record / certificate serialization (JSON) ------------------------------

/// Accepts a single object or an array of objects with keys num_particles,
/// two_j, mean_jz, var_jx and optional se_mean_jz, se_var_jx. Errors name the
/// offending field.
std::vector<MeasurementRecord> parse_records_json(const std::string& text);

std::string records_json(const std::vector<MeasurementRecord>& records);

/// One certificate object (schema: num_particles, two_j, x, v,
/// certified_depth, entangled, per_k[], optional adjusted block).
std::string certificate_json(const MeasurementRecord& record, const DepthCertificate& cert,
                             int indent = 2);

} // namespace ssq
