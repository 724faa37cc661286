#pragma once
// Run configuration and manifests. One JSON document per run; unknown keys
// are rejected so a stale config fails loudly instead of half-applying.
#include "fraclab/errors.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fraclab::config {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kLibraryVersion = "fraclab 0.1.0";

struct RunConfig {
    std::string experiment;   // coeffs | mlf | fode | fbm | fsde | gradflow | study | accept
    int schema_version = kSchemaVersion;

    double alpha = 0.5;
    double hurst = 0.5;
    double lambda = -1.0;
    double mu = 1.0;
    double z = 0.0;
    std::string potential = "quartic"; // quartic | quadratic | quadratic+quartic | poly:c0,c1,...
    std::string phi = "quadratic";     // quadratic | l1 | quartic | huber | box | quadratic+quartic
    std::string rhs = "linear";        // linear | cubic
    std::vector<double> x0{1.0};

    double T = 1.0;
    int n = 0;      // steps; 0 = derive from k
    double k = 0.0; // step; 0 = derive from n
    int n_max = 0;
    int samples = 0;
    std::uint64_t seed = 0;
    std::vector<double> hist_times;

    std::string which;   // study family: fode | fsde | gradflow
    int levels = 0;      // study refinement levels
    int n0 = 0;          // study coarsest step count
    std::string battery; // accept battery; empty = all criteria

    std::string out;
    std::string out_prefix;
    int threads = 0;

    bool operator==(const RunConfig&) const = default;
};

std::string to_json(const RunConfig& cfg);
RunConfig config_from_json(const std::string& text); // ConfigError on unknown key / bad type
RunConfig load_config(const std::string& path);

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double measured = 0.0; // headline number (max deviation, order, ...)
    double threshold = 0.0;
    std::string detail;
};

// Every acceptance criterion appears exactly once in a full manifest.
struct RunManifest {
    RunConfig config;
    std::string library_version = kLibraryVersion;
    double wall_seconds = 0.0;
    std::vector<std::uint64_t> seeds_used;
    std::vector<CriterionResult> criteria;
};

std::string to_json(const RunManifest& manifest);
// Duplicate criterion ids are always rejected; require_all additionally
// demands exactly the ids 1..10.
void validate_manifest(const RunManifest& manifest, bool require_all);

} // namespace fraclab::config
