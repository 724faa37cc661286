#include "fraclab/config.hpp"

#include "fraclab/emit.hpp"

#include <json.hpp>

#include <set>

namespace fraclab::config {

using nlohmann::json;

std::string to_json(const RunConfig& c) {
    json j;
    j["experiment"] = c.experiment;
    j["schema_version"] = c.schema_version;
    j["alpha"] = c.alpha;
    j["hurst"] = c.hurst;
    j["lambda"] = c.lambda;
    j["mu"] = c.mu;
    j["z"] = c.z;
    j["potential"] = c.potential;
    j["phi"] = c.phi;
    j["rhs"] = c.rhs;
    j["x0"] = c.x0;
    j["T"] = c.T;
    j["n"] = c.n;
    j["k"] = c.k;
    j["n_max"] = c.n_max;
    j["samples"] = c.samples;
    j["seed"] = c.seed;
    j["hist_times"] = c.hist_times;
    j["which"] = c.which;
    j["levels"] = c.levels;
    j["n0"] = c.n0;
    j["battery"] = c.battery;
    j["out"] = c.out;
    j["out_prefix"] = c.out_prefix;
    j["threads"] = c.threads;
    return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: parse failure: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");

    static const std::set<std::string> known{
        "experiment", "schema_version", "alpha",   "hurst", "lambda", "mu",     "z",
        "potential",  "phi",            "rhs",     "x0",    "T",      "n",      "k",
        "n_max",      "samples",        "seed",    "hist_times",      "which",  "levels",
        "n0",         "battery",        "out",     "out_prefix",      "threads"};
    for (const auto& item : j.items())
        if (!known.count(item.key())) throw ConfigError("config: unknown key '" + item.key() + "'");

    RunConfig c;
    try {
        auto get = [&](const char* key, auto& field) {
            if (j.contains(key)) field = j.at(key).template get<std::decay_t<decltype(field)>>();
        };
        get("experiment", c.experiment);
        get("schema_version", c.schema_version);
        get("alpha", c.alpha);
        get("hurst", c.hurst);
        get("lambda", c.lambda);
        get("mu", c.mu);
        get("z", c.z);
        get("potential", c.potential);
        get("phi", c.phi);
        get("rhs", c.rhs);
        get("x0", c.x0);
        get("T", c.T);
        get("n", c.n);
        get("k", c.k);
        get("n_max", c.n_max);
        get("samples", c.samples);
        get("seed", c.seed);
        get("hist_times", c.hist_times);
        get("which", c.which);
        get("levels", c.levels);
        get("n0", c.n0);
        get("battery", c.battery);
        get("out", c.out);
        get("out_prefix", c.out_prefix);
        get("threads", c.threads);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: bad field type: ") + e.what());
    }
    if (c.schema_version != kSchemaVersion)
        throw ConfigError("config: unsupported schema_version " + std::to_string(c.schema_version));
    return c;
}

RunConfig load_config(const std::string& path) { return config_from_json(emit::read_file(path)); }

std::string to_json(const RunManifest& m) {
    json j;
    j["config"] = json::parse(to_json(m.config));
    j["library_version"] = m.library_version;
    j["wall_seconds"] = m.wall_seconds;
    j["seeds_used"] = m.seeds_used;
    json crits = json::array();
    for (const auto& c : m.criteria) {
        json e;
        e["id"] = c.id;
        e["name"] = c.name;
        e["pass"] = c.pass;
        e["measured"] = c.measured;
        e["threshold"] = c.threshold;
        e["detail"] = c.detail;
        crits.push_back(e);
    }
    j["criteria"] = crits;
    return j.dump(2) + "\n";
}

void validate_manifest(const RunManifest& m, bool require_all) {
    std::set<int> ids;
    for (const auto& c : m.criteria)
        if (!ids.insert(c.id).second)
            throw ConfigError("manifest: criterion " + std::to_string(c.id) + " appears twice");
    if (require_all)
        for (int id = 1; id <= 10; ++id)
            if (!ids.count(id)) throw ConfigError("manifest: criterion " + std::to_string(id) + " missing");
}

} // namespace fraclab::config
