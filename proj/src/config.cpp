#include "rcm/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "rcm/csv.hpp"

namespace rcm::cli {

namespace {

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ", ";
        out += parts[i];
    }
    return out;
}

enum class Kind { number, positive_number, integer, uint, boolean, str, num_array, int_array, object };

struct Field {
    const char* name;
    Kind kind;
    bool required;
};

// Schema per subcommand. Common keys (subcommand, seed, threads, out_dir)
// are handled separately.
const std::map<std::string, std::vector<Field>>& schemas() {
    static const std::map<std::string, std::vector<Field>> table = {
        {"sample",
         {{"g", Kind::object, true},
          {"lambda", Kind::positive_number, true},
          {"L", Kind::positive_number, true},
          {"with_root", Kind::boolean, false},
          {"strategy", Kind::str, false},
          {"site_p", Kind::number, false},
          {"ghost_h", Kind::number, false}}},
        {"estimate-psi",
         {{"g", Kind::object, true},
          {"lambda", Kind::positive_number, true},
          {"L", Kind::positive_number, true},
          {"n_min", Kind::integer, false},
          {"n_max", Kind::integer, true},
          {"reps", Kind::uint, true}}},
        {"estimate-mh",
         {{"g", Kind::object, true},
          {"lambda", Kind::positive_number, true},
          {"h", Kind::number, true},
          {"L", Kind::positive_number, true},
          {"reps", Kind::uint, true}}},
        {"estimate-mhat",
         {{"g", Kind::object, true},
          {"lambda", Kind::positive_number, true},
          {"h", Kind::number, true},
          {"K", Kind::positive_number, true},
          {"s", Kind::positive_number, true},
          {"reps", Kind::uint, true}}},
        {"coupling-test",
         {{"g", Kind::object, true},
          {"lambda", Kind::positive_number, true},
          {"K", Kind::positive_number, true},
          {"s_values", Kind::num_array, true},
          {"reps", Kind::uint, true}}},
        {"cutoff-test",
         {{"g", Kind::object, true},
          {"lambda", Kind::positive_number, true},
          {"r_values", Kind::num_array, true},
          {"k_values", Kind::int_array, true},
          {"L", Kind::positive_number, true},
          {"reps", Kind::uint, true}}},
        {"verify-theorem2",
         {{"g", Kind::object, true},
          {"lambda", Kind::positive_number, true},
          {"h", Kind::number, true},
          {"n_max", Kind::integer, true},
          {"L", Kind::positive_number, true},
          {"reps", Kind::uint, true}}},
        {"fit-decay",
         {{"input_csv", Kind::str, true},
          {"n_lo", Kind::integer, false},
          {"n_hi", Kind::integer, false},
          {"min_count", Kind::number, false}}},
        {"transitivity-test",
         {{"g", Kind::object, true},
          {"lambda", Kind::positive_number, true},
          {"h", Kind::number, true},
          {"K", Kind::positive_number, true},
          {"n_factors", Kind::int_array, true},
          {"outer_reps", Kind::uint, true},
          {"inner_reps", Kind::uint, true},
          {"subsample_max", Kind::uint, false},
          {"reference_reps", Kind::uint, false}}},
        {"r-event-test",
         {{"lambda", Kind::positive_number, true},
          {"K", Kind::positive_number, true},
          {"s", Kind::positive_number, true},
          {"alpha", Kind::positive_number, true},
          {"n_factors", Kind::int_array, true},
          {"reps", Kind::uint, true},
          {"dim", Kind::integer, true}}},
        {"mecke-check",
         {{"g", Kind::object, true},
          {"lambda", Kind::positive_number, true},
          {"L", Kind::positive_number, true},
          {"reps", Kind::uint, true}}},
        {"verify-pivotal",
         {{"max_nonroot", Kind::integer, false},
          {"p_values", Kind::num_array, false},
          {"h_values", Kind::num_array, false}}},
        {"domination-check",
         {{"m", Kind::integer, false},
          {"mu", Kind::num_array, false},
          {"nu", Kind::num_array, false}}},
        {"lecam-table",
         {{"n_max", Kind::integer, false},
          {"p_step", Kind::positive_number, false},
          {"p_max", Kind::positive_number, false}}},
        {"cramer-check",
         {{"grid_points", Kind::integer, false},
          {"alpha_max", Kind::positive_number, false}}},
        {"g2-oracle",
         {{"g", Kind::object, false},
          {"points", Kind::object, false},  // array of arrays; checked ad hoc
          {"families", Kind::object, false},
          {"n_configs", Kind::uint, false},
          {"k", Kind::integer, false},
          {"dim", Kind::integer, false},
          {"box_side", Kind::positive_number, false},
          {"mc_reps", Kind::uint, true}}},
        {"plot-data",
         {{"input_csv", Kind::str, true},
          {"kind", Kind::str, true}}},
    };
    return table;
}

bool kind_matches(const nlohmann::json& v, Kind k) {
    switch (k) {
        case Kind::number:
            return v.is_number();
        case Kind::positive_number:
            return v.is_number() && v.get<double>() > 0.0;
        case Kind::integer:
            return v.is_number_integer();
        case Kind::uint:
            return v.is_number_unsigned() ||
                   (v.is_number_integer() && v.get<long long>() >= 0);
        case Kind::boolean:
            return v.is_boolean();
        case Kind::str:
            return v.is_string();
        case Kind::num_array:
            return v.is_array() &&
                   std::all_of(v.begin(), v.end(),
                               [](const nlohmann::json& e) { return e.is_number(); });
        case Kind::int_array:
            return v.is_array() && std::all_of(v.begin(), v.end(), [](const nlohmann::json& e) {
                       return e.is_number_integer();
                   });
        case Kind::object:
            return v.is_object() || v.is_array();
    }
    return false;
}

}  // namespace

ConfigError::ConfigError(const std::vector<std::string>& offending)
    : std::runtime_error("invalid config: " + join(offending)), fields(offending) {}

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, fields] : schemas()) v.push_back(name);
        return v;
    }();
    return names;
}

ConnectionFunction connection_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError({"g: must be an object"});
    static const std::set<std::string> allowed = {"family", "dim",        "radius",
                                                  "beta",   "alpha",      "table_path",
                                                  "cutoff"};
    std::vector<std::string> bad;
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) bad.push_back("g." + key + ": unknown key");
    if (!j.contains("family") || !j["family"].is_string())
        bad.push_back("g.family: required string");
    if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<int>() < 1)
        bad.push_back("g.dim: required positive integer");
    if (!bad.empty()) throw ConfigError(bad);

    const std::string family = j["family"].get<std::string>();
    const int dim = j["dim"].get<int>();
    ConnectionFunction g = [&] {
        if (family == "indicator") {
            if (!j.contains("radius") || !j["radius"].is_number())
                throw ConfigError({"g.radius: required for indicator"});
            return ConnectionFunction::indicator(j["radius"].get<double>(), dim);
        }
        if (family == "exponential") {
            if (!j.contains("beta") || !j["beta"].is_number())
                throw ConfigError({"g.beta: required for exponential"});
            return ConnectionFunction::exponential(j["beta"].get<double>(), dim);
        }
        if (family == "power-law") {
            if (!j.contains("alpha") || !j["alpha"].is_number())
                throw ConfigError({"g.alpha: required for power-law"});
            return ConnectionFunction::power_law(j["alpha"].get<double>(), dim);
        }
        if (family == "table") {
            if (!j.contains("table_path") || !j["table_path"].is_string())
                throw ConfigError({"g.table_path: required for table"});
            const CsvTable t = read_csv(j["table_path"].get<std::string>());
            const std::size_t rc = t.column("radius");
            const std::size_t vc = t.column("value");
            std::vector<std::pair<double, double>> rows;
            for (std::size_t r = 0; r < t.rows.size(); ++r)
                rows.emplace_back(t.number(r, rc), t.number(r, vc));
            return ConnectionFunction::table(rows, dim);
        }
        throw ConfigError({"g.family: unknown family '" + family + "'"});
    }();
    if (j.contains("cutoff")) {
        if (!j["cutoff"].is_number() || !(j["cutoff"].get<double>() > 0.0))
            throw ConfigError({"g.cutoff: must be a positive number"});
        g = cutoff(g, j["cutoff"].get<double>());
    }
    return g;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j = params;
    j["subcommand"] = subcommand;
    j["seed"] = seed;
    j["threads"] = threads;
    j["out_dir"] = out_dir;
    return j;
}

ExperimentConfig parse_config(const nlohmann::json& raw_in) {
    nlohmann::json raw = raw_in;
    if (raw.is_object() && raw.contains("config")) raw = raw["config"];  // manifest
    if (!raw.is_object()) throw ConfigError({"config: must be a JSON object"});

    std::vector<std::string> bad;
    if (!raw.contains("subcommand") || !raw["subcommand"].is_string()) {
        throw ConfigError({"subcommand: required string"});
    }
    ExperimentConfig cfg;
    cfg.subcommand = raw["subcommand"].get<std::string>();
    const auto it = schemas().find(cfg.subcommand);
    if (it == schemas().end())
        throw ConfigError({"subcommand: unknown '" + cfg.subcommand + "'"});

    if (!raw.contains("seed") || !kind_matches(raw["seed"], Kind::uint))
        bad.push_back("seed: required unsigned integer");
    else
        cfg.seed = raw["seed"].get<std::uint64_t>();
    if (raw.contains("threads")) {
        if (!kind_matches(raw["threads"], Kind::uint) || raw["threads"].get<int>() < 1)
            bad.push_back("threads: must be a positive integer");
        else
            cfg.threads = raw["threads"].get<unsigned>();
    }
    if (raw.contains("out_dir")) {
        if (!raw["out_dir"].is_string())
            bad.push_back("out_dir: must be a string");
        else
            cfg.out_dir = raw["out_dir"].get<std::string>();
    }

    static const std::set<std::string> common = {"subcommand", "seed", "threads",
                                                 "out_dir"};
    const std::vector<Field>& fields = it->second;
    for (const auto& [key, value] : raw.items()) {
        if (common.count(key)) continue;
        const auto f = std::find_if(fields.begin(), fields.end(),
                                    [&](const Field& fl) { return key == fl.name; });
        if (f == fields.end()) {
            bad.push_back(key + ": unknown key for " + cfg.subcommand);
            continue;
        }
        if (!kind_matches(value, f->kind)) bad.push_back(key + ": wrong type or range");
        cfg.params[key] = value;
    }
    for (const Field& f : fields)
        if (f.required && !raw.contains(f.name))
            bad.push_back(std::string(f.name) + ": required");

    if (!bad.empty()) throw ConfigError(bad);
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError({"config file not readable: " + path});
    nlohmann::json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw ConfigError({std::string("config file not valid JSON: ") + e.what()});
    }
    return parse_config(j);
}

}  // namespace rcm::cli
