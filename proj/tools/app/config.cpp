#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "polylab/error.hpp"

namespace polylab::app {

using K = ParamDef::Kind;
using nlohmann::json;

Grid Grid::parse(const std::string& text) {
    const auto a = text.find(':'), b = text.find(':', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos)
        throw ConfigError("config", "grid '" + text + "' is not start:stop:count");
    Grid g;
    try {
        std::size_t used = 0;
        const std::string s0 = text.substr(0, a), s1 = text.substr(a + 1, b - a - 1), s2 = text.substr(b + 1);
        g.start = std::stod(s0, &used);
        if (used != s0.size()) throw std::invalid_argument(s0);
        g.stop = std::stod(s1, &used);
        if (used != s1.size()) throw std::invalid_argument(s1);
        g.count = std::stol(s2, &used);
        if (used != s2.size()) throw std::invalid_argument(s2);
    } catch (const std::logic_error&) {
        throw ConfigError("config", "grid '" + text + "' is not start:stop:count");
    }
    return g;
}

Grid Grid::from_json(const json& j) {
    if (j.is_string()) return parse(j.get<std::string>());
    if (!j.is_object()) throw ConfigError("config", "grid must be an object {start, stop, count}");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "start" && it.key() != "stop" && it.key() != "count")
            throw ConfigError("config", "unknown grid key '" + it.key() + "'");
    if (!j.contains("start") || !j.contains("stop") || !j.contains("count"))
        throw ConfigError("config", "grid needs start, stop and count");
    if (!j["start"].is_number() || !j["stop"].is_number() || !j["count"].is_number_integer())
        throw ConfigError("config", "grid start/stop must be numbers and count an integer");
    return {j["start"].get<double>(), j["stop"].get<double>(), j["count"].get<long>()};
}

json Grid::to_json() const { return {{"start", start}, {"stop", stop}, {"count", count}}; }

std::vector<double> Grid::values() const {
    std::vector<double> v(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i)
        v[std::size_t(i)] = count == 1 ? start : (i == count - 1 ? stop : start + (stop - start) * double(i) / double(count - 1));
    return v;
}

std::vector<int> Grid::int_values() const {
    std::vector<int> out;
    for (double x : values()) {
        const int k = int(std::lround(x));
        if (!out.empty() && k <= out.back()) throw ConfigError("config", "integer grid has repeated values after rounding");
        out.push_back(k);
    }
    return out;
}

void Grid::validate(const std::string& name) const {
    if (count < 1) throw ConfigError("config", "grid '" + name + "': count must be >= 1");
    if (!std::isfinite(start) || !std::isfinite(stop)) throw ConfigError("config", "grid '" + name + "' is not finite");
    if (start > stop) throw ConfigError("config", "grid '" + name + "': start > stop");
    if (count > 10000000) throw ConfigError("config", "grid '" + name + "' is too large");
}

const std::vector<ModelSchema>& schemas() {
    static const std::vector<ModelSchema> s = {
        {"homopin",
         "homogeneous pinning and wetting",
         {{"mode", K::text, "pinned", "pinned | wetting | reentrance | exponent", {"pinned", "wetting", "reentrance", "exponent"}},
          {"walk", K::text, "srw", "return law: srw | lazy | zeta", {"srw", "lazy", "zeta"}},
          {"p", K::number, 1.0, "lazy walk step probability", {}},
          {"a", K::number, 0.5, "tail exponent of the zeta law", {}},
          {"n_head", K::integer, 20000, "exact head length of the return law", {}}},
         {{"zeta", {0.01, 5.0, 500}, "pinning strengths"}, {"T", {0.01, 5.0, 500}, "temperatures (reentrance)"}}},
        {"collapse",
         "partially directed collapse transition",
         {{"mode", K::text, "critical-point", "critical-point | critical-curve | free-energy | enumerate",
           {"critical-point", "critical-curve", "free-energy", "enumerate"}},
          {"n_max", K::integer, 20, "enumeration length", {}}},
         {{"x", {0.5, 5.0, 10}, "fugacities x = e^gamma"}, {"gamma", {-3.0, 3.0, 121}, "interaction strengths"}}},
        {"undirected",
         "undirected self-interacting walk",
         {{"mode", K::text, "mc", "mc | exact | identity", {"mc", "exact", "identity"}},
          {"beta", K::number, 0.0, "self-repulsion", {}},
          {"gamma", K::number, 0.0, "self-attraction", {}},
          {"d", K::integer, 1, "dimension 1..3", {}},
          {"sweeps", K::integer, 2000, "Metropolis sweeps per n", {}},
          {"box_eps", K::number, 1.0, "box half-width eps n^{1/d}", {}},
          {"paths", K::integer, 10000, "random paths for the identity check", {}}},
         {{"n", {100, 100, 1}, "path lengths"}}},
        {"randpin",
         "pinning with disorder",
         {{"mode", K::text, "f", "f | hc | chi", {"f", "hc", "chi"}},
          {"law", K::text, "bernoulli", "disorder law", {"bernoulli", "gaussian"}},
          {"tail", K::text, "srw", "return law: srw | zeta", {"srw", "zeta"}},
          {"a", K::number, 0.25, "tail exponent for the zeta law", {}},
          {"beta", K::number, 1.0, "disorder strength (mode f)", {}},
          {"n", K::integer, 100000, "polymer length", {}},
          {"replicas", K::integer, 200, "disorder replicas", {}},
          {"steps", K::integer, 8, "bisection steps (mode hc)", {}},
          {"chi_n_max", K::integer, 8192, "truncation of the overlap sum", {}}},
         {{"h", {0.0, 0.6, 4}, "pinning shifts (mode f)"}, {"beta", {0.2, 1.2, 6}, "disorder strengths (mode hc)"}}},
        {"copoly",
         "copolymer near a selective interface",
         {{"mode", K::text, "bounds", "bounds | g | slope | smoothing", {"bounds", "g", "slope", "smoothing"}},
          {"law", K::text, "bernoulli", "disorder law", {"bernoulli", "gaussian"}},
          {"beta", K::number, 1.0, "coupling (modes g and smoothing)", {}},
          {"n", K::integer, 200000, "polymer length", {}},
          {"replicas", K::integer, 200, "disorder replicas", {}},
          {"steps", K::integer, 6, "bisection steps (mode slope)", {}},
          {"mc", K::flag, false, "add Monte Carlo g at h = upper - delta (mode smoothing)", {}}},
         {{"beta", {0.25, 4.0, 16}, "couplings (modes bounds and slope)"},
          {"h", {0.0, 1.0, 11}, "asymmetries (mode g)"},
          {"delta", {0.01, 0.3, 30}, "distances below the upper bound (mode smoothing)"}}},
        {"randpot",
         "directed polymer in a random potential",
         {{"law", K::text, "bernoulli", "disorder law", {"bernoulli", "gaussian"}},
          {"beta", K::number, 0.3, "inverse temperature", {}},
          {"d", K::integer, 3, "dimension 1..3", {}},
          {"n", K::integer, 100, "time horizon", {}},
          {"replicas", K::integer, 500, "environment replicas", {}},
          {"horizon", K::integer, 20000, "collision horizon for pi_d", {}},
          {"pi_replicas", K::integer, 200000, "walk pairs for pi_d", {}}},
         {}},
    };
    return s;
}

const ModelSchema& schema(const std::string& model) {
    for (const auto& s : schemas())
        if (s.name == model) return s;
    throw ConfigError("config", "unknown subcommand '" + model + "'");
}

namespace {

const ParamDef& param_def(const ModelSchema& s, const std::string& name) {
    for (const auto& p : s.params)
        if (p.name == name) return p;
    throw ConfigError("config", "unknown parameter '" + name + "' for " + s.name);
}

json coerce(const ParamDef& p, const json& v) {
    switch (p.kind) {
        case K::number:
            if (!v.is_number()) throw ConfigError("config", "'" + p.name + "' must be a number");
            if (!std::isfinite(v.get<double>())) throw ConfigError("config", "'" + p.name + "' must be finite");
            return v.get<double>();
        case K::integer:
            if (!v.is_number_integer()) throw ConfigError("config", "'" + p.name + "' must be an integer");
            return v.get<long>();
        case K::flag:
            if (!v.is_boolean()) throw ConfigError("config", "'" + p.name + "' must be true or false");
            return v;
        case K::text: {
            if (!v.is_string()) throw ConfigError("config", "'" + p.name + "' must be a string");
            const auto t = v.get<std::string>();
            if (!p.choices.empty() && std::find(p.choices.begin(), p.choices.end(), t) == p.choices.end())
                throw ConfigError("config", "'" + p.name + "' must be one of " + json(p.choices).dump());
            return t;
        }
    }
    return v;
}

}  // namespace

double RunConfig::num(const std::string& k) const { return params.at(k).get<double>(); }
long RunConfig::integer(const std::string& k) const { return params.at(k).get<long>(); }
std::string RunConfig::text(const std::string& k) const { return params.at(k).get<std::string>(); }
bool RunConfig::flag(const std::string& k) const { return params.at(k).get<bool>(); }

json RunConfig::to_json() const {
    json g = json::object();
    for (const auto& [k, v] : grids) g[k] = v.to_json();
    return {{"subcommand", subcommand}, {"params", params},   {"grids", g},
            {"seed", seed},             {"threads", threads}, {"out_dir", out_dir}, {"format", format}};
}

RunConfig default_config(const std::string& model) {
    const auto& s = schema(model);
    RunConfig c;
    c.subcommand = model;
    for (const auto& p : s.params) c.params[p.name] = p.def;
    for (const auto& g : s.grids) c.grids[g.name] = g.def;
    return c;
}

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config", "config must be a JSON object");
    if (!j.contains("subcommand") || !j["subcommand"].is_string()) throw ConfigError("config", "missing subcommand");
    RunConfig c = default_config(j["subcommand"].get<std::string>());
    const auto& s = schema(c.subcommand);
    static const std::set<std::string> top = {"subcommand", "params", "grids", "seed", "threads", "out_dir", "format"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!top.count(it.key())) throw ConfigError("config", "unknown key '" + it.key() + "'");
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw ConfigError("config", "params must be an object");
        for (auto it = j["params"].begin(); it != j["params"].end(); ++it)
            c.params[it.key()] = coerce(param_def(s, it.key()), it.value());
    }
    if (j.contains("grids")) {
        if (!j["grids"].is_object()) throw ConfigError("config", "grids must be an object");
        for (auto it = j["grids"].begin(); it != j["grids"].end(); ++it) {
            if (!c.grids.count(it.key())) throw ConfigError("config", "unknown grid '" + it.key() + "' for " + s.name);
            c.grids[it.key()] = Grid::from_json(it.value());
        }
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw ConfigError("config", "seed must be a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("threads")) {
        if (!j["threads"].is_number_integer()) throw ConfigError("config", "threads must be an integer");
        c.threads = j["threads"].get<int>();
    }
    if (j.contains("out_dir")) {
        if (!j["out_dir"].is_string()) throw ConfigError("config", "out_dir must be a string");
        c.out_dir = j["out_dir"].get<std::string>();
    }
    if (j.contains("format")) {
        if (!j["format"].is_string()) throw ConfigError("config", "format must be a string");
        c.format = j["format"].get<std::string>();
    }
    validate(c);
    return c;
}

RunConfig config_from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config", "cannot open " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", path + ": " + e.what());
    }
    return config_from_json(j);
}

void apply_param(RunConfig& cfg, const std::string& name, const std::string& value) {
    const auto& p = param_def(schema(cfg.subcommand), name);
    json v;
    try {
        std::size_t used = 0;
        switch (p.kind) {
            case K::number: v = std::stod(value, &used); break;
            case K::integer: v = std::stol(value, &used); break;
            case K::flag:
                if (value != "true" && value != "false") throw std::invalid_argument(value);
                v = value == "true";
                used = value.size();
                break;
            case K::text: v = value; used = value.size(); break;
        }
        if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::logic_error&) {
        throw ConfigError("config", "bad value '" + value + "' for --" + name);
    }
    cfg.params[name] = coerce(p, v);
}

void apply_grid(RunConfig& cfg, const std::string& name, const std::string& value) {
    if (!cfg.grids.count(name)) throw ConfigError("config", "unknown grid '" + name + "'");
    cfg.grids[name] = Grid::parse(value);
}

void validate(const RunConfig& cfg) {
    const auto& s = schema(cfg.subcommand);
    for (const auto& p : s.params) coerce(p, cfg.params.at(p.name));
    for (const auto& [k, g] : cfg.grids) g.validate(k);
    if (cfg.threads < 1) throw ConfigError("config", "threads must be >= 1");
    if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("config", "format must be csv or json");
}

}  // namespace polylab::app
