#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <toml.hpp>

#include "smx/cli.hpp"

namespace smx::cli {

namespace {

using json = nlohmann::json;

const std::map<std::string, std::set<std::string>> potential_params = {
    {"harmonic", {"omega"}},
    {"hydrogen_effective", {"l", "h1", "h2"}},
    {"lennard_jones", {"l", "h1", "h2", "epsilon", "sigma"}},
};

const std::set<std::string> solver_keys = {"v0", "x0", "slicing", "half_width", "ratio", "taylor_order",
                                           "lambda_order", "eps_trunc", "eps_validity", "reconstruction"};
const std::set<std::string> scan_keys = {"e_min", "e_max", "n_grid", "refine_tol", "max_iter", "symmetric"};
const std::set<std::string> output_keys = {"dir", "formats", "states", "sample_points", "sample_min",
                                           "sample_max"};
const std::set<std::string> root_keys = {"units", "potential", "solver", "scan", "output"};

class Reader {
public:
    Reader(const toml::table& root, std::string origin) : root_(root), origin_(std::move(origin)) {}

    std::string where(const toml::node* n) const
    {
        if (n && n->source().begin.line > 0)
            return fmt::format("{}:{}", origin_, n->source().begin.line);
        return origin_;
    }

    [[noreturn]] void fail(const toml::node* n, const std::string& msg) const
    {
        throw ConfigError(fmt::format("{}: {}", where(n), msg));
    }

    const toml::table* section(const std::string& name, bool required) const
    {
        const toml::node* n = root_.get(name);
        if (!n) {
            if (required)
                fail(&root_, fmt::format("missing required section [{}]", name));
            return nullptr;
        }
        if (!n->is_table())
            fail(n, fmt::format("'{}' must be a table", name));
        return n->as_table();
    }

    void check_keys(const toml::table& t, const std::set<std::string>& allowed, const std::string& sec) const
    {
        for (const auto& [k, v] : t)
            if (!allowed.count(std::string(k.str())))
                fail(&v, fmt::format("unknown key '{}' in [{}]", k.str(), sec));
    }

    const toml::node* need(const toml::table& t, const std::string& key, const std::string& sec) const
    {
        const toml::node* n = t.get(key);
        if (!n)
            fail(&t, fmt::format("[{}] is missing required key '{}'", sec, key));
        return n;
    }

    real number(const toml::node* n, const std::string& key) const
    {
        auto v = n->value<double>();
        if (!v || !(n->is_floating_point() || n->is_integer()))
            fail(n, fmt::format("'{}' must be a number", key));
        if (!std::isfinite(*v))
            fail(n, fmt::format("'{}' must be finite", key));
        return *v;
    }

    int integer(const toml::node* n, const std::string& key) const
    {
        const real v = number(n, key);
        if (v != std::floor(v) || std::abs(v) > 1e9)
            fail(n, fmt::format("'{}' must be an integer", key));
        return static_cast<int>(v);
    }

    bool boolean(const toml::node* n, const std::string& key) const
    {
        auto v = n->value<bool>();
        if (!v || !n->is_boolean())
            fail(n, fmt::format("'{}' must be true or false", key));
        return *v;
    }

    std::string string(const toml::node* n, const std::string& key) const
    {
        if (!n->is_string())
            fail(n, fmt::format("'{}' must be a string", key));
        return *n->value<std::string>();
    }

    template <class T, class F>
    void opt(const toml::table& t, const std::string& key, T& dst, F&& conv) const
    {
        if (const toml::node* n = t.get(key))
            dst = conv(n, key);
    }

    const toml::table& root() const { return root_; }
    const std::string& origin() const { return origin_; }

private:
    const toml::table& root_;
    std::string origin_;
};

RunConfig from_table(const toml::table& root, const std::string& origin)
{
    Reader r(root, origin);
    RunConfig cfg;
    cfg.origin = origin;
    r.check_keys(root, root_keys, "root");

    if (const toml::node* u = root.get("units")) {
        const std::string s = r.string(u, "units");
        if (s != "natural" && s != "raw")
            r.fail(u, "'units' must be \"natural\" or \"raw\"");
        cfg.natural_units = s == "natural";
    }

    auto num = [&](const toml::node* n, const std::string& k) { return r.number(n, k); };
    auto integer = [&](const toml::node* n, const std::string& k) { return r.integer(n, k); };
    auto str = [&](const toml::node* n, const std::string& k) { return r.string(n, k); };
    auto boolean = [&](const toml::node* n, const std::string& k) { return r.boolean(n, k); };

    const toml::table& pot = *r.section("potential", true);
    const toml::node* name_node = r.need(pot, "name", "potential");
    cfg.potential = r.string(name_node, "name");
    if (cfg.potential == "hydrogen")
        cfg.potential = "hydrogen_effective";
    auto known = potential_params.find(cfg.potential);
    if (known == potential_params.end())
        r.fail(name_node, fmt::format("unknown potential '{}' (harmonic, hydrogen_effective, lennard_jones)",
                                      cfg.potential));
    for (const auto& [k, v] : pot) {
        const std::string key(k.str());
        if (key == "name")
            continue;
        if (!known->second.count(key))
            r.fail(&v, fmt::format("unknown parameter '{}' for potential '{}'", key, cfg.potential));
        cfg.params[key] = key == "l" ? r.integer(&v, key) : r.number(&v, key);
    }

    const toml::table& solver = *r.section("solver", true);
    r.check_keys(solver, solver_keys, "solver");
    cfg.v0 = r.number(r.need(solver, "v0", "solver"), "v0");
    if (const toml::node* n = solver.get("x0"))
        cfg.x0 = r.number(n, "x0");
    r.opt(solver, "slicing", cfg.slicing, str);
    if (cfg.slicing != "uniform" && cfg.slicing != "geometric")
        r.fail(solver.get("slicing"), "'slicing' must be \"uniform\" or \"geometric\"");
    r.opt(solver, "half_width", cfg.half_width, num);
    r.opt(solver, "ratio", cfg.ratio, num);
    r.opt(solver, "taylor_order", cfg.taylor_order, integer);
    r.opt(solver, "lambda_order", cfg.lambda_order, integer);
    r.opt(solver, "eps_trunc", cfg.eps_trunc, num);
    r.opt(solver, "eps_validity", cfg.eps_validity, num);
    r.opt(solver, "reconstruction", cfg.reconstruction, str);
    if (cfg.reconstruction != "stabilized" && cfg.reconstruction != "direct")
        r.fail(solver.get("reconstruction"), "'reconstruction' must be \"stabilized\" or \"direct\"");

    if (cfg.slicing == "uniform" && !(cfg.half_width > 0))
        r.fail(solver.get("half_width"), "'half_width' must be > 0");
    if (cfg.slicing == "geometric" && !(cfg.ratio > 1))
        r.fail(solver.get("ratio") ? solver.get("ratio") : &solver, "'ratio' must be > 1 for geometric slicing");
    if (cfg.taylor_order < 0)
        r.fail(solver.get("taylor_order"), "'taylor_order' must be >= 0");
    if (cfg.lambda_order < 3 || cfg.lambda_order < cfg.taylor_order + 2)
        r.fail(solver.get("lambda_order") ? solver.get("lambda_order") : &solver,
               fmt::format("'lambda_order' ({}) must be >= max(3, taylor_order + 2 = {})", cfg.lambda_order,
                           cfg.taylor_order + 2));
    if (!(cfg.eps_trunc > 0))
        r.fail(solver.get("eps_trunc"), "'eps_trunc' must be > 0");
    if (!(cfg.eps_validity > 0))
        r.fail(solver.get("eps_validity"), "'eps_validity' must be > 0");

    const toml::table& scan = *r.section("scan", true);
    r.check_keys(scan, scan_keys, "scan");
    cfg.e_min = r.number(r.need(scan, "e_min", "scan"), "e_min");
    cfg.e_max = r.number(r.need(scan, "e_max", "scan"), "e_max");
    r.opt(scan, "n_grid", cfg.n_grid, integer);
    r.opt(scan, "refine_tol", cfg.refine_tol, num);
    r.opt(scan, "max_iter", cfg.max_iter, integer);
    r.opt(scan, "symmetric", cfg.symmetric, boolean);
    if (!(cfg.e_min < cfg.e_max))
        r.fail(scan.get("e_max"), fmt::format("'e_min' ({}) must be < 'e_max' ({})", cfg.e_min, cfg.e_max));
    if (cfg.n_grid < 2)
        r.fail(scan.get("n_grid"), "'n_grid' must be >= 2");
    if (!(cfg.refine_tol > 0))
        r.fail(scan.get("refine_tol"), "'refine_tol' must be > 0");
    if (cfg.max_iter < 1)
        r.fail(scan.get("max_iter"), "'max_iter' must be >= 1");

    if (const toml::table* out = r.section("output", false)) {
        r.check_keys(*out, output_keys, "output");
        if (const toml::node* n = out->get("dir"))
            cfg.output.dir = r.string(n, "dir");
        if (const toml::node* n = out->get("formats")) {
            if (!n->is_array())
                r.fail(n, "'formats' must be an array of strings");
            cfg.output.formats.clear();
            for (const toml::node& f : *n->as_array()) {
                const std::string s = r.string(&f, "formats");
                if (s != "csv" && s != "json")
                    r.fail(&f, fmt::format("unknown output format '{}' (csv, json)", s));
                cfg.output.formats.push_back(s);
            }
        }
        if (const toml::node* n = out->get("states")) {
            if (!n->is_array())
                r.fail(n, "'states' must be an array of integers");
            std::vector<int> states;
            for (const toml::node& s : *n->as_array()) {
                const int v = r.integer(&s, "states");
                if (v < 0)
                    r.fail(&s, "state indices must be >= 0");
                states.push_back(v);
            }
            cfg.output.states = states;
        }
        r.opt(*out, "sample_points", cfg.output.sample_points, integer);
        if (cfg.output.sample_points < 2)
            r.fail(out->get("sample_points"), "'sample_points' must be >= 2");
        if (const toml::node* n = out->get("sample_min"))
            cfg.output.sample_min = r.number(n, "sample_min");
        if (const toml::node* n = out->get("sample_max"))
            cfg.output.sample_max = r.number(n, "sample_max");
    }

    // cross-field checks that need the model
    PotentialModel model;
    try {
        model = build_model(cfg);
    } catch (const ParameterError& e) {
        r.fail(&pot, e.what());
    }
    const real unit = cfg.natural_units ? model.energy_unit() : 1.0;
    const real lo = std::min(cfg.e_min * unit, cfg.e_max * unit);
    const real hi = std::max(cfg.e_min * unit, cfg.e_max * unit);
    if (!(cfg.v0 * unit < lo))
        r.fail(solver.get("v0"), fmt::format("'v0' ({}) must lie below the scan window", cfg.v0));
    if (!(hi < model.asymptote()))
        r.fail(&scan, fmt::format("scan window must lie below the potential asymptote ({} raw)", model.asymptote()));
    if (cfg.x0 && !(*cfg.x0 > model.domain_lo() && *cfg.x0 < model.domain_hi()))
        r.fail(solver.get("x0"), fmt::format("'x0' ({}) must lie inside the domain ({}, {})", *cfg.x0,
                                             model.domain_lo(), model.domain_hi()));
    if (cfg.slicing == "geometric" && model.domain_lo() < 0)
        r.fail(solver.get("slicing"), "geometric slicing needs a domain on the positive half-line");
    return cfg;
}

void put(toml::table& t, const std::string& key, const json& v);

void push(toml::array& a, const json& v)
{
    if (v.is_boolean())
        a.push_back(v.get<bool>());
    else if (v.is_number_integer())
        a.push_back(v.get<std::int64_t>());
    else if (v.is_number())
        a.push_back(v.get<double>());
    else if (v.is_string())
        a.push_back(v.get<std::string>());
    else
        throw ConfigError("unsupported array element in JSON config");
}

void put(toml::table& t, const std::string& key, const json& v)
{
    if (v.is_null())
        return;
    if (v.is_object()) {
        toml::table sub;
        for (const auto& [k, e] : v.items())
            put(sub, k, e);
        t.insert_or_assign(key, std::move(sub));
    } else if (v.is_array()) {
        toml::array arr;
        for (const json& e : v)
            push(arr, e);
        t.insert_or_assign(key, std::move(arr));
    } else if (v.is_boolean()) {
        t.insert_or_assign(key, v.get<bool>());
    } else if (v.is_number_integer()) {
        t.insert_or_assign(key, v.get<std::int64_t>());
    } else if (v.is_number()) {
        t.insert_or_assign(key, v.get<double>());
    } else {
        t.insert_or_assign(key, v.get<std::string>());
    }
}

} // namespace

RunConfig parse_toml(const std::string& text, const std::string& origin)
{
    toml::table root;
    try {
        root = toml::parse(text, origin);
    } catch (const toml::parse_error& e) {
        throw ConfigError(fmt::format("{}:{}:{}: {}", origin, e.source().begin.line, e.source().begin.column,
                                      e.description()));
    }
    return from_table(root, origin);
}

RunConfig parse_json(const std::string& text, const std::string& origin)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("{}: byte {}: {}", origin, e.byte, e.what()));
    }
    if (!j.is_object())
        throw ConfigError(fmt::format("{}: JSON config must be an object", origin));
    if (j.contains("config"))
        j = j["config"];
    toml::table root;
    for (const auto& [k, v] : j.items())
        put(root, k, v);
    return from_table(root, origin);
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(fmt::format("{}: cannot read config file", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    if (path.extension() == ".json")
        return parse_json(text, path.string());
    return parse_toml(text, path.string());
}

json to_json(const RunConfig& cfg)
{
    json pot = {{"name", cfg.potential}};
    for (const auto& [k, v] : cfg.params) {
        if (k == "l")
            pot[k] = static_cast<int>(v);
        else
            pot[k] = v;
    }
    json solver = {{"v0", cfg.v0},
                   {"slicing", cfg.slicing},
                   {"taylor_order", cfg.taylor_order},
                   {"lambda_order", cfg.lambda_order},
                   {"eps_trunc", cfg.eps_trunc},
                   {"eps_validity", cfg.eps_validity},
                   {"reconstruction", cfg.reconstruction}};
    if (cfg.slicing == "uniform")
        solver["half_width"] = cfg.half_width;
    else
        solver["ratio"] = cfg.ratio;
    if (cfg.x0)
        solver["x0"] = *cfg.x0;
    json scan = {{"e_min", cfg.e_min},         {"e_max", cfg.e_max},       {"n_grid", cfg.n_grid},
                 {"refine_tol", cfg.refine_tol}, {"max_iter", cfg.max_iter}, {"symmetric", cfg.symmetric}};
    json output = {{"dir", cfg.output.dir.string()},
                   {"formats", cfg.output.formats},
                   {"sample_points", cfg.output.sample_points}};
    if (cfg.output.states)
        output["states"] = *cfg.output.states;
    if (cfg.output.sample_min)
        output["sample_min"] = *cfg.output.sample_min;
    if (cfg.output.sample_max)
        output["sample_max"] = *cfg.output.sample_max;
    return {{"units", cfg.natural_units ? "natural" : "raw"},
            {"potential", pot},
            {"solver", solver},
            {"scan", scan},
            {"output", output}};
}

PotentialModel build_model(const RunConfig& cfg)
{
    return make_builtin(cfg.potential, cfg.params);
}

ScanConfig build_scan(const RunConfig& cfg, const PotentialModel& model, unsigned threads)
{
    const real unit = cfg.natural_units ? model.energy_unit() : 1.0;
    ScanConfig sc;
    sc.e_min = std::min(cfg.e_min * unit, cfg.e_max * unit);
    sc.e_max = std::max(cfg.e_min * unit, cfg.e_max * unit);
    sc.n_grid = cfg.n_grid;
    sc.x0 = cfg.x0;
    sc.sweep.v0 = cfg.v0 * unit;
    sc.sweep.slicing = cfg.slicing == "uniform" ? Slicing::uniform(cfg.half_width) : Slicing::geometric(cfg.ratio);
    sc.sweep.taylor_order = cfg.taylor_order;
    sc.sweep.lambda_order = cfg.lambda_order;
    sc.sweep.eps_trunc = cfg.eps_trunc;
    sc.refine_tol = cfg.refine_tol;
    sc.max_iter = cfg.max_iter;
    sc.symmetric = cfg.symmetric;
    sc.threads = threads;
    validate(model, sc);
    return sc;
}

} // namespace smx::cli
