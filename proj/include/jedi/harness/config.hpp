#pragma once

#include <jedi/algo/es_restart.hpp>
#include <jedi/algo/jedi.hpp>
#include <jedi/algo/map_elites.hpp>
#include <jedi/common.hpp>
#include <jedi/env/environment.hpp>
#include <jedi/kv_format.hpp>

#include <cstdint>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace jedi::harness {

enum class Method { jedi, map_elites, es, es_restart };

inline std::string to_string(Method m)
{
    switch (m) {
    case Method::jedi: return "jedi";
    case Method::map_elites: return "map-elites";
    case Method::es: return "es";
    case Method::es_restart: return "es-restart";
    }
    return "?";
}

inline Method parse_method(const std::string& s)
{
    if (s == "jedi")
        return Method::jedi;
    if (s == "map-elites")
        return Method::map_elites;
    if (s == "es")
        return Method::es;
    if (s == "es-restart")
        return Method::es_restart;
    throw ConfigError("'method': unknown method '" + s + "' (expected jedi, map-elites, es or es-restart)");
}

struct ExperimentConfig {
    Method method = Method::jedi;
    std::string env = "deceptive-trap"; ///< maze:<file> | sphere | rastrigin | deceptive-trap
    std::vector<std::uint64_t> seeds;
    std::int64_t eval_budget = 200000;
    std::string output_dir = "results";

    // [archive]
    int centroids = 1024;
    std::uint64_t centroid_seed = 0;
    int n_init = 128;

    // [es]
    es::Engine engine = es::Engine::sep_cma;
    int population = 16; ///< 16 for jedi, 64 otherwise unless given
    double sigma_init = 0.05;
    double elite_ratio = 0.5;
    int memory = 0;

    // [jedi]
    int n_es = 4;
    int generations = 100;
    int loops = 0;
    targeting::Selection selection = targeting::Selection::weighted_gp;

    // [wtfs]
    scoring::WtfsConfig wtfs{};

    // [map_elites]
    int batch = 64;
    double iso_sigma = 0.2;
    double line_sigma = 0.0;

    // [restart]
    int restart_window = 20;
    double restart_tolerance = 1e-6;

    // [task]
    int task_dim = 10;

    // [gp]
    int gp_restarts = 8;
    int gp_evaluations = 60;
    int gp_search_points = 128;

    /// Directory maze paths are resolved against (not serialized).
    std::string base_dir = ".";

    bool operator==(const ExperimentConfig&) const;
};

inline bool operator_eq_wtfs(const scoring::WtfsConfig& a, const scoring::WtfsConfig& b)
{
    return a.schedule == b.schedule && a.alpha == b.alpha && a.alpha_start == b.alpha_start && a.alpha_end == b.alpha_end;
}

inline bool ExperimentConfig::operator==(const ExperimentConfig& o) const
{
    return method == o.method && env == o.env && seeds == o.seeds && eval_budget == o.eval_budget
           && output_dir == o.output_dir && centroids == o.centroids && centroid_seed == o.centroid_seed
           && n_init == o.n_init && engine == o.engine && population == o.population && sigma_init == o.sigma_init
           && elite_ratio == o.elite_ratio && memory == o.memory && n_es == o.n_es && generations == o.generations
           && loops == o.loops && selection == o.selection && operator_eq_wtfs(wtfs, o.wtfs) && batch == o.batch
           && iso_sigma == o.iso_sigma && line_sigma == o.line_sigma && restart_window == o.restart_window
           && restart_tolerance == o.restart_tolerance && task_dim == o.task_dim && gp_restarts == o.gp_restarts
           && gp_evaluations == o.gp_evaluations && gp_search_points == o.gp_search_points;
}

inline bool is_maze_env(const std::string& env) { return env.starts_with("maze:"); }

inline std::filesystem::path maze_path(const ExperimentConfig& c)
{
    std::filesystem::path p(c.env.substr(5));
    return p.is_absolute() ? p : std::filesystem::path(c.base_dir) / p;
}

inline env::AnyEnvironment make_environment(const ExperimentConfig& c)
{
    if (is_maze_env(c.env)) {
        env::MazeEnvironment m;
        m.maze = env::load_maze(maze_path(c).string());
        return m;
    }
    env::SyntheticEnvironment s;
    if (c.env == "sphere")
        s.task.kind = env::SyntheticKind::sphere;
    else if (c.env == "rastrigin")
        s.task.kind = env::SyntheticKind::rastrigin;
    else if (c.env == "deceptive-trap")
        s.task.kind = env::SyntheticKind::deceptive_trap;
    else
        throw ConfigError("'env': unknown environment '" + c.env
                          + "' (expected maze:<file>, sphere, rastrigin or deceptive-trap)");
    s.task.dim = c.task_dim;
    return s;
}

namespace detail {

inline void check(bool ok, std::string_view key, const std::string& what)
{
    if (!ok)
        throw ConfigError("'" + std::string(key) + "': " + what);
}

} // namespace detail

/// Constraint checks that do not need the file system.
inline void validate(const ExperimentConfig& c)
{
    using detail::check;
    check(!c.seeds.empty(), "seeds", "at least one seed is required");
    check(std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() == c.seeds.size(), "seeds",
          "seeds must be distinct");
    check(c.eval_budget >= 1, "eval_budget", "must be >= 1");
    check(c.centroids >= 1, "archive.centroids", "must be >= 1");
    check(c.n_init >= 1, "archive.n_init", "must be >= 1");
    check(c.population >= 1, "es.population", "must be >= 1");
    check(c.sigma_init > 0.0 && std::isfinite(c.sigma_init), "es.sigma_init", "must be > 0");
    check(c.elite_ratio > 0.0 && c.elite_ratio <= 1.0, "es.elite_ratio", "must be in (0, 1]");
    check(c.memory >= 0, "es.memory", "must be >= 0");
    check(c.n_es >= 1, "jedi.n_es", "must be >= 1");
    check(c.generations >= 1, "jedi.generations", "must be >= 1");
    check(c.loops >= 0, "jedi.loops", "must be >= 0");
    check(c.wtfs.alpha >= 0.0 && c.wtfs.alpha <= 1.0, "wtfs.alpha", "alpha out of [0,1]");
    check(c.wtfs.alpha_start >= 0.0 && c.wtfs.alpha_start <= 1.0, "wtfs.alpha_start", "alpha out of [0,1]");
    check(c.wtfs.alpha_end >= 0.0 && c.wtfs.alpha_end <= 1.0, "wtfs.alpha_end", "alpha out of [0,1]");
    check(c.batch >= 1, "map_elites.batch", "must be >= 1");
    check(c.iso_sigma >= 0.0, "map_elites.iso_sigma", "must be >= 0");
    check(c.line_sigma >= 0.0, "map_elites.line_sigma", "must be >= 0");
    check(c.restart_window >= 1, "restart.window", "must be >= 1");
    check(c.restart_tolerance >= 0.0, "restart.tolerance", "must be >= 0");
    check(c.task_dim >= 2, "task.dim", "must be >= 2");
    check(c.gp_restarts >= 1, "gp.restarts", "must be >= 1");
    check(c.gp_evaluations >= 4, "gp.evaluations", "must be >= 4");
    check(c.gp_search_points >= 0, "gp.search_points", "must be >= 0");
    if (c.method == Method::jedi || c.method == Method::map_elites)
        check(c.eval_budget >= c.n_init, "eval_budget", "smaller than archive.n_init");
    else
        check(c.eval_budget >= c.population, "eval_budget", "smaller than one ES population");
    if (!is_maze_env(c.env))
        check(c.env == "sphere" || c.env == "rastrigin" || c.env == "deceptive-trap", "env",
              "unknown environment '" + c.env + "'");
    else
        check(c.env.size() > 5, "env", "maze: needs a file name");
}

/// Parses the key-value text. Omitted fields take their defaults; unknown
/// keys and sections are rejected with the offending key named.
inline ExperimentConfig parse_config(std::string_view text, const std::string& where = "<config>",
                                     const std::string& base_dir = ".")
{
    const kv::Document doc = kv::parse(text, where);
    static const std::set<std::string> known{"archive", "es", "jedi", "wtfs", "map_elites", "restart", "task", "gp"};
    for (const auto& s : doc.sections)
        if (!s.name.empty() && (s.repeated || !known.count(s.name)))
            throw ConfigError(where + ":" + std::to_string(s.line) + ": unknown section [" + s.name + "]");

    ExperimentConfig c;
    c.base_dir = base_dir;
    auto int_of = [](kv::SectionReader& r, std::string_view key, int fallback) {
        auto v = r.integer(key);
        if (!v)
            return fallback;
        if (*v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max())
            throw r.error(key, "out of range");
        return static_cast<int>(*v);
    };
    auto u64_of = [](kv::SectionReader& r, std::string_view key, std::uint64_t fallback) {
        auto v = r.integer(key);
        if (!v)
            return fallback;
        if (*v < 0)
            throw r.error(key, "must be >= 0");
        return static_cast<std::uint64_t>(*v);
    };

    kv::SectionReader root(&doc.root(), "");
    c.method = parse_method(root.require(root.string("method"), "method"));
    c.env = root.require(root.string("env"), "env");
    if (auto s = root.integers("seeds")) {
        for (auto v : *s) {
            if (v < 0)
                throw root.error("seeds", "seeds must be >= 0");
            c.seeds.push_back(static_cast<std::uint64_t>(v));
        }
    }
    else {
        throw root.error("seeds", "missing required key");
    }
    c.eval_budget = root.integer("eval_budget").value_or(c.eval_budget);
    c.output_dir = root.string("output_dir").value_or(c.output_dir);
    root.finish();

    kv::SectionReader archive(doc.section("archive"), "archive");
    c.centroids = int_of(archive, "centroids", c.centroids);
    c.centroid_seed = u64_of(archive, "centroid_seed", c.centroid_seed);
    c.n_init = int_of(archive, "n_init", c.n_init);
    archive.finish();

    kv::SectionReader es(doc.section("es"), "es");
    if (auto e = es.string("engine")) {
        try {
            c.engine = es::parse_engine(*e);
        }
        catch (const ConfigError& err) {
            throw es.error("engine", err.what());
        }
    }
    c.population = int_of(es, "population", c.method == Method::jedi ? 16 : 64);
    c.sigma_init = es.number("sigma_init").value_or(c.sigma_init);
    c.elite_ratio = es.number("elite_ratio").value_or(c.elite_ratio);
    c.memory = int_of(es, "memory", c.memory);
    es.finish();

    kv::SectionReader jedi(doc.section("jedi"), "jedi");
    c.n_es = int_of(jedi, "n_es", c.n_es);
    c.generations = int_of(jedi, "generations", c.generations);
    c.loops = int_of(jedi, "loops", c.loops);
    if (auto s = jedi.string("selection")) {
        try {
            c.selection = targeting::parse_selection(*s);
        }
        catch (const ConfigError& err) {
            throw jedi.error("selection", err.what());
        }
    }
    jedi.finish();

    kv::SectionReader wtfs(doc.section("wtfs"), "wtfs");
    if (auto s = wtfs.string("schedule")) {
        try {
            c.wtfs.schedule = scoring::parse_schedule(*s);
        }
        catch (const ConfigError& err) {
            throw wtfs.error("schedule", err.what());
        }
    }
    c.wtfs.alpha = wtfs.number("alpha").value_or(c.wtfs.alpha);
    c.wtfs.alpha_start = wtfs.number("alpha_start").value_or(c.wtfs.alpha_start);
    c.wtfs.alpha_end = wtfs.number("alpha_end").value_or(c.wtfs.alpha_end);
    wtfs.finish();

    kv::SectionReader me(doc.section("map_elites"), "map_elites");
    c.batch = int_of(me, "batch", c.batch);
    c.iso_sigma = me.number("iso_sigma").value_or(c.iso_sigma);
    c.line_sigma = me.number("line_sigma").value_or(c.line_sigma);
    me.finish();

    kv::SectionReader rs(doc.section("restart"), "restart");
    c.restart_window = int_of(rs, "window", c.restart_window);
    c.restart_tolerance = rs.number("tolerance").value_or(c.restart_tolerance);
    rs.finish();

    kv::SectionReader task(doc.section("task"), "task");
    c.task_dim = int_of(task, "dim", c.task_dim);
    task.finish();

    kv::SectionReader gp(doc.section("gp"), "gp");
    c.gp_restarts = int_of(gp, "restarts", c.gp_restarts);
    c.gp_evaluations = int_of(gp, "evaluations", c.gp_evaluations);
    c.gp_search_points = int_of(gp, "search_points", c.gp_search_points);
    gp.finish();

    validate(c);
    return c;
}

/// Loads and validates a config file; a referenced maze must exist and parse.
inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    auto dir = std::filesystem::path(path).parent_path();
    ExperimentConfig c = parse_config(ss.str(), path, dir.empty() ? "." : dir.string());
    if (is_maze_env(c.env))
        (void)env::load_maze(maze_path(c).string());
    return c;
}

namespace detail {

inline void write_semantic(std::ostream& out, const ExperimentConfig& c)
{
    using kv::format_number;
    using kv::quote;
    out << "method = " << quote(to_string(c.method)) << "\n";
    out << "env = " << quote(c.env) << "\n";
    out << "eval_budget = " << c.eval_budget << "\n";
    out << "\n[archive]\ncentroids = " << c.centroids << "\ncentroid_seed = " << c.centroid_seed
        << "\nn_init = " << c.n_init << "\n";
    out << "\n[es]\nengine = " << quote(es::to_string(c.engine)) << "\npopulation = " << c.population
        << "\nsigma_init = " << format_number(c.sigma_init) << "\nelite_ratio = " << format_number(c.elite_ratio)
        << "\nmemory = " << c.memory << "\n";
    out << "\n[jedi]\nn_es = " << c.n_es << "\ngenerations = " << c.generations << "\nloops = " << c.loops
        << "\nselection = " << quote(targeting::to_string(c.selection)) << "\n";
    out << "\n[wtfs]\nschedule = " << quote(scoring::to_string(c.wtfs.schedule))
        << "\nalpha = " << format_number(c.wtfs.alpha) << "\nalpha_start = " << format_number(c.wtfs.alpha_start)
        << "\nalpha_end = " << format_number(c.wtfs.alpha_end) << "\n";
    out << "\n[map_elites]\nbatch = " << c.batch << "\niso_sigma = " << format_number(c.iso_sigma)
        << "\nline_sigma = " << format_number(c.line_sigma) << "\n";
    out << "\n[restart]\nwindow = " << c.restart_window << "\ntolerance = " << format_number(c.restart_tolerance)
        << "\n";
    out << "\n[task]\ndim = " << c.task_dim << "\n";
    out << "\n[gp]\nrestarts = " << c.gp_restarts << "\nevaluations = " << c.gp_evaluations
        << "\nsearch_points = " << c.gp_search_points << "\n";
}

} // namespace detail

/// Canonical text with every field explicit; parse_config reads it back unchanged.
inline std::string serialize_config(const ExperimentConfig& c)
{
    std::ostringstream head;
    head << "seeds = [";
    for (std::size_t i = 0; i < c.seeds.size(); ++i)
        head << (i ? ", " : "") << c.seeds[i];
    head << "]\noutput_dir = " << kv::quote(c.output_dir) << "\n";
    std::ostringstream body;
    detail::write_semantic(body, c);
    // Root keys must precede the first section.
    const std::string text = body.str();
    const auto split = text.find("\n\n[");
    return text.substr(0, split + 1) + head.str() + text.substr(split + 1);
}

/// FNV-1a over the canonical text of every field that affects results
/// (seeds and output_dir excluded).
inline std::uint64_t config_hash(const ExperimentConfig& c)
{
    std::ostringstream out;
    detail::write_semantic(out, c);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : out.str()) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex(std::uint64_t v)
{
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4)
        s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

inline algo::JediConfig jedi_config(const ExperimentConfig& c)
{
    algo::JediConfig j;
    j.n_init = c.n_init;
    j.n_es = c.n_es;
    j.loops = c.loops;
    j.generations = c.generations;
    j.es = {c.engine, 1, c.population, c.sigma_init, c.elite_ratio, c.memory};
    j.wtfs = c.wtfs;
    j.selection = c.selection;
    j.eval_budget = c.eval_budget;
    j.gp.restarts = c.gp_restarts;
    j.gp.evaluations_per_restart = c.gp_evaluations;
    j.gp.search_max_points = static_cast<std::size_t>(c.gp_search_points);
    return j;
}

inline algo::MapElitesConfig map_elites_config(const ExperimentConfig& c)
{
    return {c.n_init, c.batch, c.iso_sigma, c.line_sigma, c.eval_budget};
}

inline algo::EsRunConfig es_config(const ExperimentConfig& c)
{
    algo::EsRunConfig e;
    e.es = {c.engine, 1, c.population, c.sigma_init, c.elite_ratio, c.memory};
    e.restart = c.method == Method::es_restart;
    e.window = c.restart_window;
    e.tolerance = c.restart_tolerance;
    e.eval_budget = c.eval_budget;
    return e;
}

} // namespace jedi::harness
