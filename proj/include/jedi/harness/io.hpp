#pragma once

#include <jedi/algo/run_result.hpp>
#include <jedi/common.hpp>
#include <jedi/kv_format.hpp>

#include <charconv>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace jedi::harness {

inline constexpr const char* metrics_header = "evaluations,best_fitness,coverage,alpha,loop";

inline void write_metrics_csv(std::ostream& out, const std::vector<algo::MetricsRow>& rows)
{
    using kv::format_number;
    out << metrics_header << "\n";
    for (const auto& r : rows) {
        out << r.evaluations << ',' << format_number(r.best_fitness) << ',' << format_number(r.coverage) << ',';
        if (r.alpha)
            out << format_number(*r.alpha);
        out << ',';
        if (r.loop)
            out << *r.loop;
        out << "\n";
    }
}

inline void write_timing_csv(std::ostream& out, const std::vector<algo::MetricsRow>& rows)
{
    out << "evaluations,wall_ms\n";
    for (const auto& r : rows)
        out << r.evaluations << ',' << r.wall_ms << "\n";
}

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        }
        else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& s, const std::string& what)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        // from_chars rejects "inf"; accept the spellings format_number emits.
        if (s == "inf")
            return std::numeric_limits<double>::infinity();
        if (s == "-inf")
            return -std::numeric_limits<double>::infinity();
        throw std::runtime_error("bad number '" + s + "' in " + what);
    }
    return v;
}

inline std::int64_t parse_int(const std::string& s, const std::string& what)
{
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::runtime_error("bad integer '" + s + "' in " + what);
    return v;
}

inline std::vector<algo::MetricsRow> read_metrics_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(metrics_header))
        throw std::runtime_error("'" + path + "' does not start with the metrics header");
    std::vector<algo::MetricsRow> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto f = split_csv_line(line);
        if (f.size() != 5)
            throw std::runtime_error("malformed row in '" + path + "'");
        algo::MetricsRow r;
        r.evaluations = parse_int(f[0], path);
        r.best_fitness = parse_double(f[1], path);
        r.coverage = parse_double(f[2], path);
        if (!f[3].empty())
            r.alpha = parse_double(f[3], path);
        if (!f[4].empty())
            r.loop = parse_int(f[4], path);
        rows.push_back(r);
    }
    return rows;
}

struct BestGenome {
    env::EpisodeResult result;
    Genome genome;
};

inline void write_best_csv(std::ostream& out, const Genome& g, const env::EpisodeResult& r)
{
    using kv::format_number;
    out << "fitness,descriptor_x,descriptor_y,steps_used,reached_target";
    for (Eigen::Index i = 0; i < g.size(); ++i)
        out << ",g" << i;
    out << "\n"
        << format_number(r.fitness) << ',' << format_number(r.descriptor.x) << ',' << format_number(r.descriptor.y)
        << ',' << r.steps_used << ',' << (r.reached_target ? 1 : 0);
    for (Eigen::Index i = 0; i < g.size(); ++i)
        out << ',' << format_number(g[i]);
    out << "\n";
}

inline BestGenome read_best_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open genome file '" + path + "'");
    std::string header, row;
    if (!std::getline(in, header) || !std::getline(in, row))
        throw ConfigError("genome file '" + path + "' needs a header and one row");
    auto h = split_csv_line(header);
    auto f = split_csv_line(row);
    if (h.size() < 5 || h[0] != "fitness" || f.size() != h.size())
        throw ConfigError("genome file '" + path + "' is malformed");
    try {
        BestGenome b;
        b.result.fitness = parse_double(f[0], path);
        b.result.descriptor = {parse_double(f[1], path), parse_double(f[2], path)};
        b.result.steps_used = static_cast<int>(parse_int(f[3], path));
        b.result.reached_target = parse_int(f[4], path) != 0;
        b.genome.resize(static_cast<Eigen::Index>(f.size() - 5));
        for (std::size_t i = 5; i < f.size(); ++i)
            b.genome[static_cast<Eigen::Index>(i - 5)] = parse_double(f[i], path);
        return b;
    }
    catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
}

} // namespace jedi::harness
