#pragma once

#include <jedi/common.hpp>

#include <cmath>
#include <string>

namespace jedi::es {

enum class Engine { sep_cma, lm_ma };

inline std::string to_string(Engine e) { return e == Engine::sep_cma ? "sep-cma" : "lm-ma"; }

inline Engine parse_engine(const std::string& s)
{
    if (s == "sep-cma")
        return Engine::sep_cma;
    if (s == "lm-ma")
        return Engine::lm_ma;
    throw ConfigError("unknown ES engine '" + s + "' (expected sep-cma or lm-ma)");
}

struct EsConfig {
    Engine engine = Engine::sep_cma;
    int dim = 1;
    int population = 16;
    double sigma_init = 0.05;
    double elite_ratio = 0.5;
    int memory = 0; ///< lm-ma direction vectors; 0 selects floor(4 + 3 ln dim)

    int mu() const { return std::max(1, static_cast<int>(std::ceil(elite_ratio * population - 1e-12))); }

    int memory_vectors() const
    {
        return memory > 0 ? memory : static_cast<int>(std::floor(4.0 + 3.0 * std::log(static_cast<double>(dim))));
    }

    void validate() const
    {
        if (dim < 1)
            throw ConfigError("es.dim must be >= 1");
        if (population < 1)
            throw ConfigError("es.population must be >= 1");
        if (!(sigma_init > 0.0) || !std::isfinite(sigma_init))
            throw ConfigError("es.sigma_init must be > 0");
        if (!(elite_ratio > 0.0 && elite_ratio <= 1.0))
            throw ConfigError("es.elite_ratio must be in (0, 1]");
        if (memory < 0)
            throw ConfigError("es.memory must be >= 0");
    }
};

} // namespace jedi::es
