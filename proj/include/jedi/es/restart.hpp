#pragma once

#include <jedi/common.hpp>

#include <cmath>
#include <deque>
#include <limits>
#include <span>

namespace jedi::es {

/// Convergence detector for restart-ES: fires once the last `window`
/// generations all had a raw-fitness range below tol * (1 + |best|).
class RestartMonitor {
public:
    explicit RestartMonitor(int window = 20, double tolerance = 1e-6) : window_(window), tolerance_(tolerance)
    {
        if (window < 1)
            throw ConfigError("restart window must be >= 1");
        if (!(tolerance >= 0.0))
            throw ConfigError("restart tolerance must be >= 0");
    }

    struct Record {
        double range;
        double best;
    };

    /// Records one generation's fitnesses; returns should_restart().
    bool observe(std::span<const double> fitnesses)
    {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        bool finite = !fitnesses.empty();
        for (double f : fitnesses) {
            if (!std::isfinite(f))
                finite = false;
            lo = std::min(lo, f);
            hi = std::max(hi, f);
        }
        history_.push_back(finite ? Record{hi - lo, hi} : Record{std::numeric_limits<double>::infinity(), 0.0});
        while (static_cast<int>(history_.size()) > window_)
            history_.pop_front();
        return should_restart();
    }

    bool should_restart() const
    {
        if (static_cast<int>(history_.size()) < window_)
            return false;
        for (const auto& r : history_)
            if (!(r.range < tolerance_ * (1.0 + std::abs(r.best))))
                return false;
        return true;
    }

    void reset() { history_.clear(); }
    const std::deque<Record>& history() const { return history_; }

private:
    int window_;
    double tolerance_;
    std::deque<Record> history_;
};

} // namespace jedi::es
