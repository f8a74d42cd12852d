#pragma once

#include <jedi/archive/centroids.hpp>
#include <jedi/common.hpp>
#include <jedi/kv_format.hpp>

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

namespace jedi::archive {

struct Cell {
    std::optional<Genome> elite;
    double elite_fitness = 0.0; // meaningful only when elite is set
    Vec2 elite_descriptor;      // the elite's own descriptor, not the centroid
    std::int64_t count = 0;     // every evaluation assigned here, improving or not

    bool filled() const { return elite.has_value(); }
};

enum class AddOutcome {
    added,        ///< cell was empty or the fitness strictly improved on the elite
    not_improved, ///< counted, elite kept
    rejected,     ///< non-finite fitness or descriptor; nothing changed
};

struct EliteRef {
    std::size_t cell;
    const Genome* genome;
    Vec2 descriptor;
};

/// Rows for the behavior-fitness surrogate: one per filled cell.
struct GpTrainingSet {
    std::vector<Vec2> inputs; // centroid coordinates
    std::vector<double> fitness;
    std::vector<std::int64_t> counts;
};

/// CVT MAP-Elites repertoire: best genome, its fitness and the evaluation
/// count per cell. Not thread-safe for writes.
class Repertoire {
public:
    explicit Repertoire(Centroids centroids) : centroids_(std::move(centroids)), index_(centroids_.points)
    {
        cells_.resize(centroids_.size());
    }

    std::size_t size() const { return cells_.size(); }
    const Centroids& centroids() const { return centroids_; }
    const Cell& cell(std::size_t i) const { return cells_.at(i); }
    const std::vector<Cell>& cells() const { return cells_; }
    /// Filled cell indices in the order they were first filled.
    const std::vector<std::size_t>& filled_cells() const { return filled_; }
    std::int64_t total_evaluations() const { return total_; }
    double coverage() const { return static_cast<double>(filled_.size()) / static_cast<double>(cells_.size()); }

    std::size_t nearest_cell(Vec2 descriptor) const { return index_.nearest(descriptor); }

    AddOutcome add(const Genome& genome, double fitness, Vec2 descriptor)
    {
        if (!std::isfinite(fitness) || !std::isfinite(descriptor.x) || !std::isfinite(descriptor.y))
            return AddOutcome::rejected;
        Cell& c = cells_[nearest_cell(descriptor)];
        ++c.count;
        ++total_;
        if (c.filled() && !(fitness > c.elite_fitness))
            return AddOutcome::not_improved;
        if (!c.filled())
            filled_.push_back(static_cast<std::size_t>(&c - cells_.data()));
        c.elite = genome;
        c.elite_fitness = fitness;
        c.elite_descriptor = descriptor;
        return AddOutcome::added;
    }

    /// Elite whose own descriptor is closest to `target`; ties by cell index.
    EliteRef nearest_elite(Vec2 target) const
    {
        if (filled_.empty())
            throw PreconditionError("nearest_elite on an empty repertoire");
        std::size_t best = cells_.size();
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            if (!cells_[i].filled())
                continue;
            const double d2 = (cells_[i].elite_descriptor - target).squared_norm();
            if (d2 < best_d2) {
                best_d2 = d2;
                best = i;
            }
        }
        return {best, &*cells_[best].elite, cells_[best].elite_descriptor};
    }

    std::optional<std::size_t> best_cell() const
    {
        std::optional<std::size_t> best;
        for (std::size_t i : filled_)
            if (!best || cells_[i].elite_fitness > cells_[*best].elite_fitness
                || (cells_[i].elite_fitness == cells_[*best].elite_fitness && i < *best))
                best = i;
        return best;
    }

    GpTrainingSet gp_training_set() const
    {
        if (filled_.empty())
            throw PreconditionError("gp_training_set on an empty repertoire");
        GpTrainingSet set;
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            if (!cells_[i].filled())
                continue;
            set.inputs.push_back(centroids_.points[i]);
            set.fitness.push_back(cells_[i].elite_fitness);
            set.counts.push_back(cells_[i].count);
        }
        return set;
    }

private:
    Centroids centroids_;
    GridIndex index_;
    std::vector<Cell> cells_;
    std::vector<std::size_t> filled_;
    std::int64_t total_ = 0;
};

/// One row per filled cell:
/// cell_index,centroid_x,centroid_y,descriptor_x,descriptor_y,elite_fitness,count,g0,g1,...
inline void write_archive_csv(std::ostream& out, const Repertoire& rep)
{
    using kv::format_number;
    Eigen::Index dim = 0;
    for (const auto& c : rep.cells())
        if (c.filled()) {
            dim = c.elite->size();
            break;
        }
    out << "cell_index,centroid_x,centroid_y,descriptor_x,descriptor_y,elite_fitness,count";
    for (Eigen::Index j = 0; j < dim; ++j)
        out << ",g" << j;
    out << "\n";
    for (std::size_t i = 0; i < rep.size(); ++i) {
        const Cell& c = rep.cell(i);
        if (!c.filled())
            continue;
        const Vec2 p = rep.centroids().points[i];
        out << i << ',' << format_number(p.x) << ',' << format_number(p.y) << ',' << format_number(c.elite_descriptor.x)
            << ',' << format_number(c.elite_descriptor.y) << ',' << format_number(c.elite_fitness) << ',' << c.count;
        for (Eigen::Index j = 0; j < c.elite->size(); ++j)
            out << ',' << format_number((*c.elite)[j]);
        out << "\n";
    }
}

} // namespace jedi::archive
