#pragma once

#include <jedi/common.hpp>

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace jedi::archive {

/// Bucket grid over [0, 1]^2 for exact nearest-point queries.
class GridIndex {
public:
    GridIndex() = default;

    explicit GridIndex(std::vector<Vec2> pts) : points_(std::move(pts))
    {
        const auto& points = points_;
        side_ = std::max<int>(1, static_cast<int>(std::sqrt(static_cast<double>(points.size()))));
        h_ = 1.0 / side_;
        buckets_.assign(static_cast<std::size_t>(side_) * side_, {});
        for (std::size_t i = 0; i < points.size(); ++i)
            buckets_[bucket(cell_of(points[i].x), cell_of(points[i].y))].push_back(i);
    }

    /// Index of the Euclidean-nearest point; ties go to the lowest index.
    std::size_t nearest(Vec2 q) const
    {
        const int cx = cell_of(q.x), cy = cell_of(q.y);
        // For queries outside the unit square, |q - p|^2 >= |proj(q) - p|^2 + outside^2.
        const double outside2 = Vec2{std::max({0.0, -q.x, q.x - 1.0}), std::max({0.0, -q.y, q.y - 1.0})}.squared_norm();
        double best_d2 = std::numeric_limits<double>::infinity();
        std::size_t best = 0;
        for (int ring = 0; ring <= side_; ++ring) {
            if (ring >= 1) {
                const double gap = (ring - 1) * h_;
                if (gap * gap + outside2 > best_d2)
                    break;
            }
            for (int gx = cx - ring; gx <= cx + ring; ++gx) {
                if (gx < 0 || gx >= side_)
                    continue;
                for (int gy = cy - ring; gy <= cy + ring; ++gy) {
                    if (gy < 0 || gy >= side_)
                        continue;
                    if (std::max(std::abs(gx - cx), std::abs(gy - cy)) != ring)
                        continue;
                    for (std::size_t i : buckets_[bucket(gx, gy)]) {
                        const double d2 = (points_[i] - q).squared_norm();
                        if (d2 < best_d2 || (d2 == best_d2 && i < best)) {
                            best_d2 = d2;
                            best = i;
                        }
                    }
                }
            }
        }
        return best;
    }

private:
    int cell_of(double v) const { return std::clamp(static_cast<int>(std::floor(v / h_)), 0, side_ - 1); }
    std::size_t bucket(int gx, int gy) const { return static_cast<std::size_t>(gx) * side_ + gy; }

    std::vector<Vec2> points_;
    int side_ = 1;
    double h_ = 1.0;
    std::vector<std::vector<std::size_t>> buckets_;
};

/// CVT centroids: Lloyd's k-means on 50*k uniform samples of [0, 1]^dim,
/// seeded with the first k samples. Stops after 100 iterations or once no
/// centroid moves more than 1e-6.
inline Eigen::MatrixXd cvt_centroids(int k, int dim, std::uint64_t seed)
{
    if (k < 1 || dim < 1)
        throw PreconditionError("cvt_centroids needs k >= 1 and dim >= 1");
    Rng rng = derive_rng(seed, {0x637674u});
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Eigen::Index n = 50 * static_cast<Eigen::Index>(k);
    Eigen::MatrixXd samples(n, dim);
    for (Eigen::Index i = 0; i < n; ++i)
        for (int d = 0; d < dim; ++d)
            samples(i, d) = u(rng);

    Eigen::MatrixXd c = samples.topRows(k);
    std::vector<std::size_t> assign(static_cast<std::size_t>(n));
    for (int iter = 0; iter < 100; ++iter) {
        if (dim == 2) {
            std::vector<Vec2> pts(static_cast<std::size_t>(k));
            for (int j = 0; j < k; ++j)
                pts[static_cast<std::size_t>(j)] = {c(j, 0), c(j, 1)};
            GridIndex index(pts);
            for (Eigen::Index i = 0; i < n; ++i)
                assign[static_cast<std::size_t>(i)] = index.nearest({samples(i, 0), samples(i, 1)});
        }
        else {
            for (Eigen::Index i = 0; i < n; ++i) {
                Eigen::Index best = 0;
                (c.rowwise() - samples.row(i)).rowwise().squaredNorm().minCoeff(&best);
                assign[static_cast<std::size_t>(i)] = static_cast<std::size_t>(best);
            }
        }
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k, dim);
        Eigen::VectorXd count = Eigen::VectorXd::Zero(k);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto j = static_cast<Eigen::Index>(assign[static_cast<std::size_t>(i)]);
            sum.row(j) += samples.row(i);
            count[j] += 1.0;
        }
        double shift = 0.0;
        for (int j = 0; j < k; ++j) {
            if (count[j] == 0.0)
                continue; // empty cluster keeps its position
            Eigen::RowVectorXd next = sum.row(j) / count[j];
            shift = std::max(shift, (next - c.row(j)).norm());
            c.row(j) = next;
        }
        if (shift < 1e-6)
            break;
    }
    return c;
}

/// 2D centroid set backing a repertoire.
struct Centroids {
    std::vector<Vec2> points;
    std::uint64_t seed = 0;

    std::size_t size() const { return points.size(); }
};

inline Centroids build_centroids(int k, std::uint64_t seed)
{
    Eigen::MatrixXd c = cvt_centroids(k, 2, seed);
    Centroids out;
    out.seed = seed;
    out.points.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j)
        out.points.push_back({c(j, 0), c(j, 1)});
    return out;
}

} // namespace jedi::archive
