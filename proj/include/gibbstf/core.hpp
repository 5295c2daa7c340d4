#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gibbstf/errors.hpp"

namespace gibbstf {

// Coordinates are stored in three slots; unused trailing slots stay at zero
// so distances can always be computed over all three.
using Position = std::array<double, 3>;

inline double squared_distance(const Position& a, const Position& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return dx * dx + dy * dy + dz * dz;
}

// Closed-ball membership, ||a - b|| <= r.
inline bool within(const Position& a, const Position& b, double r) {
    return squared_distance(a, b) <= r * r;
}

/// Axis-aligned box [lower, upper] in dimension 1, 2 or 3.
class Window {
public:
    Window(int dim, const Position& lower, const Position& upper);

    static Window square(double lo, double hi) { return Window(2, {lo, lo, 0.0}, {hi, hi, 0.0}); }
    static Window rect(double x0, double y0, double x1, double y1) {
        return Window(2, {x0, y0, 0.0}, {x1, y1, 0.0});
    }

    int dim() const { return dim_; }
    const Position& lower() const { return lower_; }
    const Position& upper() const { return upper_; }
    double side(int axis) const { return upper_[axis] - lower_[axis]; }
    double max_side() const;
    double volume() const;

    bool contains(const Position& x) const;
    // True when [lower - margin, upper + margin] of `inner` lies in this window.
    bool contains(const Window& inner, double margin = 0.0) const;

    /// Shrinks every side by `delta` on both ends. Throws EmptyWindow when the
    /// result would have a non-positive side.
    Window eroded(double delta) const;
    Window dilated(double delta) const;

    bool operator==(const Window&) const = default;

private:
    int dim_;
    Position lower_;
    Position upper_;
};

Window erode(const Window& window, double delta);

struct MarkedPoint {
    Position position{};
    std::optional<double> mark;

    bool operator==(const MarkedPoint&) const = default;
};

/// A finite simple point pattern together with the window it lives in.
class Configuration {
public:
    explicit Configuration(Window carrier);
    Configuration(Window carrier, std::vector<MarkedPoint> points);

    const Window& carrier() const { return carrier_; }
    const std::vector<MarkedPoint>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    const MarkedPoint& operator[](std::size_t i) const { return points_[i]; }
    int dim() const { return carrier_.dim(); }

    /// Points whose position lies in `window`, carried by `window`.
    Configuration restrict(const Window& window) const;
    std::size_t count_in(const Window& window) const;
    Configuration translated(const Position& shift) const;

private:
    Window carrier_;
    std::vector<MarkedPoint> points_;
};

/// Uniform cell grid over a carrier window supporting closed-ball queries of
/// any radius, with O(1) insertion and removal (used by the samplers).
class NeighborIndex {
public:
    NeighborIndex(const Window& carrier, double query_radius);
    NeighborIndex(const Configuration& cfg, double query_radius);

    // Ids are dense; ids of erased points are recycled by later inserts.
    std::size_t insert(const Position& x);
    void erase(std::size_t id);

    bool alive(std::size_t id) const { return id < alive_.size() && alive_[id]; }
    const Position& position(std::size_t id) const { return positions_[id]; }
    std::size_t size() const { return live_count_; }
    std::size_t capacity() const { return positions_.size(); }
    const Window& carrier() const { return carrier_; }

    template <class F>
    void for_each_within(const Position& x, double r, std::optional<std::size_t> exclude, F&& f) const;

    std::size_t count_within(const Position& x, double r,
                             std::optional<std::size_t> exclude = std::nullopt) const;
    std::vector<std::size_t> neighbors(const Position& x, double r,
                                       std::optional<std::size_t> exclude = std::nullopt) const;
    std::vector<std::size_t> live_ids() const;

private:
    std::size_t cell_of(const Position& x) const;
    std::array<int, 3> cell_coords(const Position& x) const;

    Window carrier_;
    std::array<double, 3> cell_size_{1.0, 1.0, 1.0};
    std::array<int, 3> cells_{1, 1, 1};
    std::vector<std::vector<std::uint32_t>> buckets_;
    std::vector<Position> positions_;
    std::vector<std::uint32_t> bucket_of_;
    std::vector<std::uint32_t> slot_of_;
    std::vector<char> alive_;
    std::vector<std::size_t> free_ids_;
    std::size_t live_count_ = 0;
};

template <class F>
void NeighborIndex::for_each_within(const Position& x, double r, std::optional<std::size_t> exclude,
                                    F&& f) const {
    std::array<int, 3> lo{0, 0, 0};
    std::array<int, 3> hi{0, 0, 0};
    for (int a = 0; a < 3; ++a) {
        if (cells_[a] == 1) continue;
        const double base = carrier_.lower()[a];
        int l = static_cast<int>(std::floor((x[a] - r - base) / cell_size_[a]));
        int h = static_cast<int>(std::floor((x[a] + r - base) / cell_size_[a]));
        lo[a] = l < 0 ? 0 : l;
        hi[a] = h >= cells_[a] ? cells_[a] - 1 : h;
        if (lo[a] > hi[a]) return;
    }
    const double r2 = r * r;
    for (int k = lo[2]; k <= hi[2]; ++k) {
        for (int j = lo[1]; j <= hi[1]; ++j) {
            const std::size_t row = (static_cast<std::size_t>(k) * cells_[1] + j) * cells_[0];
            for (int i = lo[0]; i <= hi[0]; ++i) {
                for (std::uint32_t id : buckets_[row + i]) {
                    if (exclude && *exclude == id) continue;
                    if (squared_distance(positions_[id], x) <= r2) f(static_cast<std::size_t>(id));
                }
            }
        }
    }
}

/// Number of points y of `cfg` with ||y - x|| <= r, skipping the point at the
/// position of `exclude` if given. Linear scan.
std::size_t count_in_ball(const Configuration& cfg, const Position& x, double r,
                          const std::optional<MarkedPoint>& exclude = std::nullopt);

}  // namespace gibbstf
