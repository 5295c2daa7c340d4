#include "gibbstf/core.hpp"

#include <algorithm>
#include <sstream>

namespace gibbstf {

Window::Window(int dim, const Position& lower, const Position& upper) : dim_(dim), lower_{}, upper_{} {
    if (dim < 1 || dim > 3) throw std::invalid_argument("Window: dimension must be 1, 2 or 3");
    for (int a = 0; a < dim; ++a) {
        if (!(upper[a] > lower[a])) {
            std::ostringstream msg;
            msg << "Window: upper[" << a << "]=" << upper[a] << " must exceed lower[" << a << "]=" << lower[a];
            throw EmptyWindow(msg.str());
        }
        lower_[a] = lower[a];
        upper_[a] = upper[a];
    }
}

double Window::max_side() const {
    double m = 0.0;
    for (int a = 0; a < dim_; ++a) m = std::max(m, side(a));
    return m;
}

double Window::volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= side(a);
    return v;
}

bool Window::contains(const Position& x) const {
    for (int a = 0; a < dim_; ++a) {
        if (x[a] < lower_[a] || x[a] > upper_[a]) return false;
    }
    return true;
}

bool Window::contains(const Window& inner, double margin) const {
    // Relative slack so that [0,3] (+) 0.05 fits in [-0.05, 3.05] despite rounding.
    constexpr double slack = 1e-12;
    for (int a = 0; a < dim_; ++a) {
        const double scale = std::max({1.0, std::abs(lower_[a]), std::abs(upper_[a])});
        if (inner.lower_[a] - margin < lower_[a] - slack * scale) return false;
        if (inner.upper_[a] + margin > upper_[a] + slack * scale) return false;
    }
    return true;
}

Window Window::eroded(double delta) const {
    if (delta < 0.0) throw std::invalid_argument("erode: delta must be nonnegative");
    if (delta == 0.0) return *this;
    Position lo = lower_;
    Position hi = upper_;
    for (int a = 0; a < dim_; ++a) {
        if (2.0 * delta >= side(a)) {
            std::ostringstream msg;
            msg << "erode: margin " << delta << " empties axis " << a << " of side " << side(a);
            throw EmptyWindow(msg.str());
        }
        lo[a] += delta;
        hi[a] -= delta;
    }
    return Window(dim_, lo, hi);
}

Window Window::dilated(double delta) const {
    Position lo = lower_;
    Position hi = upper_;
    for (int a = 0; a < dim_; ++a) {
        lo[a] -= delta;
        hi[a] += delta;
    }
    return Window(dim_, lo, hi);
}

Window erode(const Window& window, double delta) { return window.eroded(delta); }

Configuration::Configuration(Window carrier) : carrier_(std::move(carrier)) {}

Configuration::Configuration(Window carrier, std::vector<MarkedPoint> points)
    : carrier_(std::move(carrier)), points_(std::move(points)) {
    for (const auto& p : points_) {
        if (!carrier_.contains(p.position)) throw std::invalid_argument("Configuration: point outside carrier");
        for (int a = carrier_.dim(); a < 3; ++a) {
            if (p.position[a] != 0.0) throw std::invalid_argument("Configuration: unused coordinate must be zero");
        }
        if (p.mark && !(*p.mark > 0.0)) throw std::invalid_argument("Configuration: marks must be positive");
    }
    std::vector<Position> sorted;
    sorted.reserve(points_.size());
    for (const auto& p : points_) sorted.push_back(p.position);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("Configuration: duplicate point position");
    }
}

Configuration Configuration::restrict(const Window& window) const {
    std::vector<MarkedPoint> kept;
    for (const auto& p : points_) {
        if (window.contains(p.position)) kept.push_back(p);
    }
    Configuration out(window);
    out.points_ = std::move(kept);
    return out;
}

std::size_t Configuration::count_in(const Window& window) const {
    return static_cast<std::size_t>(
        std::count_if(points_.begin(), points_.end(), [&](const MarkedPoint& p) { return window.contains(p.position); }));
}

Configuration Configuration::translated(const Position& shift) const {
    Position lo = carrier_.lower();
    Position hi = carrier_.upper();
    for (int a = 0; a < carrier_.dim(); ++a) {
        lo[a] += shift[a];
        hi[a] += shift[a];
    }
    Configuration out(Window(carrier_.dim(), lo, hi));
    out.points_ = points_;
    for (auto& p : out.points_) {
        for (int a = 0; a < carrier_.dim(); ++a) p.position[a] += shift[a];
    }
    return out;
}

NeighborIndex::NeighborIndex(const Window& carrier, double query_radius) : carrier_(carrier) {
    constexpr int max_cells_per_axis = 64;
    std::size_t total = 1;
    for (int a = 0; a < carrier.dim(); ++a) {
        const double side = carrier.side(a);
        const double cell = std::max(query_radius, side / max_cells_per_axis);
        cells_[a] = std::max(1, static_cast<int>(std::floor(side / cell)));
        cell_size_[a] = side / cells_[a];
        total *= static_cast<std::size_t>(cells_[a]);
    }
    buckets_.resize(total);
}

NeighborIndex::NeighborIndex(const Configuration& cfg, double query_radius)
    : NeighborIndex(cfg.carrier(), query_radius) {
    positions_.reserve(cfg.size());
    for (const auto& p : cfg.points()) insert(p.position);
}

std::array<int, 3> NeighborIndex::cell_coords(const Position& x) const {
    std::array<int, 3> c{0, 0, 0};
    for (int a = 0; a < carrier_.dim(); ++a) {
        int i = static_cast<int>(std::floor((x[a] - carrier_.lower()[a]) / cell_size_[a]));
        c[a] = std::clamp(i, 0, cells_[a] - 1);
    }
    return c;
}

std::size_t NeighborIndex::cell_of(const Position& x) const {
    const auto c = cell_coords(x);
    return (static_cast<std::size_t>(c[2]) * cells_[1] + c[1]) * cells_[0] + c[0];
}

std::size_t NeighborIndex::insert(const Position& x) {
    std::size_t id;
    if (!free_ids_.empty()) {
        id = free_ids_.back();
        free_ids_.pop_back();
        positions_[id] = x;
        alive_[id] = 1;
    } else {
        id = positions_.size();
        positions_.push_back(x);
        bucket_of_.push_back(0);
        slot_of_.push_back(0);
        alive_.push_back(1);
    }
    const std::size_t b = cell_of(x);
    bucket_of_[id] = static_cast<std::uint32_t>(b);
    slot_of_[id] = static_cast<std::uint32_t>(buckets_[b].size());
    buckets_[b].push_back(static_cast<std::uint32_t>(id));
    ++live_count_;
    return id;
}

void NeighborIndex::erase(std::size_t id) {
    if (!alive(id)) throw std::out_of_range("NeighborIndex::erase: id not present");
    auto& bucket = buckets_[bucket_of_[id]];
    const std::uint32_t slot = slot_of_[id];
    const std::uint32_t moved = bucket.back();
    bucket[slot] = moved;
    slot_of_[moved] = slot;
    bucket.pop_back();
    alive_[id] = 0;
    free_ids_.push_back(id);
    --live_count_;
}

std::size_t NeighborIndex::count_within(const Position& x, double r, std::optional<std::size_t> exclude) const {
    std::size_t n = 0;
    for_each_within(x, r, exclude, [&](std::size_t) { ++n; });
    return n;
}

std::vector<std::size_t> NeighborIndex::neighbors(const Position& x, double r,
                                                  std::optional<std::size_t> exclude) const {
    std::vector<std::size_t> out;
    for_each_within(x, r, exclude, [&](std::size_t id) { out.push_back(id); });
    return out;
}

std::vector<std::size_t> NeighborIndex::live_ids() const {
    std::vector<std::size_t> out;
    out.reserve(live_count_);
    for (std::size_t id = 0; id < alive_.size(); ++id) {
        if (alive_[id]) out.push_back(id);
    }
    return out;
}

std::size_t count_in_ball(const Configuration& cfg, const Position& x, double r,
                          const std::optional<MarkedPoint>& exclude) {
    std::size_t n = 0;
    for (const auto& p : cfg.points()) {
        if (exclude && exclude->position == p.position) continue;
        if (within(p.position, x, r)) ++n;
    }
    return n;
}

}  // namespace gibbstf
