#include "axialmap/spatial_index.hpp"

#include <algorithm>
#include <cmath>

#include "axialmap/error.hpp"

namespace axialmap {

SegmentGrid::SegmentGrid(double cell_size, double padding)
    : cell_size_(cell_size), padding_(padding) {
    if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
        throw DomainError("grid cell size must be positive");
    }
}

SegmentGrid::Key SegmentGrid::key(std::int64_t cx, std::int64_t cy) const {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
           static_cast<std::uint32_t>(cy);
}

std::int64_t SegmentGrid::cell_of(double v) const {
    return static_cast<std::int64_t>(std::floor(v / cell_size_));
}

template <typename Visit>
void SegmentGrid::for_each_cell(const Segment& segment, Visit&& visit) const {
    const Box box = Box::of(segment).inflated(padding_);
    const std::int64_t x0 = cell_of(box.min_x);
    const std::int64_t x1 = cell_of(box.max_x);
    const Point dir = segment.direction();
    for (std::int64_t cx = x0; cx <= x1; ++cx) {
        // y-range of the segment restricted to this column, then padded.
        double lo = box.min_y;
        double hi = box.max_y;
        if (dir.x != 0.0 && x1 > x0) {
            const double col_lo = std::max(static_cast<double>(cx) * cell_size_, box.min_x);
            const double col_hi = std::min(static_cast<double>(cx + 1) * cell_size_, box.max_x);
            double t0 = std::clamp((col_lo - padding_ - segment.a.x) / dir.x, 0.0, 1.0);
            double t1 = std::clamp((col_hi + padding_ - segment.a.x) / dir.x, 0.0, 1.0);
            const double ya = segment.a.y + t0 * dir.y;
            const double yb = segment.a.y + t1 * dir.y;
            lo = std::min(ya, yb) - padding_;
            hi = std::max(ya, yb) + padding_;
        }
        for (std::int64_t cy = cell_of(lo); cy <= cell_of(hi); ++cy) {
            visit(key(cx, cy));
        }
    }
}

void SegmentGrid::insert(std::size_t id, const Segment& segment) {
    for_each_cell(segment, [&](Key k) {
        auto& bucket = cells_[k];
        if (bucket.empty() || bucket.back() != id) {
            bucket.push_back(id);
        }
    });
}

std::vector<std::size_t> SegmentGrid::query(const Segment& segment) const {
    std::vector<std::size_t> out;
    for_each_cell(segment, [&](Key k) {
        if (auto it = cells_.find(k); it != cells_.end()) {
            out.insert(out.end(), it->second.begin(), it->second.end());
        }
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::size_t> SegmentGrid::query(const Box& box) const {
    std::vector<std::size_t> out;
    const Box padded = box.inflated(padding_);
    for (std::int64_t cx = cell_of(padded.min_x); cx <= cell_of(padded.max_x); ++cx) {
        for (std::int64_t cy = cell_of(padded.min_y); cy <= cell_of(padded.max_y); ++cy) {
            if (auto it = cells_.find(key(cx, cy)); it != cells_.end()) {
                out.insert(out.end(), it->second.begin(), it->second.end());
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double SegmentGrid::suggest_cell_size(std::span<const Segment> segments, double floor) {
    if (segments.empty()) {
        return std::max(floor, 1.0);
    }
    double total = 0.0;
    for (const Segment& s : segments) {
        total += s.length();
    }
    const double mean = total / static_cast<double>(segments.size());
    return std::max({mean, floor, 1e-6});
}

}  // namespace axialmap
