#pragma once

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "axialmap/geometry.hpp"

namespace axialmap {

// Uniform hash grid over segments. A segment is registered in every cell its
// tolerance-inflated corridor touches, so long diagonal lines cost cells in
// proportion to their length rather than their bounding-box area.
class SegmentGrid {
public:
    explicit SegmentGrid(double cell_size, double padding = 0.0);

    void insert(std::size_t id, const Segment& segment);

    // Ids whose registered cells overlap the corridor of `segment`, sorted and
    // unique. Candidates only; callers run the exact test.
    std::vector<std::size_t> query(const Segment& segment) const;
    std::vector<std::size_t> query(const Box& box) const;

    double cell_size() const { return cell_size_; }

    // Cell size heuristic: mean segment length, clamped below by `floor`.
    static double suggest_cell_size(std::span<const Segment> segments, double floor);

private:
    using Key = std::uint64_t;

    template <typename Visit>
    void for_each_cell(const Segment& segment, Visit&& visit) const;

    Key key(std::int64_t cx, std::int64_t cy) const;
    std::int64_t cell_of(double v) const;

    double cell_size_;
    double padding_;
    std::unordered_map<Key, std::vector<std::size_t>> cells_;
};

}  // namespace axialmap
