#include "axialmap/axial.hpp"

#include <algorithm>
#include <queue>
#include <tuple>

#include "axialmap/error.hpp"
#include "axialmap/spatial_index.hpp"

namespace axialmap {

ChopThresholds ChopThresholds::from_means(double mean_x, double mean_ratio, double head_ratio_fraction) {
    if (!(mean_x > 0.0) || !(mean_ratio > 0.0) || !(head_ratio_fraction > 0.0)) {
        throw DomainError("chop thresholds must be positive");
    }
    ChopThresholds t;
    t.mean_x = mean_x;
    t.mean_ratio = mean_ratio;
    t.head_ratio_fraction = head_ratio_fraction;
    t.min_merge_angle = min_deflection_from_ratio(head_ratio_fraction * mean_ratio);
    return t;
}

ChopThresholds compute_thresholds(std::span<const BendMeasure> bends, double head_ratio_fraction) {
    if (bends.empty()) {
        throw ThresholdsUnavailable("no open street with three or more vertices");
    }
    double sum_x = 0.0;
    double sum_ratio = 0.0;
    for (const BendMeasure& b : bends) {
        sum_x += b.x;
        sum_ratio += b.ratio;
    }
    const double n = static_cast<double>(bends.size());
    if (!(sum_x > 0.0) || !(sum_ratio > 0.0)) {
        throw ThresholdsUnavailable("every eligible street is perfectly straight");
    }
    return ChopThresholds::from_means(sum_x / n, sum_ratio / n, head_ratio_fraction);
}

ChopThresholds compute_thresholds(std::span<const NaturalStreet> streets, double head_ratio_fraction,
                                  double tolerance) {
    std::vector<BendMeasure> bends;
    bends.reserve(streets.size());
    for (const NaturalStreet& s : streets) {
        if (s.closed || s.geometry.size() < 3) continue;
        const BendMeasure b = s.bend ? *s.bend : measure_bend(s.geometry, tolerance);
        if (b.d > tolerance) bends.push_back(b);
    }
    return compute_thresholds(std::span<const BendMeasure>(bends), head_ratio_fraction);
}

bool chop_predicate(const BendMeasure& bend, const ChopThresholds& t) {
    return (bend.x > t.mean_x && bend.ratio >= t.head_ratio_fraction * t.mean_ratio) ||
           (bend.x <= t.mean_x && bend.ratio >= t.mean_ratio);
}

std::size_t loop_split_index(std::span<const Point> points) {
    if (points.size() < 3) {
        throw GeometryError("a loop needs at least three vertices");
    }
    const double total = polyline_length(points);
    std::size_t best = 1;
    double best_reach = -1.0;
    double along = 0.0;
    for (std::size_t i = 1; i + 1 < points.size(); ++i) {
        along += distance(points[i - 1], points[i]);
        const double reach = std::min(along, total - along);
        if (reach > best_reach) {
            best_reach = reach;
            best = i;
        }
    }
    return best;
}

namespace {

AxialLine make_line(const NaturalStreet& street, std::size_t first, std::size_t last) {
    AxialLine line;
    line.start = street.geometry.points[first];
    line.end = street.geometry.points[last];
    line.source_street_ids = {street.id};
    line.covered = {{street.id, first, last}};
    return line;
}

}  // namespace

std::vector<AxialLine> chop(const NaturalStreet& street, const ChopThresholds& thresholds, double tolerance) {
    const auto& pts = street.geometry.points;
    std::vector<AxialLine> out;
    if (pts.size() < 2) {
        return out;
    }
    // Intervals [first, last] of vertex indices; the front piece is pushed
    // first so the back piece is handled (and emitted) before it.
    std::vector<std::pair<std::size_t, std::size_t>> pending{{0, pts.size() - 1}};
    while (!pending.empty()) {
        const auto [first, last] = pending.back();
        pending.pop_back();
        const std::span<const Point> piece(pts.data() + first, last - first + 1);
        std::size_t split = 0;
        if (distance(piece.front(), piece.back()) < tolerance) {
            if (piece.size() < 3) continue;
            split = first + loop_split_index(piece);
        } else if (piece.size() >= 3) {
            const BendMeasure bend = measure_bend(piece, tolerance);
            if (chop_predicate(bend, thresholds)) {
                split = first + bend.farthest_index;
            }
        }
        if (split == 0) {
            AxialLine line = make_line(street, first, last);
            line.id = out.size();
            out.push_back(std::move(line));
        } else {
            pending.emplace_back(split, last);
            pending.emplace_back(first, split);
        }
    }
    return out;
}

std::vector<AxialLine> link_endpoints(const NaturalStreet& street, double tolerance) {
    const auto& pts = street.geometry.points;
    std::vector<AxialLine> out;
    if (pts.size() < 2) {
        return out;
    }
    if (distance(pts.front(), pts.back()) < tolerance) {
        if (pts.size() < 3) return out;
        const std::size_t split = loop_split_index(pts);
        out.push_back(make_line(street, 0, split));
        out.push_back(make_line(street, split, pts.size() - 1));
    } else {
        out.push_back(make_line(street, 0, pts.size() - 1));
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i].id = i;
    return out;
}

bool merge_eligible(const AxialLine& a, const AxialLine& b, const MergeConfig& config) {
    if (config.allow_same_street) {
        return true;
    }
    // Sorted id lists: eligible iff disjoint.
    auto i = a.source_street_ids.begin();
    auto j = b.source_street_ids.begin();
    while (i != a.source_street_ids.end() && j != b.source_street_ids.end()) {
        if (*i == *j) return false;
        if (*i < *j) ++i; else ++j;
    }
    return true;
}

namespace {

AxialLine merge_pair(const AxialLine& a, const AxialLine& b) {
    const Point ends[4] = {a.start, a.end, b.start, b.end};
    std::size_t bi = 0, bj = 1;
    double best = -1.0;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
            const double d = distance(ends[i], ends[j]);
            if (d > best) {
                best = d;
                bi = i;
                bj = j;
            }
        }
    }
    AxialLine merged;
    merged.start = ends[bi];
    merged.end = ends[bj];
    std::set_union(a.source_street_ids.begin(), a.source_street_ids.end(), b.source_street_ids.begin(),
                   b.source_street_ids.end(), std::back_inserter(merged.source_street_ids));
    merged.covered = a.covered;
    merged.covered.insert(merged.covered.end(), b.covered.begin(), b.covered.end());
    return merged;
}

}  // namespace

std::vector<AxialLine> merge_collinear(std::vector<AxialLine> lines, double min_angle, const MergeConfig& config) {
    if (lines.size() < 2 || !(min_angle > 0.0)) {
        std::sort(lines.begin(), lines.end(), [](const AxialLine& x, const AxialLine& y) { return x.id < y.id; });
        return lines;
    }
    std::vector<Segment> segments;
    segments.reserve(lines.size());
    LineId next_id = 0;
    for (const AxialLine& line : lines) {
        segments.push_back(line.segment());
        next_id = std::max(next_id, line.id + 1);
    }
    SegmentGrid grid(SegmentGrid::suggest_cell_size(segments, config.tolerance * 10.0), config.tolerance);
    std::vector<bool> alive(lines.size(), true);

    struct Candidate {
        double angle;
        LineId lo;
        LineId hi;
        std::size_t a;
        std::size_t b;
        bool operator>(const Candidate& o) const {
            return std::tie(angle, lo, hi) > std::tie(o.angle, o.lo, o.hi);
        }
    };
    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> queue;

    const auto consider = [&](std::size_t a, std::size_t b) {
        const AxialLine& la = lines[a];
        const AxialLine& lb = lines[b];
        if (!merge_eligible(la, lb, config)) return;
        if (!segments_intersect(la.segment(), lb.segment(), config.tolerance)) return;
        const double angle = line_angle(la.segment(), lb.segment());
        if (angle < min_angle) {
            queue.push({angle, std::min(la.id, lb.id), std::max(la.id, lb.id), a, b});
        }
    };
    for (std::size_t i = 0; i < lines.size(); ++i) {
        grid.insert(i, lines[i].segment());
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        for (std::size_t j : grid.query(lines[i].segment())) {
            if (j > i) consider(i, j);
        }
    }

    while (!queue.empty()) {
        const Candidate c = queue.top();
        queue.pop();
        if (!alive[c.a] || !alive[c.b]) continue;
        AxialLine merged = merge_pair(lines[c.a], lines[c.b]);
        merged.id = next_id++;
        alive[c.a] = false;
        alive[c.b] = false;
        const std::size_t slot = lines.size();
        lines.push_back(std::move(merged));
        alive.push_back(true);
        grid.insert(slot, lines[slot].segment());
        for (std::size_t j : grid.query(lines[slot].segment())) {
            if (j != slot && alive[j]) consider(j, slot);
        }
    }

    std::vector<AxialLine> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (alive[i]) out.push_back(std::move(lines[i]));
    }
    std::sort(out.begin(), out.end(), [](const AxialLine& x, const AxialLine& y) { return x.id < y.id; });
    return out;
}

AxialMap build_axial_map(std::span<const NaturalStreet> streets, const AxialConfig& config) {
    AxialMap map;
    const double tol = config.join.snap_tolerance;
    try {
        map.thresholds = compute_thresholds(streets, config.head_ratio_fraction, tol);
    } catch (const ThresholdsUnavailable&) {
        map.thresholds.reset();
    }
    std::vector<AxialLine> lines;
    for (const NaturalStreet& street : streets) {
        auto pieces = map.thresholds ? chop(street, *map.thresholds, tol) : link_endpoints(street, tol);
        for (AxialLine& line : pieces) {
            line.id = lines.size();
            lines.push_back(std::move(line));
        }
    }
    if (map.thresholds) {
        lines = merge_collinear(std::move(lines), map.thresholds->min_merge_angle, config.merge);
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        lines[i].id = i;
    }
    map.lines = std::move(lines);
    return map;
}

AxialMap generate_axial_map(const StreetNetwork& net, const AxialConfig& config) {
    const auto streets = generate_natural_streets(net, config.join);
    AxialMap map = build_axial_map(streets, config);
    map.provenance = network_fingerprint(net);
    return map;
}

}  // namespace axialmap
