#include "axialmap/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "axialmap/error.hpp"
#include "axialmap/spatial_index.hpp"

namespace axialmap {

NodeId StreetNetwork::add_node(Point location) {
    const NodeId id = nodes_.size();
    nodes_.push_back({id, location, {}});
    return id;
}

ArcId StreetNetwork::add_arc(NodeId from, NodeId to, Polyline geometry) {
    if (from >= nodes_.size() || to >= nodes_.size()) {
        throw InvariantError("arc references a missing node");
    }
    const ArcId id = arcs_.size();
    const double length = polyline_length(geometry.view());
    arcs_.push_back({id, from, to, std::move(geometry), length});
    nodes_[from].incident_arcs.push_back(id);
    nodes_[to].incident_arcs.push_back(id);
    return id;
}

double StreetNetwork::total_length() const {
    double total = 0.0;
    for (const Arc& arc : arcs_) {
        total += arc.length;
    }
    return total;
}

void StreetNetwork::check_invariants(double tolerance) const {
    std::vector<std::size_t> seen(nodes_.size(), 0);
    SegmentGrid node_grid(std::max(tolerance * 4.0, 1.0), tolerance);
    for (const NetworkNode& node : nodes_) {
        node_grid.insert(node.id, {node.location, node.location});
    }
    for (const Arc& arc : arcs_) {
        const std::string where = "arc " + std::to_string(arc.id);
        if (arc.from >= nodes_.size() || arc.to >= nodes_.size()) {
            throw InvariantError(where + " references a missing node");
        }
        if (arc.geometry.size() < 2 || !(arc.length > 0.0)) {
            throw InvariantError(where + " is degenerate");
        }
        if (distance(arc.geometry.front(), nodes_[arc.from].location) > tolerance ||
            distance(arc.geometry.back(), nodes_[arc.to].location) > tolerance) {
            throw InvariantError(where + " endpoints do not sit on its nodes");
        }
        for (std::size_t i = 1; i + 1 < arc.geometry.size(); ++i) {
            const Point p = arc.geometry.points[i];
            for (std::size_t id : node_grid.query(Box{p.x, p.y, p.x, p.y})) {
                if (distance(nodes_[id].location, p) < tolerance) {
                    throw InvariantError(where + " passes through node " + std::to_string(id));
                }
            }
        }
        ++seen[arc.from];
        ++seen[arc.to];
    }
    for (const NetworkNode& node : nodes_) {
        if (node.incident_arcs.size() != seen[node.id] || node.incident_arcs.empty()) {
            throw InvariantError("node " + std::to_string(node.id) + " adjacency is inconsistent");
        }
    }
}

std::vector<Polyline> arcs_as_polylines(const StreetNetwork& net) {
    std::vector<Polyline> out;
    out.reserve(net.arcs().size());
    for (const Arc& arc : net.arcs()) {
        out.push_back(arc.geometry);
    }
    return out;
}

std::string network_fingerprint(const StreetNetwork& net) {
    std::uint64_t hash = 1469598103934665603ULL;
    const auto mix = [&](const void* data, std::size_t size) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            hash ^= bytes[i];
            hash *= 1099511628211ULL;
        }
    };
    for (const Arc& arc : net.arcs()) {
        const std::uint64_t ends[2] = {arc.from, arc.to};
        mix(ends, sizeof ends);
        for (const Point& p : arc.geometry.points) {
            mix(&p.x, sizeof p.x);
            mix(&p.y, sizeof p.y);
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

namespace {

using VertexId = std::size_t;

// Clusters coordinates: a point joins the lowest-id existing vertex within
// the tolerance, so vertices are pairwise farther apart than the tolerance.
class VertexSnapper {
public:
    explicit VertexSnapper(double tolerance) : tol_(tolerance), cell_(std::max(tolerance, 1e-9)) {}

    VertexId snap(Point p) {
        const std::int64_t cx = cell_of(p.x);
        const std::int64_t cy = cell_of(p.y);
        VertexId best = kNone;
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                auto it = cells_.find(key(cx + dx, cy + dy));
                if (it == cells_.end()) {
                    continue;
                }
                for (VertexId id : it->second) {
                    if (id < best && distance(points_[id], p) <= tol_) {
                        best = id;
                    }
                }
            }
        }
        if (best != kNone) {
            return best;
        }
        const VertexId id = points_.size();
        points_.push_back(p);
        cells_[key(cx, cy)].push_back(id);
        return id;
    }

    const Point& at(VertexId id) const { return points_[id]; }
    std::size_t size() const { return points_.size(); }

private:
    static constexpr VertexId kNone = static_cast<VertexId>(-1);

    std::int64_t cell_of(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }
    static std::uint64_t key(std::int64_t cx, std::int64_t cy) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
               static_cast<std::uint32_t>(cy);
    }

    double tol_;
    double cell_;
    std::vector<Point> points_;
    std::unordered_map<std::uint64_t, std::vector<VertexId>> cells_;
};

void drop_repeats(std::vector<VertexId>& seq) {
    seq.erase(std::unique(seq.begin(), seq.end()), seq.end());
}

struct SegmentRef {
    std::size_t line;
    std::size_t index;  // segment between seq[index] and seq[index + 1]
};

// Inserts crossing and touch vertices into the vertex sequences.
std::size_t split_crossings(std::vector<std::vector<VertexId>>& seqs, VertexSnapper& snapper,
                            double tol) {
    std::vector<SegmentRef> refs;
    std::vector<Segment> segments;
    for (std::size_t l = 0; l < seqs.size(); ++l) {
        for (std::size_t j = 0; j + 1 < seqs[l].size(); ++j) {
            refs.push_back({l, j});
            segments.push_back({snapper.at(seqs[l][j]), snapper.at(seqs[l][j + 1])});
        }
    }
    if (segments.empty()) {
        return 0;
    }
    SegmentGrid grid(SegmentGrid::suggest_cell_size(segments, tol * 10.0), tol);
    for (std::size_t s = 0; s < segments.size(); ++s) {
        grid.insert(s, segments[s]);
    }

    std::vector<std::vector<std::pair<double, VertexId>>> inserts(segments.size());
    std::size_t inserted = 0;
    const auto end_ids = [&](std::size_t s) {
        const auto& seq = seqs[refs[s].line];
        return std::pair{seq[refs[s].index], seq[refs[s].index + 1]};
    };
    const auto add_insert = [&](std::size_t s, VertexId v) {
        const auto [e0, e1] = end_ids(s);
        if (v == e0 || v == e1) {
            return;
        }
        const Segment& seg = segments[s];
        const Point dir = seg.direction();
        const double t = dot(snapper.at(v) - seg.a, dir) / dot(dir, dir);
        inserts[s].emplace_back(t, v);
        ++inserted;
    };

    for (std::size_t s = 0; s < segments.size(); ++s) {
        const auto [a0, a1] = end_ids(s);
        for (std::size_t t : grid.query(segments[s])) {
            if (t <= s) {
                continue;
            }
            const auto [b0, b1] = end_ids(t);
            const Segment& A = segments[s];
            const Segment& B = segments[t];
            std::vector<VertexId> contacts;
            for (auto [p, v] : {std::pair{A.a, a0}, std::pair{A.b, a1}}) {
                if (segment_distance(p, B) <= tol) contacts.push_back(v);
            }
            for (auto [p, v] : {std::pair{B.a, b0}, std::pair{B.b, b1}}) {
                if (segment_distance(p, A) <= tol) contacts.push_back(v);
            }
            if (contacts.empty()) {
                const Point r = A.direction();
                const Point q = B.direction();
                const double denom = cross(r, q);
                if (std::abs(denom) > 1e-12 * norm(r) * norm(q)) {
                    const Point qp = B.a - A.a;
                    const double ta = cross(qp, q) / denom;
                    const double tb = cross(qp, r) / denom;
                    if (ta > 0.0 && ta < 1.0 && tb > 0.0 && tb < 1.0) {
                        contacts.push_back(snapper.snap(A.a + ta * r));
                    }
                }
            }
            for (VertexId v : contacts) {
                add_insert(s, v);
                add_insert(t, v);
            }
        }
    }

    for (std::size_t l = 0, s = 0; l < seqs.size(); ++l) {
        const auto& old = seqs[l];
        std::vector<VertexId> rebuilt;
        rebuilt.reserve(old.size());
        for (std::size_t j = 0; j + 1 < old.size(); ++j, ++s) {
            rebuilt.push_back(old[j]);
            auto& ins = inserts[s];
            std::sort(ins.begin(), ins.end());
            for (const auto& [t, v] : ins) {
                rebuilt.push_back(v);
            }
        }
        if (!old.empty()) {
            rebuilt.push_back(old.back());
        }
        drop_repeats(rebuilt);
        seqs[l] = std::move(rebuilt);
    }
    return inserted;
}

}  // namespace

StreetNetwork planarize(std::span<const Polyline> raw, const PlanarizeConfig& config,
                        PlanarizeStats* stats) {
    PlanarizeStats local;
    local.input_lines = raw.size();
    const double tol = config.snap_tolerance;
    if (!(tol > 0.0)) {
        throw DomainError("snap tolerance must be positive");
    }

    VertexSnapper snapper(tol);
    std::vector<std::vector<VertexId>> seqs;
    seqs.reserve(raw.size());
    for (const Polyline& line : raw) {
        for (const Point& p : line.points) {
            if (!is_finite(p)) {
                throw GeometryError("non-finite coordinate in input line");
            }
        }
        if (line.size() < 2 || polyline_length(line.view()) < tol) {
            ++local.skipped_degenerate;
            continue;
        }
        std::vector<VertexId> seq;
        seq.reserve(line.size());
        for (const Point& p : line.points) {
            seq.push_back(snapper.snap(p));
        }
        drop_repeats(seq);
        if (seq.size() < 2) {
            ++local.skipped_degenerate;
            continue;
        }
        seqs.push_back(std::move(seq));
    }

    if (config.split_at_crossings) {
        local.crossings_inserted = split_crossings(seqs, snapper, tol);
    }

    // A vertex is a junction if it ends any line or occurs more than once
    // across all lines.
    std::vector<std::uint32_t> occurrences(snapper.size(), 0);
    std::vector<bool> is_node(snapper.size(), false);
    for (const auto& seq : seqs) {
        for (VertexId v : seq) {
            ++occurrences[v];
        }
        is_node[seq.front()] = true;
        is_node[seq.back()] = true;
    }
    for (VertexId v = 0; v < snapper.size(); ++v) {
        if (occurrences[v] >= 2) {
            is_node[v] = true;
        }
    }

    std::vector<std::vector<VertexId>> pieces;
    std::set<std::vector<VertexId>> seen;
    for (const auto& seq : seqs) {
        std::size_t start = 0;
        for (std::size_t i = 1; i < seq.size(); ++i) {
            if (!is_node[seq[i]]) {
                continue;
            }
            std::vector<VertexId> piece(seq.begin() + static_cast<std::ptrdiff_t>(start),
                                        seq.begin() + static_cast<std::ptrdiff_t>(i) + 1);
            start = i;
            std::vector<VertexId> canonical(piece.rbegin(), piece.rend());
            if (piece < canonical) {
                canonical = piece;
            }
            if (!seen.insert(std::move(canonical)).second) {
                ++local.duplicate_arcs;
                continue;
            }
            pieces.push_back(std::move(piece));
        }
    }

    StreetNetwork net;
    std::map<VertexId, NodeId> node_of;
    for (const auto& piece : pieces) {
        node_of.emplace(piece.front(), 0);
        node_of.emplace(piece.back(), 0);
    }
    for (auto& [vertex, node] : node_of) {
        node = net.add_node(snapper.at(vertex));
    }
    for (const auto& piece : pieces) {
        Polyline geometry;
        geometry.points.reserve(piece.size());
        for (VertexId v : piece) {
            geometry.points.push_back(snapper.at(v));
        }
        net.add_arc(node_of.at(piece.front()), node_of.at(piece.back()), std::move(geometry));
    }
    if (stats) {
        *stats = local;
    }
    return net;
}

// ---------------------------------------------------------------------------
// Roundabouts

namespace {

using HalfEdge = std::size_t;  // 2 * arc + (0: leaves `from`, 1: leaves `to`)

struct Rotation {
    std::vector<std::vector<HalfEdge>> around;  // per node, CCW by departure angle
    std::vector<std::size_t> position;          // half-edge -> index in its origin's list
};

NodeId origin(const StreetNetwork& net, HalfEdge h) {
    const Arc& arc = net.arc(h / 2);
    return (h % 2 == 0) ? arc.from : arc.to;
}

NodeId target(const StreetNetwork& net, HalfEdge h) { return origin(net, h ^ 1U); }

double departure_angle(const StreetNetwork& net, HalfEdge h) {
    const auto& pts = net.arc(h / 2).geometry.points;
    const Point dir = (h % 2 == 0) ? pts[1] - pts[0] : pts[pts.size() - 2] - pts.back();
    return std::atan2(dir.y, dir.x);
}

Rotation build_rotation(const StreetNetwork& net) {
    Rotation rot;
    rot.around.resize(net.nodes().size());
    rot.position.resize(net.arcs().size() * 2);
    std::vector<double> angle(net.arcs().size() * 2);
    for (HalfEdge h = 0; h < angle.size(); ++h) {
        angle[h] = departure_angle(net, h);
        rot.around[origin(net, h)].push_back(h);
    }
    for (auto& list : rot.around) {
        std::sort(list.begin(), list.end(), [&](HalfEdge a, HalfEdge b) {
            return angle[a] != angle[b] ? angle[a] < angle[b] : a < b;
        });
        for (std::size_t i = 0; i < list.size(); ++i) {
            rot.position[list[i]] = i;
        }
    }
    return rot;
}

Point cycle_centroid(const StreetNetwork& net, std::span<const HalfEdge> cycle) {
    Point sum;
    std::size_t count = 0;
    for (HalfEdge h : cycle) {
        const auto& pts = net.arc(h / 2).geometry.points;
        // Each arc contributes its vertices except the one where the next arc starts.
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const Point p = (h % 2 == 0) ? pts[i] : pts[pts.size() - 1 - i];
            sum = sum + p;
            ++count;
        }
    }
    return (1.0 / static_cast<double>(count)) * sum;
}

struct Ring {
    std::vector<ArcId> arcs;  // sorted
    std::vector<NodeId> nodes;
    Point centroid;
};

std::vector<Ring> find_rings(const StreetNetwork& net, const RoundaboutConfig& config) {
    const Rotation rot = build_rotation(net);
    const std::size_t half_edges = net.arcs().size() * 2;
    std::vector<bool> visited(half_edges, false);
    std::vector<Ring> rings;
    std::set<std::vector<ArcId>> seen;

    for (HalfEdge start = 0; start < half_edges; ++start) {
        if (visited[start]) {
            continue;
        }
        std::vector<HalfEdge> cycle;
        for (HalfEdge h = start; !visited[h];) {
            visited[h] = true;
            cycle.push_back(h);
            const NodeId at = target(net, h);
            const auto& around = rot.around[at];
            const std::size_t p = rot.position[h ^ 1U];
            h = around[(p + around.size() - 1) % around.size()];
        }
        if (cycle.size() > config.max_face_arcs) {
            continue;
        }
        std::vector<ArcId> arcs;
        std::vector<NodeId> nodes;
        double perimeter = 0.0;
        for (HalfEdge h : cycle) {
            arcs.push_back(h / 2);
            nodes.push_back(origin(net, h));
            perimeter += net.arc(h / 2).length;
        }
        std::sort(arcs.begin(), arcs.end());
        std::sort(nodes.begin(), nodes.end());
        if (std::adjacent_find(arcs.begin(), arcs.end()) != arcs.end() ||
            std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end() ||
            perimeter > config.max_perimeter) {
            continue;
        }
        // An isolated ring has nothing to join; leave it alone.
        std::size_t external = 0;
        for (NodeId n : nodes) {
            for (ArcId a : net.node(n).incident_arcs) {
                if (!std::binary_search(arcs.begin(), arcs.end(), a)) {
                    ++external;
                }
            }
        }
        if (external == 0 || !seen.insert(arcs).second) {
            continue;
        }
        rings.push_back({std::move(arcs), std::move(nodes), cycle_centroid(net, cycle)});
    }
    std::sort(rings.begin(), rings.end(),
              [](const Ring& a, const Ring& b) { return a.arcs < b.arcs; });
    return rings;
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

void clean_points(std::vector<Point>& pts, double tol) {
    std::vector<Point> out;
    out.reserve(pts.size());
    for (const Point& p : pts) {
        if (out.empty() || distance(out.back(), p) >= tol) {
            out.push_back(p);
        }
    }
    pts = std::move(out);
}

}  // namespace

std::vector<std::vector<ArcId>> find_roundabouts(const StreetNetwork& net,
                                                 const RoundaboutConfig& config) {
    std::vector<std::vector<ArcId>> out;
    for (Ring& ring : find_rings(net, config)) {
        out.push_back(std::move(ring.arcs));
    }
    return out;
}

StreetNetwork collapse_roundabouts(const StreetNetwork& net, const RoundaboutConfig& config,
                                   RoundaboutStats* stats) {
    RoundaboutStats local;
    const double tol = config.snap_tolerance;
    std::vector<Ring> rings = find_rings(net, config);
    local.rings_found = rings.size();
    if (rings.empty()) {
        if (stats) *stats = local;
        return net;
    }

    // Rings sharing an arc collapse together.
    DisjointSets by_arc(rings.size());
    {
        std::map<ArcId, std::size_t> owner;
        for (std::size_t r = 0; r < rings.size(); ++r) {
            for (ArcId a : rings[r].arcs) {
                auto [it, fresh] = owner.emplace(a, r);
                if (!fresh) by_arc.unite(it->second, r);
            }
        }
    }
    std::map<std::size_t, std::vector<std::size_t>> members;
    for (std::size_t r = 0; r < rings.size(); ++r) {
        members[by_arc.find(r)].push_back(r);
    }

    struct Group {
        std::set<ArcId> arcs;
        std::set<NodeId> nodes;
        Point centroid;
    };
    std::vector<Group> groups;
    for (const auto& [root, list] : members) {
        Group g;
        Point sum;
        for (std::size_t r : list) {
            g.arcs.insert(rings[r].arcs.begin(), rings[r].arcs.end());
            g.nodes.insert(rings[r].nodes.begin(), rings[r].nodes.end());
            sum = sum + rings[r].centroid;
        }
        g.centroid = (1.0 / static_cast<double>(list.size())) * sum;
        groups.push_back(std::move(g));
    }

    std::vector<std::vector<std::size_t>> groups_of_node(net.nodes().size());
    std::vector<bool> removed_arc(net.arcs().size(), false);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (NodeId n : groups[g].nodes) groups_of_node[n].push_back(g);
        for (ArcId a : groups[g].arcs) removed_arc[a] = true;
    }

    // Groups whose centroids coincide share one node.
    DisjointSets same_node(groups.size());
    for (const auto& list : groups_of_node) {
        for (std::size_t i = 1; i < list.size(); ++i) {
            if (distance(groups[list[0]].centroid, groups[list[i]].centroid) <= tol) {
                same_node.unite(list[0], list[i]);
            }
        }
    }

    StreetNetwork out;
    std::vector<NodeId> node_map(net.nodes().size(), 0);
    std::map<std::size_t, NodeId> group_node;
    const auto node_for_group = [&](std::size_t g) {
        const std::size_t root = same_node.find(g);
        auto it = group_node.find(root);
        if (it == group_node.end()) {
            it = group_node.emplace(root, out.add_node(groups[root].centroid)).first;
            ++local.nodes_created;
        }
        return it->second;
    };
    for (const NetworkNode& node : net.nodes()) {
        const auto& list = groups_of_node[node.id];
        if (list.empty()) {
            node_map[node.id] = out.add_node(node.location);
        } else {
            for (std::size_t g : list) node_for_group(g);
            node_map[node.id] = node_for_group(list.front());
        }
    }

    const auto location_of = [&](NodeId n) { return out.node(n).location; };
    for (const Arc& arc : net.arcs()) {
        if (removed_arc[arc.id]) {
            continue;
        }
        std::vector<Point> pts = arc.geometry.points;
        const NodeId from = node_map[arc.from];
        const NodeId to = node_map[arc.to];
        if (!groups_of_node[arc.from].empty()) {
            pts.insert(pts.begin(), location_of(from));
        }
        if (!groups_of_node[arc.to].empty()) {
            pts.push_back(location_of(to));
        }
        // Keep exact node locations at the ends after dropping near-repeats.
        clean_points(pts, tol);
        if (pts.size() < 2 || polyline_length(pts) < tol) {
            continue;
        }
        pts.front() = location_of(from);
        pts.back() = location_of(to);
        out.add_arc(from, to, Polyline{std::move(pts)});
    }

    // A node shared by separate rings becomes a short connector between them.
    for (const NetworkNode& node : net.nodes()) {
        const auto& list = groups_of_node[node.id];
        for (std::size_t i = 1; i < list.size(); ++i) {
            const NodeId a = node_for_group(list.front());
            const NodeId b = node_for_group(list[i]);
            if (a == b) {
                continue;
            }
            std::vector<Point> pts{location_of(a), node.location, location_of(b)};
            clean_points(pts, tol);
            if (pts.size() < 2) {
                continue;
            }
            pts.front() = location_of(a);
            pts.back() = location_of(b);
            out.add_arc(a, b, Polyline{std::move(pts)});
            ++local.connectors_added;
        }
    }

    // Drop nodes left without arcs (e.g. ring corners with no approach).
    StreetNetwork compact;
    std::vector<NodeId> remap(out.nodes().size(), static_cast<NodeId>(-1));
    for (const NetworkNode& node : out.nodes()) {
        if (!node.incident_arcs.empty()) remap[node.id] = compact.add_node(node.location);
    }
    for (const Arc& arc : out.arcs()) {
        compact.add_arc(remap[arc.from], remap[arc.to], arc.geometry);
    }
    if (stats) *stats = local;
    return compact;
}

}  // namespace axialmap
