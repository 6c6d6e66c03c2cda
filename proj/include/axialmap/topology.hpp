#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "axialmap/geometry.hpp"

namespace axialmap {

using NodeId = std::size_t;
using ArcId = std::size_t;

struct NetworkNode {
    NodeId id = 0;
    Point location;
    // Arcs touching this node; a self-loop arc is listed twice.
    std::vector<ArcId> incident_arcs;

    std::size_t degree() const { return incident_arcs.size(); }
};

struct Arc {
    ArcId id = 0;
    NodeId from = 0;
    NodeId to = 0;
    Polyline geometry;
    double length = 0.0;

    bool is_loop() const { return from == to; }
};

// Undirected arc-node street network. Arc direction is only the storage order
// of the geometry.
class StreetNetwork {
public:
    NodeId add_node(Point location);
    // Geometry endpoints must sit on the two nodes; checked by check_invariants.
    ArcId add_arc(NodeId from, NodeId to, Polyline geometry);

    const std::vector<NetworkNode>& nodes() const { return nodes_; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    const NetworkNode& node(NodeId id) const { return nodes_.at(id); }
    const Arc& arc(ArcId id) const { return arcs_.at(id); }

    bool empty() const { return arcs_.empty(); }
    double total_length() const;

    // Throws InvariantError on any broken Arc/Node/adjacency invariant.
    void check_invariants(double tolerance = kDefaultSnapTolerance) const;

private:
    std::vector<NetworkNode> nodes_;
    std::vector<Arc> arcs_;
};

struct PlanarizeConfig {
    double snap_tolerance = kDefaultSnapTolerance;
    // Off: split only where lines share a coordinate (bridges stay unsplit).
    bool split_at_crossings = false;
};

struct PlanarizeStats {
    std::size_t input_lines = 0;
    std::size_t skipped_degenerate = 0;
    std::size_t duplicate_arcs = 0;
    std::size_t crossings_inserted = 0;
};

// Build arc-node topology from raw polylines: snap coordinates within the
// tolerance, split at every shared coordinate (and optionally at geometric
// crossings), and drop duplicate arcs.
StreetNetwork planarize(std::span<const Polyline> raw, const PlanarizeConfig& config = {},
                        PlanarizeStats* stats = nullptr);

struct RoundaboutConfig {
    double max_perimeter = 120.0;
    std::size_t max_face_arcs = 16;
    double snap_tolerance = kDefaultSnapTolerance;
};

struct RoundaboutStats {
    std::size_t rings_found = 0;
    std::size_t nodes_created = 0;
    std::size_t connectors_added = 0;
};

// Arc sets of the simple faces that qualify as roundabouts (each sorted).
std::vector<std::vector<ArcId>> find_roundabouts(const StreetNetwork& net,
                                                 const RoundaboutConfig& config = {});

// Replace each small ring with one junction node at the centroid of its
// vertices. Approach arcs are extended to the new node.
StreetNetwork collapse_roundabouts(const StreetNetwork& net, const RoundaboutConfig& config = {},
                                   RoundaboutStats* stats = nullptr);

// Arcs of every network rewritten as plain polylines (for re-planarizing).
std::vector<Polyline> arcs_as_polylines(const StreetNetwork& net);

// Stable 64-bit FNV-1a digest of the node and arc geometry, as 16 hex digits.
std::string network_fingerprint(const StreetNetwork& net);

}  // namespace axialmap
