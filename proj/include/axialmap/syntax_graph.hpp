#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "axialmap/axial.hpp"
#include "axialmap/natural_streets.hpp"
#include "axialmap/topology.hpp"

namespace axialmap {

// Simple undirected graph over analysis units (axial lines or streets).
// Graph vertices are dense indices; unit_ids maps them back.
class ConnectivityGraph {
public:
    explicit ConnectivityGraph(std::vector<std::size_t> unit_ids = {});

    // Ignores self-loops and repeated edges; returns whether an edge was added.
    bool add_edge(std::size_t a, std::size_t b);

    std::size_t size() const { return adjacency_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    std::size_t degree(std::size_t v) const { return adjacency_.at(v).size(); }
    const std::vector<std::size_t>& neighbours(std::size_t v) const { return adjacency_.at(v); }
    const std::vector<std::size_t>& unit_ids() const { return unit_ids_; }

    // Sorted (lo, hi) pairs.
    std::vector<std::pair<std::size_t, std::size_t>> edges() const;

private:
    std::vector<std::size_t> unit_ids_;
    std::vector<std::vector<std::size_t>> adjacency_;  // sorted
    std::size_t edge_count_ = 0;
};

// Edge iff the two segments intersect within the tolerance.
ConnectivityGraph build_connectivity_graph(std::span<const AxialLine> lines,
                                           double tolerance = kDefaultSnapTolerance);

// Edge iff the two streets pass through a common network node.
ConnectivityGraph build_connectivity_graph(std::span<const NaturalStreet> streets, const StreetNetwork& net);

// Marks "RA = 0": integration diverges and is ranked above every finite value.
inline constexpr double kInfiniteIntegration = std::numeric_limits<double>::infinity();

inline constexpr unsigned kLocalRadius = 3;

struct NodeMetrics {
    std::size_t connectivity = 0;
    // Nodes reached within the radius, the node itself included.
    std::size_t node_count_in_radius = 1;
    std::optional<double> total_depth;  // absent for an isolated node
    std::optional<double> mean_depth;
    std::optional<double> ra;           // needs >= 3 nodes in radius
    std::optional<double> rra;
    std::optional<double> integration;  // 1 / rra, or kInfiniteIntegration
    std::optional<unsigned> radius;     // absent: unbounded
};

// Diamond-shaped normalisation value for a system of k nodes.
double diamond_value(std::size_t k);

// Depth-based metrics of one node within `radius` steps (unbounded if absent).
NodeMetrics integration(const ConnectivityGraph& g, std::size_t node, std::optional<unsigned> radius);

// Metrics for every node; the per-node searches are spread over `threads`
// workers (0 = hardware concurrency).
std::vector<NodeMetrics> integration_all(const ConnectivityGraph& g, std::optional<unsigned> radius,
                                         unsigned threads = 0);

struct JenksResult {
    // Upper bound (inclusive) of every class but the last, ascending.
    std::vector<double> breaks;
    std::size_t class_count = 0;
    // Requested class count exceeded the number of distinct values.
    bool reduced = false;
};

// Exact optimal 1-D partition minimising within-class sum of squared
// deviations. Non-finite values are ignored.
JenksResult jenks_breaks(std::span<const double> values, std::size_t class_count);

// Class index of a value given the breaks; +inf falls in the last class.
std::size_t classify(double value, std::span<const double> breaks);

// Within-class sum of squared deviations of the finite values under `breaks`.
double within_class_sse(std::span<const double> values, std::span<const double> breaks);

}  // namespace axialmap
