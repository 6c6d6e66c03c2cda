#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "axialmap/geometry.hpp"
#include "axialmap/natural_streets.hpp"
#include "axialmap/topology.hpp"

namespace axialmap {

using LineId = std::size_t;

inline constexpr double kDefaultHeadRatioFraction = 0.10;

// Network-wide bend thresholds, computed once from the initial natural
// streets and never updated while chopping.
struct ChopThresholds {
    double mean_x = 0.0;
    double mean_ratio = 0.0;
    double head_ratio_fraction = kDefaultHeadRatioFraction;
    // Deflection implied by a bend ratio of head_ratio_fraction * mean_ratio.
    double min_merge_angle = 0.0;

    static ChopThresholds from_means(double mean_x, double mean_ratio,
                                     double head_ratio_fraction = kDefaultHeadRatioFraction);
};

// A run of original street vertices replaced by one axial line.
struct CoveredSpan {
    StreetId street = 0;
    std::size_t first_vertex = 0;
    std::size_t last_vertex = 0;

    friend bool operator==(const CoveredSpan&, const CoveredSpan&) = default;
};

struct AxialLine {
    LineId id = 0;
    Point start;
    Point end;
    std::vector<StreetId> source_street_ids;  // sorted, unique
    std::vector<CoveredSpan> covered;

    Segment segment() const { return {start, end}; }
    double length() const { return distance(start, end); }
};

struct AxialMap {
    std::vector<AxialLine> lines;
    std::optional<ChopThresholds> thresholds;  // absent when no street qualified
    std::string provenance;
};

// Means of x and x/d over open streets with >= 3 vertices and a nonzero base
// line. Throws ThresholdsUnavailable if no street qualifies or all are straight.
ChopThresholds compute_thresholds(std::span<const NaturalStreet> streets,
                                  double head_ratio_fraction = kDefaultHeadRatioFraction,
                                  double tolerance = kDefaultSnapTolerance);
ChopThresholds compute_thresholds(std::span<const BendMeasure> bends,
                                  double head_ratio_fraction = kDefaultHeadRatioFraction);

// True when the bend is big enough to split: a long offset with at least the
// head fraction of the mean ratio, or a short offset with at least the mean ratio.
bool chop_predicate(const BendMeasure& bend, const ChopThresholds& thresholds);

// Vertex index of a closed chain at which it is split into two open halves:
// the vertex farthest from the start along the loop (ties to the smaller index).
std::size_t loop_split_index(std::span<const Point> points);

// Recursively split the street at its farthest vertex while the chop
// predicate holds, linking the endpoints of each remaining piece. Closed
// streets are first split into two halves. Lines carry local ids 0..n-1.
std::vector<AxialLine> chop(const NaturalStreet& street, const ChopThresholds& thresholds,
                            double tolerance = kDefaultSnapTolerance);

// One line per open street (two for a closed one): used when no thresholds exist.
std::vector<AxialLine> link_endpoints(const NaturalStreet& street,
                                      double tolerance = kDefaultSnapTolerance);

struct MergeConfig {
    double tolerance = kDefaultSnapTolerance;
    // Also merge lines whose source streets overlap.
    bool allow_same_street = false;
};

// Whether two lines are eligible to be merged under `config` (intersection
// and angle aside).
bool merge_eligible(const AxialLine& a, const AxialLine& b, const MergeConfig& config);

// Replace intersecting near-collinear pairs (deflection below `min_angle`) by
// the segment joining their mutually farthest endpoints, until no such pair is
// left. Pairs are taken by ascending angle, then ids. Merged lines get fresh ids
// above the input ids; untouched lines keep theirs. Output sorted by id.
std::vector<AxialLine> merge_collinear(std::vector<AxialLine> lines, double min_angle,
                                       const MergeConfig& config = {});

struct AxialConfig {
    JoinConfig join;
    double head_ratio_fraction = kDefaultHeadRatioFraction;
    MergeConfig merge;
};

// Chop every street with thresholds computed over all of them, then merge.
// Line ids are renumbered 0..n-1 in output order.
AxialMap build_axial_map(std::span<const NaturalStreet> streets, const AxialConfig& config = {});

// Natural streets, thresholds, chop, merge.
AxialMap generate_axial_map(const StreetNetwork& net, const AxialConfig& config = {});

}  // namespace axialmap
