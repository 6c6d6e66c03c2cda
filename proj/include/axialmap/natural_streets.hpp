#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "axialmap/geometry.hpp"
#include "axialmap/topology.hpp"

namespace axialmap {

using StreetId = std::size_t;

// How arcs meeting at a junction are paired into continuous streets.
enum class JoinPrinciple {
    EveryBestFit,  // pair arcs at each node globally by ascending deflection
    SelfBestFit,   // grow seeded streets along their own best continuation
    SelfFit,       // grow seeded streets along the first acceptable continuation
};

std::string_view to_string(JoinPrinciple principle);
std::optional<JoinPrinciple> parse_join_principle(std::string_view text);

inline constexpr double kDefaultJoinThreshold = 45.0;

struct NaturalStreet {
    StreetId id = 0;
    std::vector<ArcId> arc_chain;
    // Oriented concatenation of the chain's arcs.
    Polyline geometry;
    bool closed = false;
    // Absent for closed streets.
    std::optional<BendMeasure> bend;

    // Distinct network nodes the street passes through (sorted).
    std::vector<NodeId> nodes;
};

struct StreetGeometry {
    Polyline geometry;
    bool closed = false;
};

// Concatenate a chain of arcs, flipping each arc so consecutive pieces share
// their joint node. Throws InvariantError if consecutive arcs share no node.
StreetGeometry street_geometry(const StreetNetwork& net, std::span<const ArcId> chain,
                               double tolerance = kDefaultSnapTolerance);

struct JoinConfig {
    JoinPrinciple principle = JoinPrinciple::EveryBestFit;
    double threshold_degrees = kDefaultJoinThreshold;
    double snap_tolerance = kDefaultSnapTolerance;
};

// Partition the arcs into natural streets. Joints are accepted only strictly
// below the threshold angle.
std::vector<NaturalStreet> generate_natural_streets(const StreetNetwork& net,
                                                    const JoinConfig& config = {});

// Deflection angle at every interior joint of a street, measured on the
// segments adjacent to each joint node.
std::vector<double> joint_angles(const StreetNetwork& net, const NaturalStreet& street);

// Wrap a bare polyline as a single-street record (no arcs), e.g. for chopping
// geometry that did not come from a network.
NaturalStreet make_street(StreetId id, Polyline geometry, double tolerance = kDefaultSnapTolerance);

}  // namespace axialmap
