#include "axialmap/natural_streets.hpp"

#include <algorithm>
#include <deque>
#include <tuple>

#include "axialmap/error.hpp"

namespace axialmap {

std::string_view to_string(JoinPrinciple principle) {
    switch (principle) {
        case JoinPrinciple::EveryBestFit: return "every-best-fit";
        case JoinPrinciple::SelfBestFit: return "self-best-fit";
        case JoinPrinciple::SelfFit: return "self-fit";
    }
    return "unknown";
}

std::optional<JoinPrinciple> parse_join_principle(std::string_view text) {
    for (JoinPrinciple p :
         {JoinPrinciple::EveryBestFit, JoinPrinciple::SelfBestFit, JoinPrinciple::SelfFit}) {
        if (text == to_string(p)) return p;
    }
    return std::nullopt;
}

namespace {

// An arc end: 2 * arc + side, side 0 at `from`, side 1 at `to`.
using End = std::size_t;
constexpr End kNoEnd = static_cast<End>(-1);

ArcId arc_of(End e) { return e / 2; }

NodeId node_of(const StreetNetwork& net, End e) {
    const Arc& arc = net.arc(arc_of(e));
    return e % 2 == 0 ? arc.from : arc.to;
}

// Segment arriving at the end's node along the arc.
Segment arriving(const StreetNetwork& net, End e) {
    const auto& pts = net.arc(arc_of(e)).geometry.points;
    return e % 2 == 1 ? Segment{pts[pts.size() - 2], pts.back()} : Segment{pts[1], pts[0]};
}

// Segment leaving the end's node along the arc.
Segment leaving(const StreetNetwork& net, End e) {
    const auto& pts = net.arc(arc_of(e)).geometry.points;
    return e % 2 == 0 ? Segment{pts[0], pts[1]} : Segment{pts.back(), pts[pts.size() - 2]};
}

double joint_angle(const StreetNetwork& net, End incoming, End outgoing) {
    return deflection_angle(arriving(net, incoming), leaving(net, outgoing));
}

struct OrientedArc {
    ArcId arc;
    bool forward;
};

StreetGeometry assemble(const StreetNetwork& net, std::span<const OrientedArc> chain,
                        double tolerance) {
    StreetGeometry out;
    auto& pts = out.geometry.points;
    for (const OrientedArc& piece : chain) {
        const auto& src = net.arc(piece.arc).geometry.points;
        const std::size_t skip = pts.empty() ? 0 : 1;
        if (piece.forward) {
            pts.insert(pts.end(), src.begin() + static_cast<std::ptrdiff_t>(skip), src.end());
        } else {
            pts.insert(pts.end(), src.rbegin() + static_cast<std::ptrdiff_t>(skip), src.rend());
        }
    }
    out.closed = pts.size() >= 3 && distance(pts.front(), pts.back()) < tolerance;
    return out;
}

std::vector<std::vector<End>> ends_by_node(const StreetNetwork& net) {
    std::vector<std::vector<End>> ends(net.nodes().size());
    for (const Arc& arc : net.arcs()) {
        ends[arc.from].push_back(2 * arc.id);
        ends[arc.to].push_back(2 * arc.id + 1);
    }
    return ends;
}

std::vector<End> pair_every_best_fit(const StreetNetwork& net, double threshold) {
    std::vector<End> partner(net.arcs().size() * 2, kNoEnd);
    const auto ends = ends_by_node(net);
    struct Candidate {
        double angle;
        ArcId lo;
        ArcId hi;
        End a;
        End b;
    };
    std::vector<Candidate> candidates;
    for (const auto& at_node : ends) {
        candidates.clear();
        for (std::size_t i = 0; i < at_node.size(); ++i) {
            for (std::size_t j = i + 1; j < at_node.size(); ++j) {
                const End a = at_node[i];
                const End b = at_node[j];
                const double angle = joint_angle(net, a, b);
                if (angle < threshold) {
                    candidates.push_back({angle, std::min(arc_of(a), arc_of(b)),
                                          std::max(arc_of(a), arc_of(b)), a, b});
                }
            }
        }
        std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
            return std::tie(x.angle, x.lo, x.hi, x.a, x.b) < std::tie(y.angle, y.lo, y.hi, y.a, y.b);
        });
        for (const Candidate& c : candidates) {
            if (partner[c.a] == kNoEnd && partner[c.b] == kNoEnd) {
                partner[c.a] = c.b;
                partner[c.b] = c.a;
            }
        }
    }
    return partner;
}

std::vector<std::vector<OrientedArc>> trace_chains(const StreetNetwork& net,
                                                   const std::vector<End>& partner) {
    const std::size_t arc_count = net.arcs().size();
    std::vector<bool> used(arc_count, false);
    std::vector<std::vector<OrientedArc>> chains;
    for (ArcId a = 0; a < arc_count; ++a) {
        if (used[a]) continue;
        std::vector<OrientedArc> back;
        bool closed = false;
        for (End e = 2 * a; back.size() <= arc_count;) {
            const End p = partner[e];
            if (p == kNoEnd) break;
            if (arc_of(p) == a) {
                closed = true;
                break;
            }
            back.push_back({arc_of(p), p % 2 == 1});
            e = p ^ 1U;
        }
        std::vector<OrientedArc> chain;
        if (!closed) {
            chain.assign(back.rbegin(), back.rend());
        }
        chain.push_back({a, true});
        for (End e = 2 * a + 1; chain.size() <= arc_count;) {
            const End p = partner[e];
            if (p == kNoEnd || arc_of(p) == a) break;
            chain.push_back({arc_of(p), p % 2 == 0});
            e = p ^ 1U;
        }
        for (const OrientedArc& piece : chain) {
            if (used[piece.arc]) {
                throw InvariantError("arc " + std::to_string(piece.arc) + " assigned to two streets");
            }
            used[piece.arc] = true;
        }
        chains.push_back(std::move(chain));
    }
    return chains;
}

std::vector<std::vector<OrientedArc>> grow_seeded(const StreetNetwork& net, double threshold,
                                                  bool best_fit) {
    const std::size_t arc_count = net.arcs().size();
    const auto ends = ends_by_node(net);
    std::vector<ArcId> seeds(arc_count);
    for (ArcId a = 0; a < arc_count; ++a) seeds[a] = a;
    std::stable_sort(seeds.begin(), seeds.end(), [&](ArcId x, ArcId y) {
        return net.arc(x).length > net.arc(y).length;
    });

    std::vector<bool> used(arc_count, false);
    // Picks the continuation for a street end; `at_chain` is the street's end
    // at the node and `incoming` tells whether it arrives there.
    const auto pick = [&](End at_chain, bool incoming) -> End {
        End chosen = kNoEnd;
        double chosen_angle = threshold;
        for (End c : ends[node_of(net, at_chain)]) {
            if (used[arc_of(c)]) continue;
            const double angle = incoming ? joint_angle(net, at_chain, c) : joint_angle(net, c, at_chain);
            if (!(angle < threshold)) continue;
            if (!best_fit) return c;
            if (chosen == kNoEnd || angle < chosen_angle) {
                chosen = c;
                chosen_angle = angle;
            }
        }
        return chosen;
    };

    std::vector<std::vector<OrientedArc>> chains;
    for (ArcId seed : seeds) {
        if (used[seed]) continue;
        used[seed] = true;
        std::deque<OrientedArc> chain{{seed, true}};
        for (;;) {
            const OrientedArc& tail = chain.back();
            const End tail_end = 2 * tail.arc + (tail.forward ? 1 : 0);
            const End next = pick(tail_end, true);
            if (next == kNoEnd) break;
            used[arc_of(next)] = true;
            chain.push_back({arc_of(next), next % 2 == 0});
        }
        for (;;) {
            const OrientedArc& head = chain.front();
            const End head_end = 2 * head.arc + (head.forward ? 0 : 1);
            const End prev = pick(head_end, false);
            if (prev == kNoEnd) break;
            used[arc_of(prev)] = true;
            chain.push_front({arc_of(prev), prev % 2 == 1});
        }
        chains.emplace_back(chain.begin(), chain.end());
    }
    return chains;
}

}  // namespace

StreetGeometry street_geometry(const StreetNetwork& net, std::span<const ArcId> chain,
                               double tolerance) {
    std::vector<OrientedArc> oriented;
    oriented.reserve(chain.size());
    if (chain.empty()) {
        return {};
    }
    const Arc& first = net.arc(chain[0]);
    bool forward = true;
    if (chain.size() > 1) {
        const Arc& second = net.arc(chain[1]);
        if (first.to == second.from || first.to == second.to) {
            forward = true;
        } else if (first.from == second.from || first.from == second.to) {
            forward = false;
        } else {
            throw InvariantError("street chain is discontinuous after arc " + std::to_string(first.id));
        }
    }
    oriented.push_back({first.id, forward});
    NodeId at = forward ? first.to : first.from;
    for (std::size_t i = 1; i < chain.size(); ++i) {
        const Arc& arc = net.arc(chain[i]);
        if (arc.from == at) {
            oriented.push_back({arc.id, true});
            at = arc.to;
        } else if (arc.to == at) {
            oriented.push_back({arc.id, false});
            at = arc.from;
        } else {
            throw InvariantError("street chain is discontinuous at arc " + std::to_string(arc.id));
        }
    }
    return assemble(net, oriented, tolerance);
}

NaturalStreet make_street(StreetId id, Polyline geometry, double tolerance) {
    NaturalStreet street;
    street.id = id;
    street.geometry = std::move(geometry);
    street.closed = street.geometry.size() >= 3 &&
                    distance(street.geometry.front(), street.geometry.back()) < tolerance;
    if (!street.closed) {
        street.bend = measure_bend(street.geometry, tolerance);
    }
    return street;
}

std::vector<NaturalStreet> generate_natural_streets(const StreetNetwork& net, const JoinConfig& config) {
    if (!(config.threshold_degrees > 0.0 && config.threshold_degrees < 180.0)) {
        throw DomainError("join threshold must lie in (0, 180)");
    }
    std::vector<std::vector<OrientedArc>> chains;
    switch (config.principle) {
        case JoinPrinciple::EveryBestFit:
            chains = trace_chains(net, pair_every_best_fit(net, config.threshold_degrees));
            break;
        case JoinPrinciple::SelfBestFit:
            chains = grow_seeded(net, config.threshold_degrees, true);
            break;
        case JoinPrinciple::SelfFit:
            chains = grow_seeded(net, config.threshold_degrees, false);
            break;
    }

    std::vector<NaturalStreet> streets;
    streets.reserve(chains.size());
    for (const auto& chain : chains) {
        NaturalStreet street;
        street.id = streets.size();
        for (const OrientedArc& piece : chain) {
            street.arc_chain.push_back(piece.arc);
            street.nodes.push_back(net.arc(piece.arc).from);
            street.nodes.push_back(net.arc(piece.arc).to);
        }
        std::sort(street.nodes.begin(), street.nodes.end());
        street.nodes.erase(std::unique(street.nodes.begin(), street.nodes.end()), street.nodes.end());
        StreetGeometry geom = assemble(net, chain, config.snap_tolerance);
        street.geometry = std::move(geom.geometry);
        street.closed = geom.closed;
        if (!street.closed) {
            street.bend = measure_bend(street.geometry, config.snap_tolerance);
        }
        streets.push_back(std::move(street));
    }
    return streets;
}

std::vector<double> joint_angles(const StreetNetwork& net, const NaturalStreet& street) {
    std::vector<double> angles;
    const auto& pts = street.geometry.points;
    std::size_t joint = 0;
    for (std::size_t i = 0; i + 1 < street.arc_chain.size(); ++i) {
        joint += net.arc(street.arc_chain[i]).geometry.size() - 1;
        angles.push_back(deflection_angle({pts[joint - 1], pts[joint]}, {pts[joint], pts[joint + 1]}));
    }
    return angles;
}

}  // namespace axialmap
