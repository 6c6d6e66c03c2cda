#include "axialmap/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include "axialmap/error.hpp"

namespace axialmap {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

void require_nonzero(const Segment& s, const char* which) {
    if (!is_finite(s.a) || !is_finite(s.b) || s.length() == 0.0) {
        throw GeometryError(std::string("zero-length or non-finite ") + which + " segment");
    }
}

}  // namespace

bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

void validate_polyline(const Polyline& line, double tolerance) {
    if (line.size() < 2) {
        throw GeometryError("polyline needs at least two points");
    }
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (!is_finite(line.points[i])) {
            throw GeometryError("non-finite coordinate at vertex " + std::to_string(i));
        }
        if (i > 0 && distance(line.points[i - 1], line.points[i]) < tolerance) {
            throw GeometryError("repeated vertex at " + std::to_string(i));
        }
    }
}

double polyline_length(std::span<const Point> points) {
    double total = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        total += distance(points[i - 1], points[i]);
    }
    return total;
}

double deflection_angle(const Segment& incoming, const Segment& outgoing) {
    require_nonzero(incoming, "incoming");
    require_nonzero(outgoing, "outgoing");
    const Point u = incoming.direction();
    const Point v = outgoing.direction();
    return std::atan2(std::abs(cross(u, v)), dot(u, v)) * kRadToDeg;
}

double line_angle(const Segment& a, const Segment& b) {
    const double angle = deflection_angle(a, b);
    return std::min(angle, 180.0 - angle);
}

double line_distance(Point p, Point a, Point b) {
    const Point base = b - a;
    const double len = norm(base);
    if (len == 0.0) {
        return distance(p, a);
    }
    return std::abs(cross(base, p - a)) / len;
}

double segment_distance(Point p, const Segment& s) {
    const Point dir = s.direction();
    const double len2 = dot(dir, dir);
    if (len2 == 0.0) {
        return distance(p, s.a);
    }
    const double t = std::clamp(dot(p - s.a, dir) / len2, 0.0, 1.0);
    return distance(p, s.a + t * dir);
}

double polyline_distance(Point p, std::span<const Point> points) {
    if (points.size() == 1) {
        return distance(p, points.front());
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < points.size(); ++i) {
        best = std::min(best, segment_distance(p, {points[i - 1], points[i]}));
    }
    return best;
}

BendMeasure measure_bend(std::span<const Point> points, double tolerance) {
    if (points.size() < 2) {
        throw GeometryError("bend measure needs at least two points");
    }
    const Point first = points.front();
    const Point last = points.back();
    BendMeasure bend;
    bend.d = distance(first, last);
    if (bend.d < tolerance) {
        throw ClosedLoopError("endpoints coincide; split the loop before measuring");
    }
    const Point base = last - first;
    double best = -1.0;
    for (std::size_t i = 1; i + 1 < points.size(); ++i) {
        const double dist = std::abs(cross(base, points[i] - first)) / bend.d;
        if (dist > best) {
            best = dist;
            bend.farthest_index = i;
        }
    }
    bend.x = std::max(best, 0.0);
    bend.ratio = bend.x / bend.d;
    return bend;
}

double base_angle_from_ratio(double ratio) {
    if (!(ratio > 0.0)) {
        throw DomainError("bend ratio must be positive");
    }
    return std::atan(1.0 / (2.0 * ratio)) * kRadToDeg;
}

double min_deflection_from_ratio(double ratio) {
    return 180.0 - 2.0 * base_angle_from_ratio(ratio);
}

std::optional<Point> segments_intersect(const Segment& a, const Segment& b, double tolerance) {
    const Point r = a.direction();
    const Point s = b.direction();
    const Point qp = b.a - a.a;
    const double denom = cross(r, s);
    const double scale = norm(r) * norm(s);

    // Proper (or endpoint-exact) crossing of non-parallel segments.
    if (std::abs(denom) > 1e-12 * scale) {
        const double t = cross(qp, s) / denom;
        const double u = cross(qp, r) / denom;
        if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) {
            // Snap to an endpoint when the crossing is at one, so touches
            // report the shared vertex exactly.
            const Point hit = a.a + t * r;
            for (const Point& end : {a.a, a.b, b.a, b.b}) {
                if (distance(hit, end) <= tolerance) {
                    return end;
                }
            }
            return hit;
        }
    }

    // Near touches and collinear overlaps: an endpoint lies within tolerance
    // of the other segment.
    std::optional<Point> best;
    double best_dist = tolerance;
    const auto consider = [&](Point end, const Segment& other) {
        const double dist = segment_distance(end, other);
        if (dist <= best_dist && (!best || dist < best_dist)) {
            best = end;
            best_dist = dist;
        }
    };
    consider(a.a, b);
    consider(a.b, b);
    consider(b.a, a);
    consider(b.b, a);
    return best;
}

Box Box::of(const Segment& s) {
    return {std::min(s.a.x, s.b.x), std::min(s.a.y, s.b.y), std::max(s.a.x, s.b.x),
            std::max(s.a.y, s.b.y)};
}

Box Box::of(std::span<const Point> points) {
    Box box{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const Point& p : points) {
        box.min_x = std::min(box.min_x, p.x);
        box.min_y = std::min(box.min_y, p.y);
        box.max_x = std::max(box.max_x, p.x);
        box.max_y = std::max(box.max_y, p.y);
    }
    return box;
}

}  // namespace axialmap
