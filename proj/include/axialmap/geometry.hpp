#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace axialmap {

// Default snap tolerance in meters.
inline constexpr double kDefaultSnapTolerance = 0.01;

// A location on the projected plane, in meters.
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double distance(Point a, Point b) { return norm(b - a); }

// A directed straight segment from `a` to `b`.
struct Segment {
    Point a;
    Point b;

    double length() const { return distance(a, b); }
    Point direction() const { return b - a; }
};

// Ordered vertex sequence. Street geometry of every kind is carried as a
// polyline; validity (>= 2 points, no repeated consecutive vertex) is checked
// by validate_polyline rather than enforced on construction.
struct Polyline {
    std::vector<Point> points;

    std::size_t size() const { return points.size(); }
    const Point& front() const { return points.front(); }
    const Point& back() const { return points.back(); }
    std::span<const Point> view() const { return points; }

    friend bool operator==(const Polyline&, const Polyline&) = default;
};

// Base line and farthest interior vertex of a vertex chain.
struct BendMeasure {
    double d = 0.0;      // endpoint-to-endpoint length
    double x = 0.0;      // max perpendicular distance of an interior vertex to the base line
    double ratio = 0.0;  // x / d
    std::size_t farthest_index = 0;
};

bool is_finite(Point p);

// Throws GeometryError unless the polyline has >= 2 finite points and no two
// consecutive points within `tolerance` of each other.
void validate_polyline(const Polyline& line, double tolerance = kDefaultSnapTolerance);

double polyline_length(std::span<const Point> points);

// Angle in degrees, in [0, 180], between the straight continuation of
// `incoming` and the direction of `outgoing`. 0 is a collinear continuation.
double deflection_angle(const Segment& incoming, const Segment& outgoing);

// Orientation-free angle between two lines, in [0, 90] degrees.
double line_angle(const Segment& a, const Segment& b);

// Perpendicular distance from `p` to the infinite line through `a` and `b`.
double line_distance(Point p, Point a, Point b);

// Distance from `p` to the closed segment.
double segment_distance(Point p, const Segment& s);

double polyline_distance(Point p, std::span<const Point> points);

// Throws ClosedLoopError when the endpoints are closer than `tolerance`.
BendMeasure measure_bend(std::span<const Point> points, double tolerance = kDefaultSnapTolerance);
inline BendMeasure measure_bend(const Polyline& line, double tolerance = kDefaultSnapTolerance) {
    return measure_bend(line.view(), tolerance);
}

// Half the apex complement for a mid-street split: atan(1 / (2 * ratio)), degrees.
double base_angle_from_ratio(double ratio);

// 180 - 2 * atan(1 / (2 * ratio)) in degrees: the smallest deflection between
// the two lines produced by splitting a chain of bend ratio `ratio` at its
// middle vertex. Throws DomainError for ratio <= 0.
double min_deflection_from_ratio(double ratio);

// Intersection of two closed segments, or of segments that come within
// `tolerance` of touching. For a proper crossing the crossing point is
// returned; for a touch the touching endpoint is returned.
std::optional<Point> segments_intersect(const Segment& a, const Segment& b,
                                        double tolerance = kDefaultSnapTolerance);

// Axis-aligned bounding box.
struct Box {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    static Box of(const Segment& s);
    static Box of(std::span<const Point> points);
    Box inflated(double by) const { return {min_x - by, min_y - by, max_x + by, max_y + by}; }
};

}  // namespace axialmap
