// Seeded synthetic inputs shared by the unit and acceptance tests.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "axialmap/geometry.hpp"
#include "axialmap/syntax_graph.hpp"

namespace fixtures {

using axialmap::Point;
using axialmap::Polyline;

// `rows` horizontal and `cols` vertical straight lines with a vertex at every
// crossing, overhanging the outer crossings by half a spacing.
inline std::vector<Polyline> grid_lines(std::size_t rows, std::size_t cols, double spacing = 100.0) {
    std::vector<Polyline> out;
    const double h = spacing / 2.0;
    for (std::size_t i = 0; i < rows; ++i) {
        Polyline p;
        const double y = static_cast<double>(i) * spacing;
        p.points.push_back({-h, y});
        for (std::size_t j = 0; j < cols; ++j) p.points.push_back({static_cast<double>(j) * spacing, y});
        p.points.push_back({static_cast<double>(cols - 1) * spacing + h, y});
        out.push_back(std::move(p));
    }
    for (std::size_t j = 0; j < cols; ++j) {
        Polyline p;
        const double x = static_cast<double>(j) * spacing;
        p.points.push_back({x, -h});
        for (std::size_t i = 0; i < rows; ++i) p.points.push_back({x, static_cast<double>(i) * spacing});
        p.points.push_back({x, static_cast<double>(rows - 1) * spacing + h});
        out.push_back(std::move(p));
    }
    return out;
}

// Random walk whose heading drifts; vertex spacing 5..40 m. Open and simple
// enough for chopping, not guaranteed non-self-intersecting.
inline Polyline wiggly_street(std::mt19937_64& rng, Point origin, std::size_t vertices) {
    std::uniform_real_distribution<double> step(5.0, 40.0);
    std::normal_distribution<double> turn(0.0, 0.35);
    std::uniform_real_distribution<double> heading0(0.0, 2.0 * std::numbers::pi);
    Polyline p;
    p.points.push_back(origin);
    double heading = heading0(rng);
    for (std::size_t i = 1; i < vertices; ++i) {
        heading += turn(rng);
        const double s = step(rng);
        const Point last = p.points.back();
        p.points.push_back({last.x + s * std::cos(heading), last.y + s * std::sin(heading)});
    }
    return p;
}

// Perturbed grid city: a size x size lattice of jittered junctions, every
// block edge a separate line with one or two offset interior vertices, plus
// diagonal avenues running junction to junction.
inline std::vector<Polyline> synthetic_city(std::size_t size, std::uint64_t seed, double spacing = 80.0,
                                            std::size_t diagonal_every = 7) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.12 * spacing, 0.12 * spacing);
    std::normal_distribution<double> wiggle(0.0, 0.04 * spacing);
    std::bernoulli_distribution two(0.5);

    std::vector<Point> node(size * size);
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j < size; ++j) {
            node[i * size + j] = {static_cast<double>(j) * spacing + jitter(rng),
                                  static_cast<double>(i) * spacing + jitter(rng)};
        }
    }
    const auto edge = [&](Point a, Point b) {
        Polyline p;
        p.points.push_back(a);
        const Point d = b - a;
        const Point n{-d.y / norm(d), d.x / norm(d)};
        const std::size_t k = two(rng) ? 2 : 1;
        for (std::size_t t = 1; t <= k; ++t) {
            const double f = static_cast<double>(t) / static_cast<double>(k + 1);
            p.points.push_back(a + f * d + wiggle(rng) * n);
        }
        p.points.push_back(b);
        return p;
    };
    std::vector<Polyline> out;
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j + 1 < size; ++j) {
            out.push_back(edge(node[i * size + j], node[i * size + j + 1]));
            out.push_back(edge(node[j * size + i], node[(j + 1) * size + i]));
        }
    }
    for (std::size_t start = 0; start + 1 < size; start += diagonal_every) {
        Polyline a, b;
        for (std::size_t t = 0; start + t < size; ++t) {
            a.points.push_back(node[t * size + start + t]);
            if (start > 0) b.points.push_back(node[(start + t) * size + t]);
        }
        out.push_back(std::move(a));
        if (b.size() >= 2) out.push_back(std::move(b));
    }
    return out;
}

// Random connected simple graph: a random spanning tree plus extra edges.
inline axialmap::ConnectivityGraph random_connected_graph(std::mt19937_64& rng, std::size_t n,
                                                          double extra_edge_probability) {
    std::vector<std::size_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = i;
    axialmap::ConnectivityGraph g(ids);
    for (std::size_t v = 1; v < n; ++v) {
        std::uniform_int_distribution<std::size_t> parent(0, v - 1);
        g.add_edge(v, parent(rng));
    }
    std::bernoulli_distribution extra(extra_edge_probability);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (extra(rng)) g.add_edge(a, b);
        }
    }
    return g;
}

// Regular polygon ring of the given perimeter, closed (first point repeated).
inline Polyline ring(Point centre, double perimeter, std::size_t sides, double phase = 0.0) {
    const double circumradius = perimeter / (2.0 * static_cast<double>(sides) *
                                             std::sin(std::numbers::pi / static_cast<double>(sides)));
    Polyline p;
    for (std::size_t i = 0; i <= sides; ++i) {
        const double a = phase + 2.0 * std::numbers::pi * static_cast<double>(i % sides) / static_cast<double>(sides);
        p.points.push_back({centre.x + circumradius * std::cos(a), centre.y + circumradius * std::sin(a)});
    }
    return p;
}

// Octagonal roundabout of perimeter 60 m at the origin with four straight
// approaches of `approach` meters leaving alternate vertices radially.
inline std::vector<Polyline> octagon_roundabout(double approach = 50.0) {
    std::vector<Polyline> out{ring({0.0, 0.0}, 60.0, 8)};
    for (std::size_t i = 0; i < 8; i += 2) {
        const Point v = out[0].points[i];
        const Point dir = (1.0 / norm(v)) * v;
        out.push_back(Polyline{{v, v + approach * dir}});
    }
    return out;
}

}  // namespace fixtures
