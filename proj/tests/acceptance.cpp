// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

#include "axialmap/axial.hpp"
#include "axialmap/error.hpp"
#include "axialmap/io.hpp"
#include "axialmap/pipeline.hpp"
#include "axialmap/stats.hpp"
#include "axialmap/syntax_graph.hpp"
#include "axialmap/topology.hpp"
#include "fixtures.hpp"

using namespace axialmap;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double two_pass_r2(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab * sab / (saa * sbb);
}

std::vector<NaturalStreet> wiggly_streets(std::uint64_t seed, std::size_t count, double spread) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, spread);
    std::uniform_int_distribution<std::size_t> len(3, 40);
    std::vector<NaturalStreet> out;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(make_street(i, fixtures::wiggly_street(rng, {u(rng), u(rng)}, len(rng))));
    }
    return out;
}

std::string lines_geojson(const std::vector<Polyline>& lines) {
    nlohmann::json doc{{"type", "FeatureCollection"}, {"features", nlohmann::json::array()}};
    for (const Polyline& p : lines) {
        nlohmann::json coords = nlohmann::json::array();
        for (Point q : p.points) coords.push_back({q.x, q.y});
        doc["features"].push_back({{"type", "Feature"},
                                   {"properties", nlohmann::json::object()},
                                   {"geometry", {{"type", "LineString"}, {"coordinates", coords}}}});
    }
    return doc.dump();
}

// ---------------------------------------------------------------------------

Outcome angle_derivation() {
    Outcome o;
    const double alpha = min_deflection_from_ratio(0.015);
    const double beta = base_angle_from_ratio(0.015);
    o.require(std::abs(alpha - 3.44) <= 0.01, fmt("alpha %.6f", alpha));
    o.require(std::abs(beta - 88.28) <= 0.01, fmt("beta %.6f", beta));
    o.detail = o.pass ? fmt("alpha=%.4f beta=%.4f", alpha, beta) : o.detail;
    return o;
}

Outcome grid_oracle() {
    Outcome o;
    for (auto [n, m] : {std::pair<std::size_t, std::size_t>{3, 3}, {5, 5}, {8, 4}}) {
        PipelineConfig config;
        const PipelineResult r = run_pipeline(fixtures::grid_lines(n, m), config);
        o.require(r.map.lines.size() == n + m, fmt("%gx%g grid gave %g lines", n, m, r.map.lines.size()));
        const ConnectivityGraph g = build_connectivity_graph(r.map.lines);
        for (std::size_t i = 0; i < r.map.lines.size(); ++i) {
            const AxialLine& l = r.map.lines[i];
            const bool horizontal = std::abs(l.start.y - l.end.y) < 1e-9;
            o.require(g.degree(i) == (horizontal ? m : n), fmt("%gx%g grid: line %g has wrong connectivity", n, m, i));
        }
    }
    if (o.pass) o.detail = "(3,3) (5,5) (8,4)";
    return o;
}

Outcome chop_fixpoint() {
    Outcome o;
    const auto streets = wiggly_streets(2024, 500, 8000.0);
    const ChopThresholds t = compute_thresholds(streets);
    std::size_t lines = 0;
    for (const NaturalStreet& s : streets) {
        const auto out = chop(s, t);
        lines += out.size();
        o.require(out.front().start == s.geometry.front() && out.back().end == s.geometry.back(), "street ends not covered");
        for (std::size_t i = 0; i < out.size(); ++i) {
            const CoveredSpan& c = out[i].covered.at(0);
            o.require(out[i].start == s.geometry.points.at(c.first_vertex) && out[i].end == s.geometry.points.at(c.last_vertex),
                      "split point is not an original vertex");
            if (i > 0) o.require(out[i - 1].covered[0].last_vertex == c.first_vertex, "covered spans not consecutive");
            const std::span<const Point> piece(s.geometry.points.data() + c.first_vertex, c.last_vertex - c.first_vertex + 1);
            o.require(!chop_predicate(measure_bend(piece), t), "emitted line still satisfies the chop predicate");
        }
    }
    if (o.pass) o.detail = fmt("500 streets -> %g lines, mean_x=%.3f mean_ratio=%.4f", lines, t.mean_x, t.mean_ratio);
    return o;
}

std::size_t merge_violations(const std::vector<AxialLine>& lines, double min_angle) {
    std::size_t bad = 0;
    const MergeConfig cfg;
    for (std::size_t a = 0; a < lines.size(); ++a) {
        for (std::size_t b = a + 1; b < lines.size(); ++b) {
            if (!merge_eligible(lines[a], lines[b], cfg)) continue;
            if (!segments_intersect(lines[a].segment(), lines[b].segment(), cfg.tolerance)) continue;
            if (line_angle(lines[a].segment(), lines[b].segment()) < min_angle) ++bad;
        }
    }
    return bad;
}

Outcome merge_postcondition() {
    Outcome o;
    const auto streets = wiggly_streets(99, 500, 2500.0);
    const ChopThresholds t = compute_thresholds(streets);
    std::vector<AxialLine> lines;
    for (const NaturalStreet& s : streets) {
        for (AxialLine l : chop(s, t)) {
            l.id = lines.size();
            l.source_street_ids = {s.id};
            lines.push_back(std::move(l));
        }
    }
    const std::size_t before = lines.size();
    const auto merged = merge_collinear(lines, t.min_merge_angle);
    o.require(merge_violations(merged, t.min_merge_angle) == 0, "near-collinear intersecting pair left after merge");
    o.require(merged.size() < before, "random fixture produced no merges");

    std::vector<AxialLine> chain;
    Point p{0, 0};
    for (StreetId i = 0; i < 10; ++i) {
        AxialLine l;
        l.id = i;
        l.start = p;
        l.end = {p.x + 120.0, (i % 2 == 0) ? 1.5 : 0.0};
        l.source_street_ids = {i};
        p = l.end;
        chain.push_back(l);
    }
    const auto one = merge_collinear(chain, 3.44);
    o.require(one.size() == 1, fmt("near-collinear chain left %g lines", one.size()));
    if (o.pass) o.detail = fmt("random %g -> %g lines, chain 10 -> 1, min angle %.4f", before, merged.size(), t.min_merge_angle);
    return o;
}

Outcome integration_oracle() {
    Outcome o;
    std::mt19937_64 rng(500);
    std::uniform_int_distribution<std::size_t> size(3, 50);
    std::uniform_real_distribution<double> density(0.0, 0.15);
    const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = size(rng);
        const ConnectivityGraph g = fixtures::random_connected_graph(rng, n, density(rng));
        // Floyd-Warshall all-pairs steps.
        const std::size_t inf = std::numeric_limits<std::size_t>::max() / 4;
        std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, inf));
        for (std::size_t v = 0; v < n; ++v) d[v][v] = 0;
        for (auto [a, b] : g.edges()) d[a][b] = d[b][a] = 1;
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);

        for (std::optional<unsigned> radius : {std::optional<unsigned>{3u}, std::optional<unsigned>{}}) {
            const auto metrics = integration_all(g, radius);
            for (std::size_t v = 0; v < n; ++v) {
                double td = 0.0;
                std::size_t k = 0;
                for (std::size_t u = 0; u < n; ++u) {
                    if (d[v][u] < inf && (!radius || d[v][u] <= *radius)) {
                        td += static_cast<double>(d[v][u]);
                        ++k;
                    }
                }
                const NodeMetrics& m = metrics[v];
                o.require(m.node_count_in_radius == k, "node count in radius differs");
                o.require(m.total_depth && close(*m.total_depth, td), "total depth differs");
                const double md = td / static_cast<double>(k - 1);
                o.require(m.mean_depth && close(*m.mean_depth, md), "mean depth differs");
                if (k < 3) {
                    o.require(!m.ra && !m.integration, "ra defined below three nodes");
                    continue;
                }
                const double kd = static_cast<double>(k);
                const double ra = 2.0 * (md - 1.0) / (kd - 2.0);
                const double dk = 2.0 * (kd * (std::log2((kd + 2.0) / 3.0) - 1.0) + 1.0) / ((kd - 1.0) * (kd - 2.0));
                o.require(m.ra && close(*m.ra, ra), "ra differs");
                o.require(m.rra && close(*m.rra, ra / dk), "rra differs");
            }
        }
    }
    if (o.pass) o.detail = "100 graphs, radius 3 and unbounded";
    return o;
}

Outcome jenks_oracle() {
    Outcome o;
    std::mt19937_64 rng(600);
    std::uniform_int_distribution<std::size_t> size(1, 12);
    std::uniform_int_distribution<std::size_t> classes(1, 4);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    std::size_t compared = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(size(rng));
        for (double& x : v) x = (trial % 3 == 0) ? std::round(u(rng) / 5.0) : u(rng);
        std::vector<double> sorted = v;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t distinct =
            static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
        const std::size_t k = std::min(classes(rng), distinct);
        const JenksResult r = jenks_breaks(v, k);
        // Enumerate every placement of k-1 cuts among the n-1 gaps of the sorted values.
        sorted = v;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        double best = std::numeric_limits<double>::infinity();
        for (std::uint32_t mask = 0; mask < (1u << (n - 1)); ++mask) {
            if (static_cast<std::size_t>(__builtin_popcount(mask)) != k - 1) continue;
            double sse = 0.0;
            std::size_t lo = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (i == n - 1 || (mask >> i & 1u)) {
                    double mean = 0.0;
                    for (std::size_t j = lo; j <= i; ++j) mean += sorted[j];
                    mean /= static_cast<double>(i + 1 - lo);
                    for (std::size_t j = lo; j <= i; ++j) sse += (sorted[j] - mean) * (sorted[j] - mean);
                    lo = i + 1;
                }
            }
            best = std::min(best, sse);
        }
        const double got = within_class_sse(v, r.breaks);
        o.require(r.class_count == k, "class count differs");
        o.require(std::abs(got - best) <= 1e-9 * std::max(1.0, best), fmt("sse %.12g vs optimum %.12g", got, best));
        ++compared;
    }
    if (o.pass) o.detail = fmt("%g cases, n<=12, k<=4", compared);
    return o;
}

std::vector<double> lognormal_fixture() {
    std::mt19937_64 rng(3408);
    std::lognormal_distribution<double> ln(3.4, 0.8);
    std::vector<double> v(10000);
    for (double& x : v) x = ln(rng);
    return v;
}

Outcome lognormal_recovery() {
    Outcome o;
    const LognormalFit f = fit_lognormal(lognormal_fixture());
    o.require(std::abs(f.mu / 3.4 - 1.0) <= 0.05, fmt("mu %.4f", f.mu));
    o.require(std::abs(f.sigma / 0.8 - 1.0) <= 0.05, fmt("sigma %.4f", f.sigma));
    o.require(f.ks_statistic < 0.02, fmt("ks %.4f", f.ks_statistic));
    if (o.pass) o.detail = fmt("mu=%.4f sigma=%.4f ks=%.4f", f.mu, f.sigma, f.ks_statistic);
    return o;
}

Outcome head_tail_asymmetry() {
    Outcome o;
    const HeadTailSplit s = head_tail_split(lognormal_fixture());
    o.require(s.head_fraction < 0.5, fmt("head fraction %.4f", s.head_fraction));
    if (o.pass) o.detail = fmt("head %.4f tail %.4f", s.head_fraction, s.tail_fraction());
    return o;
}

Outcome statistics_oracles() {
    Outcome o;
    std::mt19937_64 rng(900);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> size(3, 300);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = size(rng);
        const double slope = noise(rng);
        std::vector<double> m(n), f(n);
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = 5.0 + noise(rng);
            f[i] = 100.0 + slope * m[i] + noise(rng);
        }
        worst = std::max(worst, std::abs(r_squared(f, m) - two_pass_r2(f, m)));
    }
    o.require(worst <= 1e-9, fmt("max r2 deviation %.3g", worst));
    const TTestResult t = correlation_t_test(0.8, 27);
    o.require(std::abs(t.t - 6.67) <= 0.01, fmt("t %.4f", t.t));
    if (o.pass) o.detail = fmt("max r2 deviation %.2g, t(0.8,27)=%.4f", worst, t.t);
    return o;
}

Outcome roundabout_behaviour() {
    Outcome o;
    RoundaboutStats stats;
    const StreetNetwork oct = collapse_roundabouts(planarize(fixtures::octagon_roundabout()), {}, &stats);
    std::size_t hubs = 0;
    for (const NetworkNode& n : oct.nodes()) hubs += n.degree() == 4;
    o.require(stats.rings_found == 1 && hubs == 1 && oct.arcs().size() == 4, "octagon did not collapse to one degree-4 node");

    std::vector<Polyline> lines{fixtures::ring({0, 0}, 5000.0, 200)};
    std::mt19937_64 rng(10);
    for (std::size_t k = 0; k < 4; ++k) {
        const Point v = lines[0].points[50 * k];
        Polyline spoke{{v}};
        const Point out = (1.0 / norm(v)) * v;
        const Point side{-out.y, out.x};
        std::normal_distribution<double> wiggle(0.0, 12.0);
        for (int s = 1; s <= 12; ++s) spoke.points.push_back(v + (40.0 * s) * out + wiggle(rng) * side);
        lines.push_back(spoke);
    }
    const StreetNetwork net = planarize(lines);
    RoundaboutStats ring_stats;
    const StreetNetwork kept = collapse_roundabouts(net, {}, &ring_stats);
    o.require(ring_stats.rings_found == 0 && network_fingerprint(kept) == network_fingerprint(net),
              "5 km ring was modified");
    PipelineConfig config;
    const PipelineResult r = run_pipeline(lines, config);
    const auto ring_street = std::find_if(r.streets.begin(), r.streets.end(), [](const NaturalStreet& s) { return s.closed; });
    std::size_t ring_lines = 0;
    if (ring_street != r.streets.end()) {
        // Ring lines are those covering the ring street; merged lines carry its id too.
        for (const AxialLine& l : r.map.lines) {
            ring_lines += std::binary_search(l.source_street_ids.begin(), l.source_street_ids.end(), ring_street->id);
        }
    }
    o.require(ring_street != r.streets.end(), "ring did not form a closed street");
    o.require(ring_lines >= 4, fmt("ring chopped into %g lines", ring_lines));
    if (o.pass) o.detail = fmt("octagon -> degree-4 node, ring chopped into %g lines", ring_lines);
    return o;
}

Outcome performance_budget() {
    Outcome o;
    const auto lines = fixtures::synthetic_city(160, 4242);
    PipelineConfig config;
    const auto t0 = std::chrono::steady_clock::now();
    const PipelineResult r = run_pipeline(lines, config);
    const double elapsed = seconds_since(t0);
    o.require(r.report.arc_count >= 50000, fmt("only %g arcs", r.report.arc_count));
    o.require(r.map.thresholds.has_value(), "no thresholds");
    o.require(elapsed < 60.0, fmt("took %.2f s", elapsed));
    if (o.pass) {
        o.detail = fmt("%g arcs -> %g axial lines in %.2f s", r.report.arc_count, r.map.lines.size(), elapsed);
    }
    return o;
}

int run_command(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome gate_correlation() {
    Outcome o;
    const fs::path dir = fs::temp_directory_path() / ("axialmap_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const auto lines = fixtures::synthetic_city(20, 1212);
    write_text_file(dir / "city.geojson", lines_geojson(lines));

    PipelineConfig config;
    config.projection = ProjectionMode::Planar;
    const PipelineResult r = run_pipeline(lines, config);
    const UnitMetrics m = compute_unit_metrics(r, UnitKind::Axial, config, false);

    const double max_distance = 2.0;
    std::mt19937_64 rng(77);
    std::vector<double> integ, flow;
    std::vector<Point> where;
    for (std::size_t i = 0; i < r.map.lines.size(); ++i) {
        const auto& v = m.local[i].integration;
        if (!v || !std::isfinite(*v)) continue;
        const AxialLine& l = r.map.lines[i];
        const Point dir = (1.0 / l.length()) * (l.end - l.start);
        const Point gate = 0.5 * (l.start + l.end) + 0.5 * Point{-dir.y, dir.x};
        bool clear = true;
        for (std::size_t j = 0; j < r.map.lines.size() && clear; ++j) {
            if (j != i && segment_distance(gate, r.map.lines[j].segment()) <= max_distance) clear = false;
        }
        if (!clear) continue;
        integ.push_back(*v);
        where.push_back(gate);
    }
    double mean = 0.0, var = 0.0;
    for (double v : integ) mean += v;
    mean /= static_cast<double>(integ.size());
    for (double v : integ) var += (v - mean) * (v - mean);
    std::normal_distribution<double> noise(0.0, 0.8 * 40.0 * std::sqrt(var / static_cast<double>(integ.size())));
    std::ostringstream table;
    table << "x,y,flow\n";
    for (std::size_t i = 0; i < integ.size(); ++i) {
        flow.push_back(std::max(0.0, 200.0 + 40.0 * integ[i] + noise(rng)));
        char row[128];
        std::snprintf(row, sizeof row, "%.17g,%.17g,%.17g\n", where[i].x, where[i].y, flow.back());
        table << row;
    }
    write_text_file(dir / "gates.csv", table.str());
    const double oracle = two_pass_r2(flow, integ);

    const std::string cmd = std::string(AXIALMAP_CLI_PATH) + " correlate --projection planar --max-distance 2 -i " +
                            (dir / "city.geojson").string() + " --gates " + (dir / "gates.csv").string() + " > " +
                            (dir / "out.json").string() + " 2> " + (dir / "report.txt").string();
    const int code = run_command(cmd);
    o.require(code == 0, fmt("correlate exited with %g", code));
    if (code == 0) {
        const auto out = nlohmann::json::parse(read_text_file(dir / "out.json"));
        const double got = out["r_squared"].get<double>();
        o.require(out["gates_used"].get<std::size_t>() == integ.size(), "not every gate was used");
        o.require(std::abs(got - oracle) <= 0.05, fmt("R2 %.4f vs oracle %.4f", got, oracle));
        if (o.pass) o.detail = fmt("%g gates, R2 %.6f vs oracle %.6f", integ.size(), got, oracle);
    }
    fs::remove_all(dir);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"angle derivation", angle_derivation},
        {"grid oracle", grid_oracle},
        {"chop fixpoint", chop_fixpoint},
        {"merge postcondition", merge_postcondition},
        {"integration oracle", integration_oracle},
        {"jenks oracle", jenks_oracle},
        {"lognormal recovery", lognormal_recovery},
        {"head/tail asymmetry", head_tail_asymmetry},
        {"statistics oracles", statistics_oracles},
        {"roundabout behaviour", roundabout_behaviour},
        {"performance budget", performance_budget},
        {"synthetic gate correlation", gate_correlation},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s criterion %zu (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
        failures += !o.pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
