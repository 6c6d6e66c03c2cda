#include "axialmap/syntax_graph.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "axialmap/error.hpp"
#include "axialmap/spatial_index.hpp"

namespace axialmap {

ConnectivityGraph::ConnectivityGraph(std::vector<std::size_t> unit_ids)
    : unit_ids_(std::move(unit_ids)), adjacency_(unit_ids_.size()) {}

bool ConnectivityGraph::add_edge(std::size_t a, std::size_t b) {
    if (a >= size() || b >= size()) {
        throw InvariantError("edge references a missing graph node");
    }
    if (a == b) return false;
    auto& list = adjacency_[a];
    auto it = std::lower_bound(list.begin(), list.end(), b);
    if (it != list.end() && *it == b) return false;
    list.insert(it, b);
    auto& other = adjacency_[b];
    other.insert(std::lower_bound(other.begin(), other.end(), a), a);
    ++edge_count_;
    return true;
}

std::vector<std::pair<std::size_t, std::size_t>> ConnectivityGraph::edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(edge_count_);
    for (std::size_t a = 0; a < size(); ++a) {
        for (std::size_t b : adjacency_[a]) {
            if (a < b) out.emplace_back(a, b);
        }
    }
    return out;
}

ConnectivityGraph build_connectivity_graph(std::span<const AxialLine> lines, double tolerance) {
    std::vector<std::size_t> ids;
    std::vector<Segment> segments;
    for (const AxialLine& line : lines) {
        ids.push_back(line.id);
        segments.push_back(line.segment());
    }
    ConnectivityGraph g(std::move(ids));
    if (segments.empty()) return g;
    SegmentGrid grid(SegmentGrid::suggest_cell_size(segments, tolerance * 10.0), tolerance);
    for (std::size_t i = 0; i < segments.size(); ++i) grid.insert(i, segments[i]);
    for (std::size_t i = 0; i < segments.size(); ++i) {
        for (std::size_t j : grid.query(segments[i])) {
            if (j > i && segments_intersect(segments[i], segments[j], tolerance)) g.add_edge(i, j);
        }
    }
    return g;
}

ConnectivityGraph build_connectivity_graph(std::span<const NaturalStreet> streets, const StreetNetwork& net) {
    std::vector<std::size_t> ids;
    std::vector<std::vector<std::size_t>> at_node(net.nodes().size());
    for (std::size_t i = 0; i < streets.size(); ++i) {
        ids.push_back(streets[i].id);
        for (NodeId n : streets[i].nodes) {
            at_node.at(n).push_back(i);
        }
    }
    ConnectivityGraph g(std::move(ids));
    for (const auto& list : at_node) {
        for (std::size_t a = 0; a < list.size(); ++a) {
            for (std::size_t b = a + 1; b < list.size(); ++b) g.add_edge(list[a], list[b]);
        }
    }
    return g;
}

double diamond_value(std::size_t k) {
    if (k < 3) {
        throw DomainError("diamond value needs at least three nodes");
    }
    const double n = static_cast<double>(k);
    return 2.0 * (n * (std::log2((n + 2.0) / 3.0) - 1.0) + 1.0) / ((n - 1.0) * (n - 2.0));
}

namespace {

// Breadth-first depths from `source` up to `radius`; reuses caller buffers.
NodeMetrics depth_metrics(const ConnectivityGraph& g, std::size_t source, std::optional<unsigned> radius,
                          std::vector<unsigned>& depth, std::vector<std::size_t>& frontier) {
    constexpr unsigned kUnseen = static_cast<unsigned>(-1);
    NodeMetrics m;
    m.radius = radius;
    m.connectivity = g.degree(source);

    frontier.clear();
    frontier.push_back(source);
    depth[source] = 0;
    double total = 0.0;
    for (std::size_t head = 0; head < frontier.size(); ++head) {
        const std::size_t v = frontier[head];
        const unsigned next = depth[v] + 1;
        if (radius && next > *radius) continue;
        for (std::size_t w : g.neighbours(v)) {
            if (depth[w] == kUnseen) {
                depth[w] = next;
                total += next;
                frontier.push_back(w);
            }
        }
    }
    const std::size_t k = frontier.size();
    for (std::size_t v : frontier) depth[v] = kUnseen;

    m.node_count_in_radius = k;
    if (k < 2) return m;
    m.total_depth = total;
    m.mean_depth = total / static_cast<double>(k - 1);
    if (k < 3) return m;
    m.ra = 2.0 * (*m.mean_depth - 1.0) / static_cast<double>(k - 2);
    m.rra = *m.ra / diamond_value(k);
    m.integration = *m.rra > 0.0 ? 1.0 / *m.rra : kInfiniteIntegration;
    return m;
}

}  // namespace

NodeMetrics integration(const ConnectivityGraph& g, std::size_t node, std::optional<unsigned> radius) {
    if (node >= g.size()) {
        throw DomainError("node is not in the graph");
    }
    std::vector<unsigned> depth(g.size(), static_cast<unsigned>(-1));
    std::vector<std::size_t> frontier;
    return depth_metrics(g, node, radius, depth, frontier);
}

std::vector<NodeMetrics> integration_all(const ConnectivityGraph& g, std::optional<unsigned> radius,
                                         unsigned threads) {
    std::vector<NodeMetrics> out(g.size());
    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, g.size() / 64)));
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        std::vector<unsigned> depth(g.size(), static_cast<unsigned>(-1));
        std::vector<std::size_t> frontier;
        for (std::size_t v; (v = next.fetch_add(1)) < g.size();) {
            out[v] = depth_metrics(g, v, radius, depth, frontier);
        }
    };
    if (threads <= 1) {
        work();
        return out;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    return out;
}

// ---------------------------------------------------------------------------
// Natural breaks

namespace {

// Weighted class costs over distinct sorted values, via prefix sums of
// mean-shifted values.
class ClassCost {
public:
    ClassCost(const std::vector<double>& values, const std::vector<double>& weights) {
        double total_w = 0.0, total = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            total_w += weights[i];
            total += weights[i] * values[i];
        }
        const double shift = total / total_w;
        w_.assign(values.size() + 1, 0.0);
        s1_.assign(values.size() + 1, 0.0);
        s2_.assign(values.size() + 1, 0.0);
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double v = values[i] - shift;
            w_[i + 1] = w_[i] + weights[i];
            s1_[i + 1] = s1_[i] + weights[i] * v;
            s2_[i + 1] = s2_[i] + weights[i] * v * v;
        }
    }

    // Inclusive range [i, j].
    double operator()(std::size_t i, std::size_t j) const {
        const double w = w_[j + 1] - w_[i];
        const double s1 = s1_[j + 1] - s1_[i];
        const double s2 = s2_[j + 1] - s2_[i];
        return std::max(0.0, s2 - s1 * s1 / w);
    }

private:
    std::vector<double> w_, s1_, s2_;
};

struct Layer {
    const ClassCost& cost;
    const std::vector<double>& prev;
    std::vector<double>& cur;
    std::vector<std::size_t>& opt;
    std::size_t min_start;

    // Fill cur[j] for j in [lo, hi] knowing the optimal start lies in
    // [opt_lo, opt_hi] (monotone in j).
    void solve(std::size_t lo, std::size_t hi, std::size_t opt_lo, std::size_t opt_hi) {
        if (lo > hi) return;
        const std::size_t mid = lo + (hi - lo) / 2;
        std::size_t best_i = std::max(opt_lo, min_start);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = best_i; i <= std::min(mid, opt_hi); ++i) {
            const double value = prev[i - 1] + cost(i, mid);
            if (value < best) {
                best = value;
                best_i = i;
            }
        }
        cur[mid] = best;
        opt[mid] = best_i;
        if (mid > lo) solve(lo, mid - 1, opt_lo, best_i);
        solve(mid + 1, hi, best_i, opt_hi);
    }
};

}  // namespace

JenksResult jenks_breaks(std::span<const double> values, std::size_t class_count) {
    if (class_count == 0) {
        throw DomainError("class count must be at least 1");
    }
    std::vector<double> sorted;
    sorted.reserve(values.size());
    for (double v : values) {
        if (std::isfinite(v)) sorted.push_back(v);
    }
    if (sorted.empty()) {
        throw InsufficientDataError("natural breaks need at least one finite value");
    }
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> distinct;
    std::vector<double> weight;
    for (double v : sorted) {
        if (distinct.empty() || v != distinct.back()) {
            distinct.push_back(v);
            weight.push_back(1.0);
        } else {
            weight.back() += 1.0;
        }
    }

    JenksResult result;
    const std::size_t m = distinct.size();
    result.class_count = std::min(class_count, m);
    result.reduced = class_count > m;
    const std::size_t k = result.class_count;
    if (k == 1) return result;
    if (k == m) {
        result.breaks.assign(distinct.begin(), distinct.end() - 1);
        return result;
    }

    const ClassCost cost(distinct, weight);
    std::vector<double> prev(m), cur(m, std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < m; ++j) prev[j] = cost(0, j);
    // opt[c][j]: first distinct-value index of the last class in the best
    // c+1-class partition of [0, j].
    std::vector<std::vector<std::size_t>> opt(k, std::vector<std::size_t>(m, 0));
    for (std::size_t c = 1; c < k; ++c) {
        std::fill(cur.begin(), cur.end(), std::numeric_limits<double>::infinity());
        Layer layer{cost, prev, cur, opt[c], c};
        layer.solve(c, m - 1, c, m - 1);
        std::swap(prev, cur);
    }

    std::vector<double> breaks;
    std::size_t j = m - 1;
    for (std::size_t c = k - 1; c >= 1; --c) {
        const std::size_t start = opt[c][j];
        breaks.push_back(distinct[start - 1]);
        j = start - 1;
    }
    std::reverse(breaks.begin(), breaks.end());
    result.breaks = std::move(breaks);
    return result;
}

std::size_t classify(double value, std::span<const double> breaks) {
    return static_cast<std::size_t>(std::lower_bound(breaks.begin(), breaks.end(), value) - breaks.begin());
}

double within_class_sse(std::span<const double> values, std::span<const double> breaks) {
    std::map<std::size_t, std::vector<double>> classes;
    for (double v : values) {
        if (std::isfinite(v)) classes[classify(v, breaks)].push_back(v);
    }
    double total = 0.0;
    for (const auto& [cls, members] : classes) {
        double mean = 0.0;
        for (double v : members) mean += v;
        mean /= static_cast<double>(members.size());
        for (double v : members) total += (v - mean) * (v - mean);
    }
    return total;
}

}  // namespace axialmap
