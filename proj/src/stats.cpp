#include "axialmap/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "axialmap/error.hpp"
#include "axialmap/spatial_index.hpp"

namespace axialmap {

HeadTailSplit head_tail_split(std::span<const double> values) {
    if (values.empty()) {
        throw InsufficientDataError("head/tail split needs at least one value");
    }
    HeadTailSplit split;
    double sum = 0.0;
    for (double v : values) sum += v;
    split.mean = sum / static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        (values[i] > split.mean ? split.head : split.tail).push_back(i);
    }
    split.head_fraction = static_cast<double>(split.head.size()) / static_cast<double>(values.size());
    return split;
}

double lognormal_cdf(double value, double mu, double sigma) {
    if (!(value > 0.0)) return 0.0;
    const double z = std::log(value) - mu;
    if (sigma == 0.0) return z < 0.0 ? 0.0 : 1.0;
    return 0.5 * std::erfc(-z / (sigma * std::numbers::sqrt2));
}

LognormalFit fit_lognormal(std::span<const double> values) {
    if (values.size() < 2) {
        throw InsufficientDataError("lognormal fit needs at least two values");
    }
    std::vector<double> logs;
    logs.reserve(values.size());
    for (double v : values) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError("lognormal fit needs strictly positive finite values");
        }
        logs.push_back(std::log(v));
    }
    LognormalFit fit;
    fit.sample_size = logs.size();
    const double n = static_cast<double>(logs.size());
    double sum = 0.0;
    for (double l : logs) sum += l;
    fit.mu = sum / n;
    double ss = 0.0;
    for (double l : logs) ss += (l - fit.mu) * (l - fit.mu);
    fit.sigma = std::sqrt(ss / n);

    // A zero-spread fit is a point mass on the data itself.
    double ks = 0.0;
    if (fit.sigma > 0.0) {
        std::sort(logs.begin(), logs.end());
        for (std::size_t i = 0; i < logs.size(); ++i) {
            const double cdf = 0.5 * std::erfc(-(logs[i] - fit.mu) / (fit.sigma * std::numbers::sqrt2));
            const double below = static_cast<double>(i) / n;
            const double above = static_cast<double>(i + 1) / n;
            ks = std::max({ks, above - cdf, cdf - below});
        }
    }
    fit.ks_statistic = ks;
    return fit;
}

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw DomainError("correlation inputs differ in length");
    }
    if (xs.size() < 3) {
        throw InsufficientDataError("correlation needs at least three pairs");
    }
    // Single-pass co-moment update.
    double mean_x = 0.0, mean_y = 0.0, m2x = 0.0, m2y = 0.0, cxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double dx = xs[i] - mean_x;
        const double dy = ys[i] - mean_y;
        mean_x += dx / n;
        mean_y += dy / n;
        m2x += dx * (xs[i] - mean_x);
        m2y += dy * (ys[i] - mean_y);
        cxy += dx * (ys[i] - mean_y);
    }
    if (!(m2x > 0.0) || !(m2y > 0.0)) {
        throw DomainError("correlation is undefined for a constant input");
    }
    return std::clamp(cxy / std::sqrt(m2x * m2y), -1.0, 1.0);
}

double r_squared(std::span<const double> flows, std::span<const double> metric) {
    const double r = pearson_r(flows, metric);
    return r * r;
}

namespace {

// Two-tailed 5% critical values of Student's t for df = 1..200.
constexpr std::array<double, 200> kTCritical95 = {
    12.706205, 4.302653, 3.182446, 2.776445, 2.570582, 2.446912, 2.364624, 2.306004,
    2.262157, 2.228139, 2.200985, 2.178813, 2.160369, 2.144787, 2.131450, 2.119905,
    2.109816, 2.100922, 2.093024, 2.085963, 2.079614, 2.073873, 2.068658, 2.063899,
    2.059539, 2.055529, 2.051831, 2.048407, 2.045230, 2.042272, 2.039513, 2.036933,
    2.034515, 2.032245, 2.030108, 2.028094, 2.026192, 2.024394, 2.022691, 2.021075,
    2.019541, 2.018082, 2.016692, 2.015368, 2.014103, 2.012896, 2.011741, 2.010635,
    2.009575, 2.008559, 2.007584, 2.006647, 2.005746, 2.004879, 2.004045, 2.003241,
    2.002465, 2.001717, 2.000995, 2.000298, 1.999624, 1.998972, 1.998341, 1.997730,
    1.997138, 1.996564, 1.996008, 1.995469, 1.994945, 1.994437, 1.993943, 1.993464,
    1.992997, 1.992543, 1.992102, 1.991673, 1.991254, 1.990847, 1.990450, 1.990063,
    1.989686, 1.989319, 1.988960, 1.988610, 1.988268, 1.987934, 1.987608, 1.987290,
    1.986979, 1.986675, 1.986377, 1.986086, 1.985802, 1.985523, 1.985251, 1.984984,
    1.984723, 1.984467, 1.984217, 1.983972, 1.983731, 1.983495, 1.983264, 1.983038,
    1.982815, 1.982597, 1.982383, 1.982173, 1.981967, 1.981765, 1.981567, 1.981372,
    1.981180, 1.980992, 1.980808, 1.980626, 1.980448, 1.980272, 1.980100, 1.979930,
    1.979764, 1.979600, 1.979439, 1.979280, 1.979124, 1.978971, 1.978820, 1.978671,
    1.978524, 1.978380, 1.978239, 1.978099, 1.977961, 1.977826, 1.977692, 1.977561,
    1.977431, 1.977304, 1.977178, 1.977054, 1.976931, 1.976811, 1.976692, 1.976575,
    1.976460, 1.976346, 1.976233, 1.976122, 1.976013, 1.975905, 1.975799, 1.975694,
    1.975590, 1.975488, 1.975387, 1.975288, 1.975189, 1.975092, 1.974996, 1.974902,
    1.974808, 1.974716, 1.974625, 1.974535, 1.974446, 1.974358, 1.974271, 1.974185,
    1.974100, 1.974017, 1.973934, 1.973852, 1.973771, 1.973691, 1.973612, 1.973534,
    1.973457, 1.973381, 1.973305, 1.973231, 1.973157, 1.973084, 1.973012, 1.972941,
    1.972870, 1.972800, 1.972731, 1.972663, 1.972595, 1.972528, 1.972462, 1.972396,
    1.972332, 1.972268, 1.972204, 1.972141, 1.972079, 1.972017, 1.971957, 1.971896,
};

constexpr double kNormalCritical95 = 1.959964;

}  // namespace

double t_critical_95(std::size_t df) {
    if (df == 0) {
        throw DomainError("t test needs at least one degree of freedom");
    }
    return df <= kTCritical95.size() ? kTCritical95[df - 1] : kNormalCritical95;
}

TTestResult correlation_t_test(double r, std::size_t n) {
    if (n < 3) {
        throw InsufficientDataError("t test needs at least three pairs");
    }
    if (!(std::abs(r) <= 1.0)) {
        throw DomainError("correlation coefficient outside [-1, 1]");
    }
    TTestResult out;
    out.critical = t_critical_95(n - 2);
    if (std::abs(r) == 1.0) {
        out.t = std::copysign(std::numeric_limits<double>::infinity(), r);
        out.significant = true;
        return out;
    }
    out.t = r * std::sqrt(static_cast<double>(n - 2) / (1.0 - r * r));
    out.significant = std::abs(out.t) > out.critical;
    return out;
}

std::vector<UnitShape> unit_shapes(std::span<const AxialLine> lines) {
    std::vector<UnitShape> out;
    out.reserve(lines.size());
    for (const AxialLine& line : lines) out.push_back({line.id, Polyline{{line.start, line.end}}});
    return out;
}

std::vector<UnitShape> unit_shapes(std::span<const NaturalStreet> streets) {
    std::vector<UnitShape> out;
    out.reserve(streets.size());
    for (const NaturalStreet& s : streets) out.push_back({s.id, s.geometry});
    return out;
}

std::vector<GateObservation> assign_gates(std::span<const GateObservation> gates,
                                          std::span<const UnitShape> units, double max_distance) {
    std::vector<GateObservation> out(gates.begin(), gates.end());
    std::vector<Segment> segments;
    std::vector<std::size_t> owner;
    for (std::size_t u = 0; u < units.size(); ++u) {
        const auto& pts = units[u].geometry.points;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            segments.push_back({pts[i - 1], pts[i]});
            owner.push_back(u);
        }
    }
    for (auto& gate : out) {
        gate.assigned_unit.reset();
        gate.assigned_distance.reset();
    }
    if (segments.empty()) return out;
    SegmentGrid grid(SegmentGrid::suggest_cell_size(segments, std::max(max_distance, 1.0)), max_distance);
    for (std::size_t s = 0; s < segments.size(); ++s) grid.insert(s, segments[s]);

    for (auto& gate : out) {
        const Point p = gate.location;
        std::optional<std::size_t> best_unit;
        double best = max_distance;
        for (std::size_t s : grid.query(Box{p.x, p.y, p.x, p.y})) {
            const double d = segment_distance(p, segments[s]);
            const std::size_t id = units[owner[s]].id;
            if (d > max_distance) continue;
            if (!best_unit || d < best || (d == best && id < *best_unit)) {
                best = d;
                best_unit = id;
            }
        }
        if (best_unit) {
            gate.assigned_unit = best_unit;
            gate.assigned_distance = best;
        }
    }
    return out;
}

}  // namespace axialmap
