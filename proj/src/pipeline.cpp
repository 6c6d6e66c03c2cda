#include "axialmap/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>

#include "axialmap/error.hpp"

namespace axialmap {

namespace {

class StageClock {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

void PipelineReport::print(std::ostream& out) const {
    const auto flags = out.flags();
    out << "input lines: " << planarize.input_lines << "\n"
        << "skipped degenerate lines: " << planarize.skipped_degenerate << "\n"
        << "duplicate arcs dropped: " << planarize.duplicate_arcs << "\n"
        << "roundabouts collapsed: " << roundabouts.rings_found << "\n"
        << "nodes: " << node_count << "\n"
        << "arcs: " << arc_count << "\n"
        << "natural streets: " << street_count << "\n"
        << "axial lines: " << axial_line_count << "\n";
    if (thresholds) {
        out << std::setprecision(6) << "mean(x) m: " << thresholds->mean_x << "\n"
            << "mean(x/d): " << thresholds->mean_ratio << "\n"
            << "min merge angle deg: " << thresholds->min_merge_angle << "\n";
    } else {
        out << "mean(x) m: n/a\nmean(x/d): n/a\nmin merge angle deg: n/a\n";
    }
    for (const StageTiming& s : stages) {
        out << std::fixed << std::setprecision(3) << "time " << s.stage << " s: " << s.seconds << "\n";
        out.flags(flags);
    }
    out.flags(flags);
}

PipelineResult run_pipeline(std::span<const Polyline> lines, const PipelineConfig& config, Stage last_stage) {
    config.validate();
    PipelineResult result;
    StageClock clock;

    PlanarizeConfig pc;
    pc.snap_tolerance = config.snap_tolerance_m;
    pc.split_at_crossings = config.split_at_crossings;
    result.network = planarize(lines, pc, &result.report.planarize);
    if (config.collapse_roundabouts) {
        RoundaboutConfig rc;
        rc.max_perimeter = config.roundabout_max_perimeter_m;
        rc.snap_tolerance = config.snap_tolerance_m;
        result.network = collapse_roundabouts(result.network, rc, &result.report.roundabouts);
    }
    result.report.node_count = result.network.nodes().size();
    result.report.arc_count = result.network.arcs().size();
    result.report.add_stage("topology", clock.lap());
    if (last_stage == Stage::Topology) return result;

    AxialConfig ac;
    ac.join.principle = config.join_principle;
    ac.join.threshold_degrees = config.join_threshold_degrees;
    ac.join.snap_tolerance = config.snap_tolerance_m;
    ac.head_ratio_fraction = config.head_ratio_fraction;
    ac.merge.tolerance = config.snap_tolerance_m;
    ac.merge.allow_same_street = config.merge_same_street;

    result.streets = generate_natural_streets(result.network, ac.join);
    result.report.street_count = result.streets.size();
    result.report.add_stage("streets", clock.lap());
    if (last_stage == Stage::Streets) {
        try {
            result.report.thresholds = compute_thresholds(result.streets, ac.head_ratio_fraction, ac.join.snap_tolerance);
        } catch (const ThresholdsUnavailable&) {
        }
        return result;
    }

    result.map = build_axial_map(result.streets, ac);
    result.map.provenance = network_fingerprint(result.network);
    result.report.thresholds = result.map.thresholds;
    result.report.axial_line_count = result.map.lines.size();
    result.report.add_stage("axial", clock.lap());
    return result;
}

UnitMetrics compute_unit_metrics(const PipelineResult& result, UnitKind kind, const PipelineConfig& config,
                                 bool with_global) {
    UnitMetrics m;
    m.kind = kind;
    m.graph = kind == UnitKind::Axial ? build_connectivity_graph(result.map.lines, config.snap_tolerance_m)
                                      : build_connectivity_graph(result.streets, result.network);
    m.local = integration_all(m.graph, config.integration_radius);
    if (with_global) m.global = integration_all(m.graph, std::nullopt);

    std::vector<double> values;
    for (const NodeMetrics& nm : m.local) {
        if (nm.integration) values.push_back(*nm.integration);
    }
    m.class_index.assign(m.local.size(), std::nullopt);
    const bool any_finite = std::any_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
    if (any_finite) {
        m.breaks = jenks_breaks(values, config.class_count);
    }
    for (std::size_t i = 0; i < m.local.size(); ++i) {
        const auto& integ = m.local[i].integration;
        if (!integ) continue;
        if (!any_finite) {
            m.class_index[i] = 0;
        } else if (std::isinf(*integ)) {
            m.class_index[i] = m.breaks.class_count - 1;
        } else {
            m.class_index[i] = classify(*integ, m.breaks.breaks);
        }
    }
    return m;
}

std::vector<ExportRecord> export_records(const PipelineResult& result, const UnitMetrics& metrics) {
    std::vector<ExportRecord> out;
    const std::size_t n = metrics.graph.size();
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ExportRecord r;
        if (metrics.kind == UnitKind::Axial) {
            const AxialLine& line = result.map.lines.at(i);
            r.id = line.id;
            r.geometry = Polyline{{line.start, line.end}};
            r.length = line.length();
            r.source_street_ids = line.source_street_ids;
        } else {
            const NaturalStreet& s = result.streets.at(i);
            r.id = s.id;
            r.geometry = s.geometry;
            r.length = polyline_length(s.geometry.view());
            r.source_street_ids = {s.id};
        }
        r.connectivity = metrics.graph.degree(i);
        r.local_integration = metrics.local.at(i).integration;
        if (!metrics.global.empty()) r.global_integration = metrics.global.at(i).integration;
        r.class_index = metrics.class_index.at(i);
        out.push_back(std::move(r));
    }
    return out;
}

CorrelationReport correlate_gates(std::span<const GateObservation> gates, std::span<const UnitShape> units,
                                  std::span<const NodeMetrics> local, double max_distance) {
    if (units.size() != local.size()) {
        throw InvariantError("unit metrics do not line up with the units");
    }
    std::map<std::size_t, std::size_t> index_of;
    for (std::size_t i = 0; i < units.size(); ++i) index_of[units[i].id] = i;

    CorrelationReport report;
    report.gates_total = gates.size();
    std::vector<double> flows, metric;
    for (const GateObservation& g : assign_gates(gates, units, max_distance)) {
        if (!g.assigned_unit) continue;
        ++report.gates_assigned;
        const auto& integ = local[index_of.at(*g.assigned_unit)].integration;
        if (!integ || !std::isfinite(*integ)) continue;
        flows.push_back(g.flow);
        metric.push_back(*integ);
    }
    report.gates_used = flows.size();
    report.r = pearson_r(flows, metric);
    report.r_squared = report.r * report.r;
    report.t_test = correlation_t_test(report.r, flows.size());
    return report;
}

}  // namespace axialmap
