#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "axialmap/axial.hpp"
#include "axialmap/io.hpp"
#include "axialmap/natural_streets.hpp"
#include "axialmap/stats.hpp"
#include "axialmap/syntax_graph.hpp"
#include "axialmap/topology.hpp"

namespace axialmap {

enum class Stage { Topology, Streets, Axial };

enum class UnitKind { Axial, Street };

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct PipelineReport {
    PlanarizeStats planarize;
    RoundaboutStats roundabouts;
    std::size_t node_count = 0;
    std::size_t arc_count = 0;
    std::size_t street_count = 0;
    std::size_t axial_line_count = 0;
    std::optional<ChopThresholds> thresholds;
    std::vector<StageTiming> stages;

    void add_stage(std::string name, double seconds) { stages.push_back({std::move(name), seconds}); }
    // One "key: value" line per item.
    void print(std::ostream& out) const;
};

struct PipelineResult {
    StreetNetwork network;
    std::vector<NaturalStreet> streets;
    AxialMap map;
    PipelineReport report;
};

// Planarize, collapse roundabouts, then optionally join streets and build
// the axial map, timing each stage.
PipelineResult run_pipeline(std::span<const Polyline> lines, const PipelineConfig& config,
                            Stage last_stage = Stage::Axial);

struct UnitMetrics {
    UnitKind kind = UnitKind::Axial;
    ConnectivityGraph graph;
    std::vector<NodeMetrics> local;
    std::vector<NodeMetrics> global;  // empty when not computed
    JenksResult breaks;               // over finite local integration
    std::vector<std::optional<std::size_t>> class_index;
};

// Connectivity graph, local (and optionally global) integration and class
// indices for the chosen units of a finished pipeline run.
UnitMetrics compute_unit_metrics(const PipelineResult& result, UnitKind kind, const PipelineConfig& config,
                                 bool with_global = true);

std::vector<ExportRecord> export_records(const PipelineResult& result, const UnitMetrics& metrics);

struct CorrelationReport {
    std::size_t gates_total = 0;
    std::size_t gates_assigned = 0;
    std::size_t gates_used = 0;  // assigned to a unit with finite integration
    double r = 0.0;
    double r_squared = 0.0;
    TTestResult t_test;
};

// R^2 and t-test between gate flows and the local integration of the unit
// each gate is assigned to. Throws DomainError when fewer than three gates
// are usable or either side is constant.
CorrelationReport correlate_gates(std::span<const GateObservation> gates, std::span<const UnitShape> units,
                                  std::span<const NodeMetrics> local, double max_distance);

}  // namespace axialmap
