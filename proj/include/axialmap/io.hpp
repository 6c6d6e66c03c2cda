#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "axialmap/geometry.hpp"
#include "axialmap/natural_streets.hpp"
#include "axialmap/stats.hpp"

namespace axialmap {

enum class ProjectionMode {
    Auto,        // project when every coordinate fits lon/lat bounds and no planar CRS is declared
    Planar,      // coordinates are already meters
    Geographic,  // always project
};

std::string_view to_string(ProjectionMode mode);
std::optional<ProjectionMode> parse_projection_mode(std::string_view text);

// Local equirectangular projection about an origin, in meters.
struct Projection {
    double origin_lon = 0.0;
    double origin_lat = 0.0;

    static constexpr double kEarthRadius = 6378137.0;

    Point forward(double lon, double lat) const;
};

// Every tunable of the pipeline.
struct PipelineConfig {
    JoinPrinciple join_principle = JoinPrinciple::EveryBestFit;
    double join_threshold_degrees = 45.0;
    double head_ratio_fraction = 0.10;
    double roundabout_max_perimeter_m = 120.0;
    bool collapse_roundabouts = true;
    double snap_tolerance_m = kDefaultSnapTolerance;
    bool split_at_crossings = false;
    bool merge_same_street = false;
    unsigned integration_radius = 3;
    std::size_t class_count = 7;
    ProjectionMode projection = ProjectionMode::Auto;

    // Throws DomainError when a value is out of range.
    void validate() const;

    // Set one field from its textual key (snake_case or kebab-case).
    // Throws DomainError for an unknown key or unparsable value.
    void set(std::string_view key, std::string_view value);
};

// Apply a key=value text file ('#' starts a comment) to `config`.
void load_config_file(const std::filesystem::path& path, PipelineConfig& config);
void apply_config_text(std::string_view text, PipelineConfig& config);

struct IngestResult {
    std::vector<Polyline> lines;
    std::size_t skipped_features = 0;
    std::optional<Projection> projection;
};

// Read a GeoJSON FeatureCollection (or single Feature) of LineString and
// MultiLineString features; every line part becomes one polyline. Consecutive
// repeated points are dropped. Throws InputError with the feature index.
IngestResult parse_line_features(std::string_view json_text, ProjectionMode mode);
IngestResult ingest_lines(const std::filesystem::path& path, ProjectionMode mode);

// One exported unit with its metrics.
struct ExportRecord {
    std::size_t id = 0;
    Polyline geometry;
    double length = 0.0;
    std::size_t connectivity = 0;
    std::optional<double> local_integration;   // may be +inf (see kInfiniteIntegration)
    std::optional<double> global_integration;
    std::optional<std::size_t> class_index;
    std::vector<std::size_t> source_street_ids;
};

// Deterministic GeoJSON text: features ascending by id, numbers rounded to
// nine significant digits, absent metrics as null, infinite integration as
// the string "Infinity". Coordinates are marked as planar meters.
std::string render_map(std::span<const ExportRecord> records);
void export_map(const std::filesystem::path& path, std::span<const ExportRecord> records);

// Inverse of render_map.
std::vector<ExportRecord> parse_exported_map(std::string_view json_text);

// Round to nine significant digits.
double round_significant(double value);

// Delimited gate table with a header naming x, y and flow columns
// (comma, semicolon or tab separated).
std::vector<GateObservation> parse_gate_table(std::string_view text);
std::vector<GateObservation> read_gate_table(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace axialmap
