#include "axialmap/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "axialmap/error.hpp"

namespace axialmap {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kPlanarCrsName = "axialmap:local-planar-meters";

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

double parse_double(std::string_view key, std::string_view text) {
    const std::string s = trim(text);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
        throw DomainError("bad number for " + std::string(key) + ": '" + s + "'");
    }
    return v;
}

unsigned long parse_unsigned(std::string_view key, std::string_view text) {
    const std::string s = trim(text);
    char* end = nullptr;
    const unsigned long v = std::strtoul(s.c_str(), &end, 10);
    if (s.empty() || s[0] == '-' || end != s.c_str() + s.size()) {
        throw DomainError("bad integer for " + std::string(key) + ": '" + s + "'");
    }
    return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
    std::string s = trim(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw DomainError("bad boolean for " + std::string(key) + ": '" + s + "'");
}

}  // namespace

std::string_view to_string(ProjectionMode mode) {
    switch (mode) {
        case ProjectionMode::Auto: return "auto";
        case ProjectionMode::Planar: return "planar";
        case ProjectionMode::Geographic: return "geographic";
    }
    return "unknown";
}

std::optional<ProjectionMode> parse_projection_mode(std::string_view text) {
    for (ProjectionMode m : {ProjectionMode::Auto, ProjectionMode::Planar, ProjectionMode::Geographic}) {
        if (text == to_string(m)) return m;
    }
    return std::nullopt;
}

Point Projection::forward(double lon, double lat) const {
    constexpr double rad = std::numbers::pi / 180.0;
    return {kEarthRadius * (lon - origin_lon) * rad * std::cos(origin_lat * rad),
            kEarthRadius * (lat - origin_lat) * rad};
}

void PipelineConfig::validate() const {
    if (!(join_threshold_degrees > 0.0 && join_threshold_degrees < 180.0)) {
        throw DomainError("join threshold must lie in (0, 180) degrees");
    }
    if (!(head_ratio_fraction > 0.0)) throw DomainError("head ratio fraction must be positive");
    if (!(roundabout_max_perimeter_m > 0.0)) throw DomainError("roundabout perimeter must be positive");
    if (!(snap_tolerance_m > 0.0)) throw DomainError("snap tolerance must be positive");
    if (integration_radius == 0) throw DomainError("integration radius must be positive");
    if (class_count == 0) throw DomainError("class count must be positive");
}

void PipelineConfig::set(std::string_view raw_key, std::string_view value) {
    std::string key(raw_key);
    std::replace(key.begin(), key.end(), '-', '_');
    if (key == "join_principle" || key == "principle") {
        auto p = parse_join_principle(trim(value));
        if (!p) throw DomainError("unknown join principle '" + trim(value) + "'");
        join_principle = *p;
    } else if (key == "join_threshold_degrees" || key == "join_threshold") {
        join_threshold_degrees = parse_double(key, value);
    } else if (key == "head_ratio_fraction") {
        head_ratio_fraction = parse_double(key, value);
    } else if (key == "roundabout_max_perimeter_m" || key == "roundabout_max_perimeter") {
        roundabout_max_perimeter_m = parse_double(key, value);
    } else if (key == "collapse_roundabouts") {
        collapse_roundabouts = parse_bool(key, value);
    } else if (key == "snap_tolerance_m" || key == "snap_tolerance") {
        snap_tolerance_m = parse_double(key, value);
    } else if (key == "split_at_crossings") {
        split_at_crossings = parse_bool(key, value);
    } else if (key == "merge_same_street") {
        merge_same_street = parse_bool(key, value);
    } else if (key == "integration_radius" || key == "radius") {
        integration_radius = static_cast<unsigned>(parse_unsigned(key, value));
    } else if (key == "class_count" || key == "classes") {
        class_count = parse_unsigned(key, value);
    } else if (key == "projection") {
        auto m = parse_projection_mode(trim(value));
        if (!m) throw DomainError("unknown projection mode '" + trim(value) + "'");
        projection = *m;
    } else {
        throw DomainError("unknown configuration key '" + std::string(raw_key) + "'");
    }
}

void apply_config_text(std::string_view text, PipelineConfig& config) {
    std::istringstream in{std::string(text)};
    std::string line;
    for (std::size_t number = 1; std::getline(in, line); ++number) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string content = trim(line);
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            throw DomainError("config line " + std::to_string(number) + " is not key=value");
        }
        config.set(trim(std::string_view(content).substr(0, eq)), std::string_view(content).substr(eq + 1));
    }
}

void load_config_file(const std::filesystem::path& path, PipelineConfig& config) {
    apply_config_text(read_text_file(path), config);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("cannot write " + path.string());
}

// ---------------------------------------------------------------------------
// Line features

namespace {

using RawLine = std::vector<std::pair<double, double>>;

RawLine read_positions(const json& coords, std::size_t feature) {
    if (!coords.is_array()) throw InputError("line coordinates are not an array", feature);
    RawLine line;
    for (const json& pos : coords) {
        if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
            throw InputError("malformed position", feature);
        }
        const double x = pos[0].get<double>();
        const double y = pos[1].get<double>();
        if (!std::isfinite(x) || !std::isfinite(y)) throw InputError("non-finite coordinate", feature);
        line.emplace_back(x, y);
    }
    if (line.size() < 2) throw InputError("line has fewer than two positions", feature);
    return line;
}

bool declares_planar_crs(const json& doc) {
    if (!doc.is_object() || !doc.contains("crs")) return false;
    const json& crs = doc["crs"];
    if (!crs.is_object() || !crs.contains("properties") || !crs["properties"].contains("name")) return false;
    const json& name = crs["properties"]["name"];
    if (!name.is_string()) return false;
    const std::string n = name.get<std::string>();
    return n.find("4326") == std::string::npos && n.find("CRS84") == std::string::npos;
}

}  // namespace

IngestResult parse_line_features(std::string_view json_text, ProjectionMode mode) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("invalid JSON: ") + e.what());
    }
    std::vector<const json*> features;
    if (doc.is_object() && doc.value("type", "") == "FeatureCollection") {
        if (!doc.contains("features") || !doc["features"].is_array()) {
            throw InputError("FeatureCollection without a features array");
        }
        for (const json& f : doc["features"]) features.push_back(&f);
    } else if (doc.is_object() && doc.value("type", "") == "Feature") {
        features.push_back(&doc);
    } else {
        throw InputError("expected a GeoJSON FeatureCollection or Feature");
    }

    IngestResult result;
    std::vector<RawLine> raw;
    for (std::size_t i = 0; i < features.size(); ++i) {
        const json& f = *features[i];
        if (!f.is_object()) throw InputError("feature is not an object", i);
        if (!f.contains("geometry") || f["geometry"].is_null()) {
            ++result.skipped_features;
            continue;
        }
        const json& g = f["geometry"];
        if (!g.is_object() || !g.contains("type") || !g["type"].is_string()) {
            throw InputError("geometry without a type", i);
        }
        const std::string type = g["type"].get<std::string>();
        if (type == "LineString") {
            if (!g.contains("coordinates")) throw InputError("geometry without coordinates", i);
            raw.push_back(read_positions(g["coordinates"], i));
        } else if (type == "MultiLineString") {
            if (!g.contains("coordinates") || !g["coordinates"].is_array()) {
                throw InputError("geometry without coordinates", i);
            }
            for (const json& part : g["coordinates"]) raw.push_back(read_positions(part, i));
        } else {
            ++result.skipped_features;
        }
    }

    bool geographic = mode == ProjectionMode::Geographic;
    if (mode == ProjectionMode::Auto && !raw.empty() && !declares_planar_crs(doc)) {
        geographic = std::all_of(raw.begin(), raw.end(), [](const RawLine& line) {
            return std::all_of(line.begin(), line.end(), [](const auto& p) {
                return std::abs(p.first) <= 180.0 && std::abs(p.second) <= 90.0;
            });
        });
    }
    if (geographic && !raw.empty()) {
        double sum_lon = 0.0, sum_lat = 0.0;
        std::size_t count = 0;
        for (const RawLine& line : raw) {
            for (const auto& [lon, lat] : line) {
                sum_lon += lon;
                sum_lat += lat;
                ++count;
            }
        }
        result.projection = Projection{sum_lon / static_cast<double>(count), sum_lat / static_cast<double>(count)};
    }

    for (const RawLine& line : raw) {
        Polyline poly;
        for (const auto& [x, y] : line) {
            const Point p = result.projection ? result.projection->forward(x, y) : Point{x, y};
            if (poly.points.empty() || !(poly.points.back() == p)) poly.points.push_back(p);
        }
        result.lines.push_back(std::move(poly));
    }
    return result;
}

IngestResult ingest_lines(const std::filesystem::path& path, ProjectionMode mode) {
    return parse_line_features(read_text_file(path), mode);
}

// ---------------------------------------------------------------------------
// Export

double round_significant(double value) {
    if (!std::isfinite(value) || value == 0.0) return value;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return std::strtod(buf, nullptr);
}

namespace {

ordered_json metric_value(const std::optional<double>& v) {
    if (!v) return nullptr;
    if (std::isinf(*v)) return *v > 0 ? "Infinity" : "-Infinity";
    return round_significant(*v);
}

std::optional<double> read_metric(const json& v, std::size_t feature) {
    if (v.is_null()) return std::nullopt;
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "Infinity") return std::numeric_limits<double>::infinity();
        if (s == "-Infinity") return -std::numeric_limits<double>::infinity();
        throw InputError("unexpected metric string '" + s + "'", feature);
    }
    if (!v.is_number()) throw InputError("metric is not a number", feature);
    return v.get<double>();
}

}  // namespace

std::string render_map(std::span<const ExportRecord> records) {
    std::vector<const ExportRecord*> ordered;
    for (const ExportRecord& r : records) ordered.push_back(&r);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const ExportRecord* a, const ExportRecord* b) { return a->id < b->id; });

    ordered_json doc;
    doc["type"] = "FeatureCollection";
    doc["crs"] = {{"type", "name"}, {"properties", {{"name", kPlanarCrsName}}}};
    ordered_json features = ordered_json::array();
    for (const ExportRecord* r : ordered) {
        ordered_json coords = ordered_json::array();
        for (const Point& p : r->geometry.points) {
            coords.push_back({round_significant(p.x), round_significant(p.y)});
        }
        ordered_json props;
        props["id"] = r->id;
        props["length"] = round_significant(r->length);
        props["connectivity"] = r->connectivity;
        props["local_integration"] = metric_value(r->local_integration);
        props["global_integration"] = metric_value(r->global_integration);
        props["class_index"] = r->class_index ? ordered_json(*r->class_index) : ordered_json(nullptr);
        props["source_street_ids"] = r->source_street_ids;
        ordered_json feature;
        feature["type"] = "Feature";
        feature["geometry"] = {{"type", "LineString"}, {"coordinates", std::move(coords)}};
        feature["properties"] = std::move(props);
        features.push_back(std::move(feature));
    }
    doc["features"] = std::move(features);
    return doc.dump(1) + "\n";
}

void export_map(const std::filesystem::path& path, std::span<const ExportRecord> records) {
    write_text_file(path, render_map(records));
}

std::vector<ExportRecord> parse_exported_map(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("features") || !doc["features"].is_array()) {
        throw InputError("expected an exported FeatureCollection");
    }
    std::vector<ExportRecord> out;
    std::size_t index = 0;
    for (const json& f : doc["features"]) {
        try {
            const json& props = f.at("properties");
            ExportRecord r;
            r.id = props.at("id").get<std::size_t>();
            r.length = props.at("length").get<double>();
            r.connectivity = props.at("connectivity").get<std::size_t>();
            r.local_integration = read_metric(props.at("local_integration"), index);
            r.global_integration = read_metric(props.at("global_integration"), index);
            if (!props.at("class_index").is_null()) r.class_index = props["class_index"].get<std::size_t>();
            r.source_street_ids = props.at("source_street_ids").get<std::vector<std::size_t>>();
            for (const auto& [x, y] : read_positions(f.at("geometry").at("coordinates"), index)) {
                r.geometry.points.push_back({x, y});
            }
            out.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw InputError(std::string("malformed exported feature: ") + e.what(), index);
        }
        ++index;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gates

std::vector<GateObservation> parse_gate_table(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) throw InputError("gate table is empty");
    char delim = ',';
    for (char c : {'\t', ';', ','}) {
        if (line.find(c) != std::string::npos) {
            delim = c;
            break;
        }
    }
    const auto split = [delim](const std::string& row) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream rs(row);
        while (std::getline(rs, cell, delim)) cells.push_back(trim(cell));
        if (!row.empty() && row.back() == delim) cells.emplace_back();
        return cells;
    };
    const auto header = split(line);
    std::optional<std::size_t> cx, cy, cf;
    for (std::size_t i = 0; i < header.size(); ++i) {
        std::string h = header[i];
        std::transform(h.begin(), h.end(), h.begin(), [](unsigned char c) { return std::tolower(c); });
        if (h == "x") cx = i;
        if (h == "y") cy = i;
        if (h == "flow") cf = i;
    }
    if (!cx || !cy || !cf) throw InputError("gate table header must name x, y and flow");

    std::vector<GateObservation> gates;
    for (std::size_t row = 0; std::getline(in, line); ++row) {
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        const std::size_t need = std::max({*cx, *cy, *cf});
        if (cells.size() <= need) throw InputError("gate row has too few columns", row);
        try {
            GateObservation g;
            g.location = {parse_double("x", cells[*cx]), parse_double("y", cells[*cy])};
            g.flow = parse_double("flow", cells[*cf]);
            if (g.flow < 0.0) throw InputError("negative gate flow", row);
            gates.push_back(g);
        } catch (const DomainError& e) {
            throw InputError(e.what(), row);
        }
    }
    return gates;
}

std::vector<GateObservation> read_gate_table(const std::filesystem::path& path) {
    return parse_gate_table(read_text_file(path));
}

}  // namespace axialmap
