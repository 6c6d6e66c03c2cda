// Command-line front end: topology, streets, axial, metrics, correlate, distfit.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "axialmap/error.hpp"
#include "axialmap/io.hpp"
#include "axialmap/pipeline.hpp"
#include "axialmap/stats.hpp"

namespace {

using namespace axialmap;
using ordered_json = nlohmann::ordered_json;

enum ExitCode { kOk = 0, kUsage = 1, kInput = 2, kInternal = 3 };

// Flags that mirror PipelineConfig keys; only those given override the
// config file.
struct ConfigFlags {
    std::string config_file;
    std::map<std::string, std::string> values;
    bool split_at_crossings = false;
    bool no_roundabouts = false;
    bool merge_same_street = false;

    void attach(CLI::App& app) {
        app.add_option("--config", config_file, "key=value configuration file")->check(CLI::ExistingFile);
        for (const auto& [flag, key, help] : kValueFlags) {
            app.add_option_function<std::string>(
                std::string("--") + flag, [this, key = key](const std::string& v) { values[key] = v; }, help);
        }
        app.add_flag("--split-at-crossings", split_at_crossings, "split lines at geometric crossings");
        app.add_flag("--no-roundabouts", no_roundabouts, "keep small rings as they are");
        app.add_flag("--merge-same-street", merge_same_street, "also merge lines from the same street");
    }

    PipelineConfig resolve() const {
        PipelineConfig config;
        if (!config_file.empty()) load_config_file(config_file, config);
        for (const auto& [key, value] : values) config.set(key, value);
        if (split_at_crossings) config.split_at_crossings = true;
        if (no_roundabouts) config.collapse_roundabouts = false;
        if (merge_same_street) config.merge_same_street = true;
        config.validate();
        return config;
    }

    struct ValueFlag {
        const char* flag;
        const char* key;
        const char* help;
    };
    static constexpr ValueFlag kValueFlags[] = {
        {"principle", "join_principle", "every-best-fit | self-best-fit | self-fit"},
        {"join-threshold", "join_threshold_degrees", "join threshold angle in degrees (default 45)"},
        {"head-ratio-fraction", "head_ratio_fraction", "fraction of mean(x/d) for long bends (default 0.10)"},
        {"roundabout-max-perimeter", "roundabout_max_perimeter_m", "largest ring collapsed, meters (default 120)"},
        {"snap-tolerance", "snap_tolerance_m", "coordinate snap tolerance, meters (default 0.01)"},
        {"radius", "integration_radius", "local integration radius in steps (default 3)"},
        {"classes", "class_count", "natural-breaks class count (default 7)"},
        {"projection", "projection", "auto | planar | geographic"},
    };
};

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

UnitKind parse_units(const std::string& s) {
    if (s == "axial") return UnitKind::Axial;
    if (s == "streets") return UnitKind::Street;
    throw DomainError("units must be axial or streets");
}

ordered_json fit_json(std::vector<double> values) {
    ordered_json out;
    out["count"] = values.size();
    std::erase_if(values, [](double v) { return !(v > 0.0); });
    out["positive_count"] = values.size();
    if (values.size() >= 2) {
        const LognormalFit fit = fit_lognormal(values);
        out["lognormal_mu"] = round_significant(fit.mu);
        out["lognormal_sigma"] = round_significant(fit.sigma);
        out["ks_statistic"] = round_significant(fit.ks_statistic);
    }
    if (!values.empty()) {
        const HeadTailSplit split = head_tail_split(values);
        out["mean"] = round_significant(split.mean);
        out["head_fraction"] = round_significant(split.head_fraction);
    }
    return out;
}

struct Session {
    PipelineConfig config;
    IngestResult input;
    PipelineResult result;
};

Session run(const ConfigFlags& flags, const std::string& input, Stage stage) {
    Session s;
    s.config = flags.resolve();
    Timer t;
    s.input = ingest_lines(input, s.config.projection);
    const double ingest_seconds = t.seconds();
    s.result = run_pipeline(s.input.lines, s.config, stage);
    s.result.report.stages.insert(s.result.report.stages.begin(), {"ingest", ingest_seconds});
    return s;
}

void finish_report(const Session& s) { s.result.report.print(std::cerr); }

int dispatch(CLI::App& app, int argc, char** argv) {
    ConfigFlags flags;
    std::string input;
    std::string output;
    std::string units = "axial";
    std::string gates_path;
    double max_distance = 10.0;
    bool no_global = false;

    const auto common = [&](CLI::App* sub) {
        sub->add_option("-i,--input", input, "line-feature collection (GeoJSON)")->required();
        flags.attach(*sub);
    };
    auto* topo = app.add_subcommand("topology", "ingest and planarize; print a network summary");
    common(topo);
    auto* streets = app.add_subcommand("streets", "join natural streets; print a bend report");
    common(streets);
    streets->add_option("-o,--output", output, "export streets with metrics");
    streets->add_flag("--no-global", no_global, "skip global integration");
    auto* axial = app.add_subcommand("axial", "generate the axial map and export it with metrics");
    common(axial);
    axial->add_option("-o,--output", output, "output GeoJSON")->required();
    axial->add_flag("--no-global", no_global, "skip global integration");
    auto* metrics = app.add_subcommand("metrics", "connectivity, integration and class breaks");
    common(metrics);
    metrics->add_option("--units", units, "axial | streets");
    metrics->add_option("-o,--output", output, "export units with metrics");
    metrics->add_flag("--no-global", no_global, "skip global integration");
    auto* correlate = app.add_subcommand("correlate", "R^2 and t-test of gate flows against local integration");
    common(correlate);
    correlate->add_option("--gates", gates_path, "gate table with x, y, flow header")->required()->check(CLI::ExistingFile);
    correlate->add_option("--units", units, "axial | streets");
    correlate->add_option("--max-distance", max_distance, "largest gate-to-unit distance, meters");
    auto* distfit = app.add_subcommand("distfit", "lognormal fit of street bend offsets x and ratios x/d");
    common(distfit);
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    ordered_json summary;
    if (topo->parsed()) {
        Session s = run(flags, input, Stage::Topology);
        std::map<std::size_t, std::size_t> degrees;
        for (const NetworkNode& n : s.result.network.nodes()) ++degrees[n.degree()];
        summary["nodes"] = s.result.network.nodes().size();
        summary["arcs"] = s.result.network.arcs().size();
        summary["total_length_m"] = round_significant(s.result.network.total_length());
        summary["skipped_features"] = s.input.skipped_features;
        summary["skipped_degenerate_lines"] = s.result.report.planarize.skipped_degenerate;
        summary["duplicate_arcs"] = s.result.report.planarize.duplicate_arcs;
        summary["roundabouts_collapsed"] = s.result.report.roundabouts.rings_found;
        ordered_json hist = ordered_json::object();
        for (const auto& [deg, count] : degrees) hist[std::to_string(deg)] = count;
        summary["degree_histogram"] = hist;
        finish_report(s);
    } else if (streets->parsed() || distfit->parsed()) {
        Session s = run(flags, input, Stage::Streets);
        std::vector<double> xs, ratios;
        std::size_t closed = 0;
        for (const NaturalStreet& st : s.result.streets) {
            if (st.closed) ++closed;
            if (st.bend && st.geometry.size() >= 3) {
                xs.push_back(st.bend->x);
                ratios.push_back(st.bend->ratio);
            }
        }
        summary["streets"] = s.result.streets.size();
        summary["closed_streets"] = closed;
        summary["x"] = fit_json(xs);
        summary["x_over_d"] = fit_json(ratios);
        if (s.result.report.thresholds) {
            summary["mean_x"] = round_significant(s.result.report.thresholds->mean_x);
            summary["mean_ratio"] = round_significant(s.result.report.thresholds->mean_ratio);
            summary["min_merge_angle"] = round_significant(s.result.report.thresholds->min_merge_angle);
        }
        if (streets->parsed() && !output.empty()) {
            Timer t;
            const UnitMetrics m = compute_unit_metrics(s.result, UnitKind::Street, s.config, !no_global);
            export_map(output, export_records(s.result, m));
            s.result.report.add_stage("metrics", t.seconds());
        }
        finish_report(s);
    } else if (axial->parsed() || metrics->parsed()) {
        Session s = run(flags, input, Stage::Axial);
        const UnitKind kind = metrics->parsed() ? parse_units(units) : UnitKind::Axial;
        Timer t;
        const UnitMetrics m = compute_unit_metrics(s.result, kind, s.config, !no_global);
        s.result.report.add_stage("metrics", t.seconds());
        if (!output.empty()) export_map(output, export_records(s.result, m));
        std::vector<double> conn;
        for (std::size_t i = 0; i < m.graph.size(); ++i) conn.push_back(static_cast<double>(m.graph.degree(i)));
        summary["units"] = kind == UnitKind::Axial ? "axial" : "streets";
        summary["count"] = m.graph.size();
        summary["edges"] = m.graph.edge_count();
        summary["connectivity"] = fit_json(conn);
        ordered_json breaks = ordered_json::array();
        for (double b : m.breaks.breaks) breaks.push_back(round_significant(b));
        summary["local_integration_breaks"] = breaks;
        if (m.breaks.reduced) std::cerr << "warning: class count reduced to " << m.breaks.class_count << "\n";
        finish_report(s);
    } else if (correlate->parsed()) {
        Session s = run(flags, input, Stage::Axial);
        const UnitKind kind = parse_units(units);
        std::vector<GateObservation> gates = read_gate_table(gates_path);
        if (s.input.projection) {
            for (auto& g : gates) g.location = s.input.projection->forward(g.location.x, g.location.y);
        }
        Timer t;
        const UnitMetrics m = compute_unit_metrics(s.result, kind, s.config, false);
        const auto shapes = kind == UnitKind::Axial ? unit_shapes(s.result.map.lines) : unit_shapes(s.result.streets);
        const CorrelationReport c = correlate_gates(gates, shapes, m.local, max_distance);
        s.result.report.add_stage("correlate", t.seconds());
        summary["gates"] = c.gates_total;
        summary["gates_assigned"] = c.gates_assigned;
        summary["gates_used"] = c.gates_used;
        summary["r"] = round_significant(c.r);
        summary["r_squared"] = round_significant(c.r_squared);
        summary["t"] = std::isfinite(c.t_test.t) ? ordered_json(round_significant(c.t_test.t)) : ordered_json("Infinity");
        summary["t_critical_5pct"] = round_significant(c.t_test.critical);
        summary["significant"] = c.t_test.significant;
        finish_report(s);
    }
    std::cout << summary.dump(2) << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Axial map generation from street center lines"};
    try {
        return dispatch(app, argc, argv);
    } catch (const axialmap::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInput;
    } catch (const axialmap::GeometryError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInput;
    } catch (const axialmap::InvariantError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    } catch (const axialmap::DomainError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInternal;
    }
}
