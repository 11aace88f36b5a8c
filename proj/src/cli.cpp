#include "escape/cli.hpp"

#include "escape/config.hpp"
#include "escape/errors.hpp"
#include "escape/invariants.hpp"
#include "escape/svg.hpp"
#include "escape/trace_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#ifndef ESCAPE_VERSION
#define ESCAPE_VERSION "0.0.0"
#endif

namespace escape {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

template <class Real>
json opt_json(const std::optional<Real>& v) {
    return v ? json(to_double(*v)) : json(nullptr);
}

template <class Real>
json cascade_to_json(const Cascade<Real>& cascade) {
    json out = json::array();
    for (const auto& ps : cascade) {
        json j;
        j["level"] = ps.level;
        j["eps_n"] = to_double(ps.eps_n);
        j["sigma_n"] = to_double(ps.sigma_n);
        j["ell"] = opt_json(ps.ell);
        j["p"] = ps.p ? json(*ps.p) : json(nullptr);
        j["r"] = opt_json(ps.r);
        j["rho"] = opt_json(ps.rho);
        j["theta"] = to_double(ps.theta);
        j["phi"] = opt_json(ps.phi);
        j["tau"] = opt_json(ps.tau);
        j["rho_prime"] = opt_json(ps.rho_prime);
        j["c_n"] = to_double(ps.c_n);
        j["delta_n"] = opt_json(ps.delta_n);
        out.push_back(j);
    }
    return out;
}

json verdict_to_json(const Verdict& v) {
    json j;
    j["name"] = v.name;
    j["pass"] = v.pass;
    j["first_violation_time"] = v.first_violation_time ? json(*v.first_violation_time) : json(nullptr);
    j["first_violation_sample"] = v.first_violation_sample ? json(*v.first_violation_sample) : json(nullptr);
    j["measured_margin"] = std::isfinite(v.measured_margin) ? json(v.measured_margin) : json(nullptr);
    j["details"] = v.details;
    if (!v.residuals.empty()) {
        json r = json::array();
        for (const auto& x : v.residuals) {
            r.push_back({{"name", x.name}, {"slack", x.slack}, {"pass", x.pass}});
        }
        j["residuals"] = r;
    }
    return j;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read " + path);
    }
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw Error("cannot write " + path);
    }
}

std::string g10(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

template <class Real>
std::vector<Verdict> certify_all(const Cascade<Real>& cascade, const GameConfig& config) {
    std::vector<Verdict> out;
    for (std::size_t i = 0; i < cascade.size(); ++i) {
        out.push_back(certify(cascade[i], std::span<const ParameterSet<Real>>(cascade.data(), i), config.start,
                              config.cascade_options()));
    }
    return out;
}

/// Largest gap between consecutive sample times.
template <class Real>
class SpacingProbe final : public TraceSink<Real> {
public:
    void sample(const TraceSample<Real>& s) override {
        if (last_ && s.t - *last_ > spacing) {
            spacing = s.t - *last_;
        }
        last_ = s.t;
        ++count;
    }
    Real spacing{0};
    std::size_t count = 0;

private:
    std::optional<Real> last_;
};

template <class Real>
std::vector<Verdict> verify_as(const std::string& path, const GameConfig& config) {
    const Cascade<Real> cascade = derive_cascade<Real>(config.start, config.level_n, config.cascade_options());
    auto open = [&](std::ifstream& csv, std::ifstream& hex) -> std::istream* {
        csv.open(path);
        if (!csv) {
            throw ConfigError("cannot read " + path);
        }
        if (precision_of<Real>() == Precision::Extended && fs::exists(sidecar_path(path))) {
            hex.open(sidecar_path(path));
            return &hex;
        }
        return nullptr;
    };
    SpacingProbe<Real> probe;
    TraceHeader header;
    {
        std::ifstream csv, hex;
        std::istream* side = open(csv, hex);
        header = read_trace_csv(csv, probe, side);
    }
    if (probe.count == 0) {
        throw ConfigError("trace has no samples");
    }
    if (header.level_n != config.level_n) {
        throw ConfigError("trace is level " + std::to_string(header.level_n) + " but the config is level " +
                          std::to_string(config.level_n));
    }
    if (header.lion_count != config.start.lion_starts.size()) {
        throw ConfigError("trace and config disagree on the number of lions");
    }
    const CheckContext<Real> ctx{header, cascade, probe.spacing};
    CheckerSuite<Real> suite(default_checkers(ctx));
    {
        std::ifstream csv, hex;
        std::istream* side = open(csv, hex);
        read_trace_csv(csv, suite, side);
    }
    return suite.finish();
}

struct SweepRun {
    std::string name;
    json result;
    bool pass = false;
};

template <class Real>
json simulate_summary(const GameConfig& config, bool& pass) {
    Engine<Real> engine(config);
    const CheckContext<Real> ctx{engine.header(), engine.cascade(), engine.max_sample_spacing()};
    CheckerSuite<Real> suite(default_checkers(ctx));
    DigestStream digest;
    CsvTraceWriter<Real> writer(digest.stream());
    TeeSink<Real> tee({&writer, &suite});
    engine.run(tee);
    const auto verdicts = suite.finish();
    const RunStats& st = engine.stats();
    json j;
    j["config_digest"] = config_digest(config);
    j["trace_sha256"] = digest.hex();
    j["trace_bytes"] = writer.bytes();
    j["samples"] = st.samples;
    j["moves"] = {{"free", st.moves_by_kind[0]}, {"escape", st.moves_by_kind[1]}, {"avoidance", st.moves_by_kind[2]}};
    j["capture"] = st.capture ? json{{"t", st.capture->t}, {"lion", st.capture->lion}, {"distance", st.capture->distance}}
                              : json(nullptr);
    json vs = json::array();
    pass = !st.capture.has_value();
    for (const auto& v : verdicts) {
        vs.push_back(verdict_to_json(v));
        pass = pass && v.pass;
    }
    j["verdicts"] = vs;
    j["pass"] = pass;
    return j;
}

std::optional<std::vector<int>> parse_levels(const std::string& text) {
    if (text.empty()) {
        return std::nullopt;
    }
    std::vector<int> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        try {
            out.push_back(std::stoi(text.substr(start, comma - start)));
        } catch (const std::exception&) {
            throw ConfigError("--levels expects a comma-separated list of integers");
        }
        start = comma + 1;
    }
    return out;
}

template <class Real>
int cmd_params(const GameConfig& config, int level, const std::string& json_out, std::ostream& out) {
    std::vector<PrecisionDiagnostic> diag;
    const Cascade<Real> cascade = derive_cascade<Real>(config.start, level, config.cascade_options(), &diag);
    out << cascade_table(cascade) << "\n";
    const std::string doc = cascade_json(cascade);
    out << doc << "\n";
    if (!json_out.empty()) {
        write_file(json_out, doc + "\n");
    }
    const auto verdicts = certify_all(cascade, config);
    out << "\n" << verdicts_table(verdicts);
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; }) ? 0 : 1;
}

template <class Real>
int cmd_simulate(const GameConfig& config, const std::string& trace_path, const std::string& manifest_path,
                 std::ostream& out) {
    Engine<Real> engine(config);
    std::ofstream csv(trace_path, std::ios::binary);
    if (!csv) {
        throw Error("cannot write " + trace_path);
    }
    std::ofstream hex;
    if (precision_of<Real>() == Precision::Extended) {
        hex.open(sidecar_path(trace_path), std::ios::binary);
        if (!hex) {
            throw Error("cannot write " + sidecar_path(trace_path));
        }
    }
    CsvTraceWriter<Real> writer(csv, hex.is_open() ? &hex : nullptr);
    engine.run(writer);
    const RunStats& st = engine.stats();
    out << "samples " << st.samples << ", moves F " << st.moves_by_kind[0] << " E " << st.moves_by_kind[1] << " A "
        << st.moves_by_kind[2] << ", " << writer.bytes() << " bytes -> " << trace_path << "\n";
    if (st.capture) {
        out << "capture: lion " << st.capture->lion << " at t = " << g10(st.capture->t) << "\n";
    }
    if (!manifest_path.empty()) {
        write_file(manifest_path, manifest_json(config, engine.cascade(), st) + "\n");
    }
    return 0;
}

}  // namespace

std::string tool_version() { return std::string("escape-sim ") + ESCAPE_VERSION; }

template <class Real>
std::string cascade_json(const Cascade<Real>& cascade, int indent) {
    return json{{"cascade", cascade_to_json(cascade)}}.dump(indent);
}

template <class Real>
std::string cascade_table(const Cascade<Real>& cascade) {
    const std::vector<std::string> names = {"level", "eps_n", "sigma_n", "ell",       "p",   "r",      "rho",
                                            "theta", "phi",   "tau",     "rho_prime", "c_n", "delta_n"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& ps : cascade) {
        auto o = [](const auto& v) { return v ? g10(to_double(*v)) : std::string("-"); };
        rows.push_back({std::to_string(ps.level), g10(to_double(ps.eps_n)), g10(to_double(ps.sigma_n)), o(ps.ell),
                        ps.p ? std::to_string(*ps.p) : "-", o(ps.r), o(ps.rho), g10(to_double(ps.theta)), o(ps.phi),
                        o(ps.tau), o(ps.rho_prime), g10(to_double(ps.c_n)), o(ps.delta_n)});
    }
    std::vector<std::size_t> width(names.size());
    for (std::size_t c = 0; c < names.size(); ++c) {
        width[c] = names[c].size();
        for (const auto& r : rows) width[c] = std::max(width[c], r[c].size());
    }
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c > 0) out += "  ";
            out += std::string(width[c] - cells[c].size(), ' ') + cells[c];
        }
        out += '\n';
    };
    line(names);
    for (const auto& r : rows) line(r);
    return out;
}

template <class Real>
std::string manifest_json(const GameConfig& config, const Cascade<Real>& cascade, const RunStats& stats) {
    json j;
    j["config"] = json::parse(serialize_config(config));
    j["cascade_echo"] = cascade_to_json(cascade);
    j["tool_version"] = tool_version();
    j["config_digest"] = config_digest(config);
    j["samples"] = stats.samples;
    j["capture"] = stats.capture ? json{{"t", stats.capture->t}, {"lion", stats.capture->lion}} : json(nullptr);
    return j.dump(2);
}

std::string verdicts_json(const std::vector<Verdict>& verdicts, int indent) {
    json arr = json::array();
    bool pass = true;
    for (const auto& v : verdicts) {
        arr.push_back(verdict_to_json(v));
        pass = pass && v.pass;
    }
    return json{{"pass", pass}, {"verdicts", arr}}.dump(indent);
}

std::string verdicts_table(const std::vector<Verdict>& verdicts) {
    std::size_t w = 4;
    for (const auto& v : verdicts) w = std::max(w, v.name.size());
    std::string out;
    for (const auto& v : verdicts) {
        out += v.name + std::string(w - v.name.size(), ' ') + "  " + (v.pass ? "PASS" : "FAIL");
        out += "  margin " + g10(v.measured_margin);
        if (v.first_violation_time) {
            out += "  first violation t = " + g10(*v.first_violation_time);
        }
        out += "\n    " + v.details + "\n";
    }
    return out;
}

std::vector<Verdict> verify_trace_file(const std::string& trace_path, const GameConfig& config) {
    return config.precision == Precision::Extended ? verify_as<Extended>(trace_path, config)
                                                   : verify_as<double>(trace_path, config);
}

unsigned default_sweep_threads() {
    if (const char* env = std::getenv("ESCAPE_SIM_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string run_sweep(const std::string& dir, unsigned threads, bool* all_pass) {
    if (!fs::is_directory(dir)) {
        throw ConfigError(dir + " is not a directory");
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
        return a.filename().string() < b.filename().string();
    });
    std::vector<SweepRun> runs(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) {
            SweepRun& run = runs[i];
            run.name = files[i].filename().string();
            try {
                const GameConfig config = parse_config(read_file(files[i].string()));
                run.result = config.precision == Precision::Extended ? simulate_summary<Extended>(config, run.pass)
                                                                     : simulate_summary<double>(config, run.pass);
            } catch (const std::exception& e) {
                run.result = json{{"error", e.what()}, {"pass", false}};
                run.pass = false;
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(files.size(), 1))));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    json out = json::array();
    bool pass = true;
    for (auto& r : runs) {
        r.result["name"] = r.name;
        out.push_back(r.result);
        pass = pass && r.pass;
    }
    if (all_pass) *all_pass = pass;
    return json{{"tool_version", tool_version()}, {"runs", out}, {"pass", pass}}.dump(2);
}

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lion-and-man escape strategy simulator", "escape-sim"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version());

    std::string config_path, trace_path, out_path, manifest_path, json_out, dir, levels;
    int level = 0;
    bool show_goals = false;
    int width = 800;
    unsigned threads = 0;

    auto* params = app.add_subcommand("params", "Print and certify the parameter cascade");
    params->add_option("--config", config_path, "Run configuration (JSON)")->required();
    params->add_option("--level", level, "Deepest level (default: the config's level)")->check(CLI::PositiveNumber);
    params->add_option("--json-out", json_out, "Also write the cascade JSON here");

    auto* simulate = app.add_subcommand("simulate", "Run the strategy and write the trace CSV");
    simulate->add_option("--config", config_path, "Run configuration (JSON)")->required();
    simulate->add_option("--out", out_path, "Trace CSV")->required();
    simulate->add_option("--manifest", manifest_path, "Run manifest (JSON)");

    auto* verify = app.add_subcommand("verify", "Run every trace checker");
    verify->add_option("--trace", trace_path, "Trace CSV")->required();
    verify->add_option("--config", config_path, "Run configuration (JSON)")->required();
    verify->add_option("--json-out", json_out, "Also write the verdict JSON here");

    auto* plot = app.add_subcommand("plot", "Render a trace as SVG");
    plot->add_option("--trace", trace_path, "Trace CSV")->required();
    plot->add_option("--out", out_path, "SVG file")->required();
    plot->add_flag("--show-goals", show_goals, "Mark the milestone goals");
    plot->add_option("--width", width, "Width in pixels")->check(CLI::PositiveNumber);
    plot->add_option("--levels", levels, "Man levels to draw, e.g. 1,2");

    auto* sweep = app.add_subcommand("sweep", "Simulate and check every config in a directory");
    sweep->add_option("--config-dir", dir, "Directory of *.json configs")->required();
    sweep->add_option("--out", out_path, "Merged results (JSON)")->required();
    sweep->add_option("--threads", threads, "Workers (default: ESCAPE_SIM_THREADS or all cores)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << tool_version() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        if (params->parsed()) {
            const GameConfig config = parse_config(read_file(config_path));
            const int n = level > 0 ? level : config.level_n;
            return config.precision == Precision::Extended ? cmd_params<Extended>(config, n, json_out, out)
                                                           : cmd_params<double>(config, n, json_out, out);
        }
        if (simulate->parsed()) {
            const GameConfig config = parse_config(read_file(config_path));
            return config.precision == Precision::Extended
                       ? cmd_simulate<Extended>(config, out_path, manifest_path, out)
                       : cmd_simulate<double>(config, out_path, manifest_path, out);
        }
        if (verify->parsed()) {
            const GameConfig config = parse_config(read_file(config_path));
            const auto verdicts = verify_trace_file(trace_path, config);
            out << verdicts_table(verdicts) << "\n";
            const std::string doc = verdicts_json(verdicts);
            out << doc << "\n";
            if (!json_out.empty()) write_file(json_out, doc + "\n");
            const auto failed = std::find_if(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return !v.pass; });
            if (failed != verdicts.end()) {
                err << "verification failed: " << failed->name << "\n";
                return 1;
            }
            return 0;
        }
        if (plot->parsed()) {
            SvgOptions opt;
            opt.width_px = width;
            opt.show_goals = show_goals;
            opt.level_filter = parse_levels(levels);
            SvgPlot<double> svg(opt);
            std::ifstream csv(trace_path);
            if (!csv) throw ConfigError("cannot read " + trace_path);
            read_trace_csv(csv, svg);
            write_file(out_path, svg.render());
            return 0;
        }
        if (sweep->parsed()) {
            bool pass = false;
            const std::string doc = run_sweep(dir, threads > 0 ? threads : default_sweep_threads(), &pass);
            write_file(out_path, doc + "\n");
            out << (pass ? "all runs passed" : "some runs failed") << " -> " << out_path << "\n";
            return pass ? 0 : 1;
        }
    } catch (const PrecisionError& e) {
        err << "error: " << e.what() << " (set \"precision\": \"extended\")\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

template std::string cascade_json<double>(const Cascade<double>&, int);
template std::string cascade_json<Extended>(const Cascade<Extended>&, int);
template std::string cascade_table<double>(const Cascade<double>&);
template std::string cascade_table<Extended>(const Cascade<Extended>&);
template std::string manifest_json<double>(const GameConfig&, const Cascade<double>&, const RunStats&);
template std::string manifest_json<Extended>(const GameConfig&, const Cascade<Extended>&, const RunStats&);

}  // namespace escape
