#include "escape/cli.hpp"
#include "escape/config.hpp"
#include "escape/errors.hpp"
#include "escape/invariants.hpp"
#include "escape/svg.hpp"
#include "escape/trace_io.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>

namespace py = pybind11;
using namespace escape;

namespace {

py::dict verdict_dict(const Verdict& v) {
    py::dict d;
    d["name"] = v.name;
    d["pass"] = v.pass;
    d["first_violation_time"] = v.first_violation_time ? py::cast(*v.first_violation_time) : py::none();
    d["first_violation_sample"] = v.first_violation_sample ? py::cast(*v.first_violation_sample) : py::none();
    d["measured_margin"] = v.measured_margin;
    d["details"] = v.details;
    return d;
}

py::list verdict_list(const std::vector<Verdict>& vs) {
    py::list out;
    for (const auto& v : vs) out.append(verdict_dict(v));
    return out;
}

py::object json_loads(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

template <class Real>
py::object cascade_for(const GameConfig& c, int level) {
    return json_loads(cascade_json(derive_cascade<Real>(c.start, level, c.cascade_options()), -1))["cascade"];
}

template <class Real>
py::list certify_for(const GameConfig& c, int level) {
    const auto cascade = derive_cascade<Real>(c.start, level, c.cascade_options());
    std::vector<Verdict> out;
    for (std::size_t i = 0; i < cascade.size(); ++i) {
        out.push_back(certify(cascade[i], std::span<const ParameterSet<Real>>(cascade.data(), i), c.start,
                              c.cascade_options()));
    }
    return verdict_list(out);
}

template <class Real>
py::dict run_for(const GameConfig& c, bool check) {
    Trace<Real> trace;
    {
        py::gil_scoped_release release;
        trace = run<Real>(c);
    }
    py::list t, moves, goals, lions;
    py::dict men;
    for (int k : trace.header.levels) men[py::int_(k)] = py::list();
    for (const auto& s : trace.samples) {
        t.append(to_double(s.t));
        moves.append(std::string(1, move_code(s.move)));
        goals.append(s.goal ? py::cast(std::make_pair(to_double(s.goal->x), to_double(s.goal->y))) : py::none());
        for (std::size_t i = 0; i < s.man.size(); ++i) {
            men[py::int_(trace.header.levels[i])].cast<py::list>().append(
                std::make_pair(to_double(s.man[i].x), to_double(s.man[i].y)));
        }
        py::list row;
        for (const auto& l : s.lions) row.append(std::make_pair(to_double(l.x), to_double(l.y)));
        lions.append(row);
    }
    py::dict d;
    d["t"] = t;
    d["move"] = moves;
    d["goal"] = goals;
    d["man"] = men;
    d["lions"] = lions;
    d["config_digest"] = trace.config_digest;
    d["capture"] = trace.capture ? py::cast(std::make_pair(trace.capture->t, trace.capture->lion)) : py::none();
    if (check) {
        std::vector<Verdict> vs;
        {
            py::gil_scoped_release release;
            vs = check_all(trace);
        }
        d["verdicts"] = verdict_list(vs);
    }
    return d;
}

template <class Real>
py::dict simulate_for(const GameConfig& c, const std::string& path) {
    Engine<Real> engine(c);
    std::ofstream csv(path, std::ios::binary);
    std::ofstream hex;
    if (precision_of<Real>() == Precision::Extended) hex.open(sidecar_path(path), std::ios::binary);
    if (!csv) throw Error("cannot write " + path);
    CsvTraceWriter<Real> writer(csv, hex.is_open() ? &hex : nullptr);
    {
        py::gil_scoped_release release;
        engine.run(writer);
    }
    const RunStats& st = engine.stats();
    py::dict d;
    d["samples"] = st.samples;
    d["bytes"] = writer.bytes();
    d["moves"] = py::dict(py::arg("free") = st.moves_by_kind[0], py::arg("escape") = st.moves_by_kind[1],
                          py::arg("avoidance") = st.moves_by_kind[2]);
    d["capture"] = st.capture ? py::cast(std::make_pair(st.capture->t, st.capture->lion)) : py::none();
    return d;
}

}  // namespace

PYBIND11_MODULE(escape_sim, m) {
    m.doc() = "Lion-and-man escape strategy: parameter cascade, simulation and trace checks.";
    m.attr("__version__") = tool_version();

    // Translators are tried newest first, so the base class goes first.
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<PrecisionError>(m, "PrecisionError", PyExc_ArithmeticError);

    m.def(
        "normalize_config", [](const std::string& text) { return json_loads(serialize_config(parse_config(text))); },
        py::arg("config_json"), "Parse, validate and return the canonical config.");
    m.def(
        "config_digest", [](const std::string& text) { return config_digest(parse_config(text)); },
        py::arg("config_json"));

    m.def(
        "derive_cascade",
        [](const std::string& text, int level) {
            const GameConfig c = parse_config(text);
            const int n = level > 0 ? level : c.level_n;
            return c.precision == Precision::Extended ? cascade_for<Extended>(c, n) : cascade_for<double>(c, n);
        },
        py::arg("config_json"), py::arg("level") = 0, "Parameter sets for levels 1..level.");
    m.def(
        "certify",
        [](const std::string& text, int level) {
            const GameConfig c = parse_config(text);
            const int n = level > 0 ? level : c.level_n;
            return c.precision == Precision::Extended ? certify_for<Extended>(c, n) : certify_for<double>(c, n);
        },
        py::arg("config_json"), py::arg("level") = 0);

    m.def(
        "run",
        [](const std::string& text, bool check) {
            const GameConfig c = parse_config(text);
            return c.precision == Precision::Extended ? run_for<Extended>(c, check) : run_for<double>(c, check);
        },
        py::arg("config_json"), py::arg("check") = true,
        "Run in memory; returns samples and, with check, every checker verdict.");
    m.def(
        "simulate",
        [](const std::string& text, const std::string& out) {
            const GameConfig c = parse_config(text);
            return c.precision == Precision::Extended ? simulate_for<Extended>(c, out) : simulate_for<double>(c, out);
        },
        py::arg("config_json"), py::arg("out"), "Run and stream the trace to a CSV file.");
    m.def(
        "verify",
        [](const std::string& trace_path, const std::string& text) {
            const GameConfig c = parse_config(text);
            std::vector<Verdict> vs;
            {
                py::gil_scoped_release release;
                vs = verify_trace_file(trace_path, c);
            }
            return verdict_list(vs);
        },
        py::arg("trace"), py::arg("config_json"));
    m.def(
        "render_svg",
        [](const std::string& trace_path, bool show_goals, int width) {
            SvgOptions opt;
            opt.show_goals = show_goals;
            opt.width_px = width;
            SvgPlot<double> plot(opt);
            std::ifstream csv(trace_path);
            if (!csv) throw ConfigError("cannot read " + trace_path);
            read_trace_csv(csv, plot);
            return plot.render();
        },
        py::arg("trace"), py::arg("show_goals") = false, py::arg("width") = 800);
    m.def(
        "sweep",
        [](const std::string& dir, unsigned threads) {
            std::string doc;
            {
                py::gil_scoped_release release;
                doc = run_sweep(dir, threads > 0 ? threads : default_sweep_threads());
            }
            return json_loads(doc);
        },
        py::arg("config_dir"), py::arg("threads") = 0);
    m.def(
        "ccw_leading_intersection",
        [](std::pair<double, double> man, double step, std::pair<double, double> lion, double r) {
            const auto q = escape::ccw_leading_intersection(Point2<double>{man.first, man.second}, step,
                                                            Point2<double>{lion.first, lion.second}, r);
            return std::make_pair(q.x, q.y);
        },
        py::arg("man"), py::arg("step"), py::arg("lion"), py::arg("r"));
}
