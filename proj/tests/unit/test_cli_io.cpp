#include "doctest.h"

#include "../support/fixtures.hpp"
#include "escape/cli.hpp"
#include "escape/svg.hpp"
#include "escape/trace_io.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace escape;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const char* kMinimal = R"({
  "eps": 0.5, "man_start": [0, 0],
  "lions": [{"start": [1, 0]}, {"start": [0, 1], "controller": {"kind": "stationary"}}],
  "level": 2, "horizon": {"intervals": 1}
})";

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "escape_cli_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(const std::vector<std::string>& args, std::string* out = nullptr, std::string* err = nullptr) {
    std::ostringstream o;
    std::ostringstream e;
    const int rc = cli_dispatch(args, o, e);
    if (out) *out = o.str();
    if (err) *err = e.str();
    return rc;
}

std::string replace_first(std::string s, const std::string& from, const std::string& to) {
    const auto at = s.find(from);
    REQUIRE(at != std::string::npos);
    return s.replace(at, from.size(), to);
}

/// Well-formedness of the small XML subset the plotter emits.
bool balanced_xml(const std::string& doc) {
    std::vector<std::string> open;
    for (std::size_t i = doc.find('<'); i != std::string::npos; i = doc.find('<', i + 1)) {
        const std::size_t close = doc.find('>', i);
        if (close == std::string::npos) return false;
        const std::string tag = doc.substr(i + 1, close - i - 1);
        if (tag.empty() || tag[0] == '?') continue;
        if (tag[0] == '/') {
            if (open.empty() || open.back() != tag.substr(1)) return false;
            open.pop_back();
        } else if (tag.back() != '/') {
            open.push_back(tag.substr(0, tag.find(' ')));
        }
    }
    return open.empty();
}

}  // namespace

TEST_CASE("parse_config fills defaults") {
    const GameConfig c = parse_config(kMinimal);
    CHECK(c.start.eps == 0.5);
    CHECK(c.start.lion_starts.size() == 2);
    CHECK(std::holds_alternative<PurePursuit>(c.controllers[0]));
    CHECK(std::holds_alternative<Stationary>(c.controllers[1]));
    CHECK(c.substep_factor == 16);
    CHECK(c.precision == Precision::Standard);
    CHECK_FALSE(c.delta_override.has_value());
    CHECK(c.recorded_levels() == std::vector<int>{1, 2});
    CHECK(*c.horizon.intervals == 1);
}

TEST_CASE("parse_config rejects invalid documents") {
    const std::string base = kMinimal;
    CHECK_THROWS_WITH_AS(parse_config(replace_first(base, "[1, 0]", "[0, 0]")),
                         doctest::Contains("starts at the man's position"), ConfigError);
    CHECK_THROWS_AS(parse_config(replace_first(base, "0.5", "1.5")), ConfigError);
    CHECK_THROWS_AS(parse_config(replace_first(base, "\"level\": 2", "\"level\": 3")), ConfigError);
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config(replace_first(base, R"({"kind": "stationary"})",
                                               R"({"kind": "scripted", "waypoints": [[0.1, [5, 5]]]})")),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(replace_first(base, R"("stationary")", R"("teleport")")), ConfigError);
}

TEST_CASE("canonical serialization is a fixed point") {
    for (const char* doc : {kMinimal}) {
        const GameConfig a = parse_config(doc);
        const std::string s1 = serialize_config(a);
        const std::string s2 = serialize_config(parse_config(s1));
        CHECK(s1 == s2);
        CHECK(config_digest(a) == sha256_hex(s1));
    }
    for (const auto& entry : fs::directory_iterator(fs::path(ESCAPE_SOURCE_DIR) / "configs")) {
        const GameConfig a = load_config_file(entry.path().string());
        CHECK(serialize_config(parse_config(serialize_config(a))) == serialize_config(a));
    }
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("csv writer and reader") {
    GameConfig c = parse_config(kMinimal);
    c.horizon.intervals = 0;
    const auto one = run<double>(c);
    std::ostringstream os;
    write_trace_csv(one, os);
    const std::string text = os.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(text.rfind("t,move,goal_x,goal_y,man1_x,man1_y,man2_x,man2_y,lion1_x,lion1_y,lion2_x,lion2_y\n", 0) == 0);

    const auto tr = run<double>(fixtures::engagement(PurePursuit{}, 1));
    std::stringstream ss;
    const std::size_t bytes = write_trace_csv(tr, ss);
    CHECK(bytes == ss.str().size());
    const std::string body = ss.str();
    CHECK(static_cast<std::size_t>(std::count(body.begin(), body.end(), '\n')) == tr.samples.size() + 1);

    TraceCollector<double> back;
    const TraceHeader h = read_trace_csv(ss, back);
    CHECK(h.levels == tr.header.levels);
    REQUIRE(back.trace().samples.size() == tr.samples.size());
    bool exact = true;
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
        const auto& a = tr.samples[i];
        const auto& b = back.trace().samples[i];
        exact = exact && a.t == b.t && a.man == b.man && a.lions == b.lions && a.move == b.move && a.goal == b.goal;
    }
    CHECK(exact);

    Trace<double> reread = back.trace();
    reread.cascade = tr.cascade;
    const auto va = check_all(tr);
    const auto vb = check_all(reread);
    for (std::size_t i = 0; i < va.size(); ++i) {
        CHECK(va[i].pass == vb[i].pass);
        CHECK(va[i].measured_margin == vb[i].measured_margin);
        CHECK(va[i].details == vb[i].details);
    }
}

TEST_CASE("extended traces round-trip through the hex sidecar") {
    GameConfig c = fixtures::engagement(PurePursuit{}, 1);
    c.precision = Precision::Extended;
    c.horizon.intervals.reset();
    c.horizon.time = 0.002;
    const auto tr = run<Extended>(c);
    std::stringstream csv;
    std::stringstream hex;
    write_trace_csv(tr, csv, &hex);
    TraceCollector<Extended> back;
    read_trace_csv(csv, back, &hex);
    REQUIRE(back.trace().samples.size() == tr.samples.size());
    bool exact = true;
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
        exact = exact && back.trace().samples[i].man == tr.samples[i].man &&
                back.trace().samples[i].t == tr.samples[i].t;
    }
    CHECK(exact);
    CHECK(parse_hex_extended(to_hex(Extended(1) / 3)) == Extended(1) / 3);
    CHECK(parse_hex_double(to_hex(0.1)) == 0.1);
}

TEST_CASE("csv reader rejects malformed input") {
    std::istringstream bad("t,move,goal_x,goal_y,man1_x,man1_y,lion1_x,lion1_y\n0,Q,,,0,0,1,0\n");
    TraceCollector<double> sink;
    CHECK_THROWS(read_trace_csv(bad, sink));
    std::istringstream header("x,y\n");
    CHECK_THROWS(read_trace_csv(header, sink));
}

TEST_CASE("svg output") {
    GameConfig c = parse_config(kMinimal);
    c.horizon.intervals = 0;
    const std::string single = render_svg(run<double>(c));
    CHECK(balanced_xml(single));
    CHECK(single.find("<polyline") == std::string::npos);
    CHECK(single.find("<circle") != std::string::npos);

    GameConfig straight;
    straight.start.eps = 0.5;
    straight.start.man_start = {0, 0};
    straight.start.lion_starts = {{-1, 0}};
    straight.controllers = {Stationary{}};
    straight.horizon.time = 3.0;
    const std::string line = render_svg(run<double>(straight));
    CHECK(balanced_xml(line));
    const auto at = line.find("class=\"man man-level-1\" points=\"");
    REQUIRE(at != std::string::npos);
    const auto end = line.find('"', at + 33);
    std::istringstream pts(line.substr(at + 33, end - at - 33));
    std::string pair;
    while (pts >> pair) {
        CHECK(std::stod(pair.substr(pair.find(',') + 1)) == 0.0);
    }
    CHECK(line.find("href") == std::string::npos);

    SvgOptions opt;
    opt.show_goals = true;
    const std::string eng = render_svg(run<double>(fixtures::engagement()), opt);
    CHECK(balanced_xml(eng));
    CHECK(eng.find("move move-avoidance") != std::string::npos);
    CHECK(eng.find("move move-escape") != std::string::npos);
    CHECK(eng.find("class=\"goal\"") != std::string::npos);
    CHECK(eng.find("man-level-1") != std::string::npos);

    opt.level_filter = std::vector<int>{2};
    const std::string only2 = render_svg(run<double>(fixtures::engagement(PurePursuit{}, 1)), opt);
    CHECK(only2.find("class=\"man man-level-1\"") == std::string::npos);
}

TEST_CASE("cli params prints the certified cascade") {
    const fs::path cfg = fs::path(ESCAPE_SOURCE_DIR) / "configs" / "cfg_a.json";
    std::string out;
    CHECK(cli({"params", "--config", cfg.string()}, &out) == 0);
    CHECK(out.find("certify(level 2)") != std::string::npos);
    const fs::path js = scratch("cascade.json");
    CHECK(cli({"params", "--config", cfg.string(), "--json-out", js.string()}) == 0);
    const json doc = json::parse(slurp(js));
    const json& levels = doc.is_array() ? doc : doc["cascade"];
    CHECK(levels.size() == 2);
    CHECK(levels[1]["p"] == 10);
    std::string err;
    CHECK(cli({"params", "--config", cfg.string(), "--level", "3"}, &out, &err) == 1);
    CHECK(err.find("extended") != std::string::npos);
}

TEST_CASE("cli usage errors") {
    CHECK(cli({"frobnicate"}) == 2);
    CHECK(cli({"params", "--bogus"}) == 2);
    CHECK(cli({}) == 2);
    std::string out;
    CHECK(cli({"--version"}, &out) == 0);
    CHECK(out.find(tool_version()) != std::string::npos);
}

TEST_CASE("cli simulate, verify and plot") {
    const fs::path cfg = scratch("engage.json");
    write(cfg, R"({"eps": 0.5, "man_start": [0, 0],
                   "lions": [{"start": [1, 0]}, {"start": [-0.05, 0.00001]}],
                   "level": 2, "horizon": {"intervals": 1}})");
    const fs::path a = scratch("a.csv");
    const fs::path b = scratch("b.csv");
    const fs::path manifest = scratch("manifest.json");
    CHECK(cli({"simulate", "--config", cfg.string(), "--out", a.string(), "--manifest", manifest.string()}) == 0);
    CHECK(cli({"simulate", "--config", cfg.string(), "--out", b.string()}) == 0);
    CHECK(slurp(a) == slurp(b));

    const json m = json::parse(slurp(manifest));
    CHECK(m["config_digest"] == config_digest(load_config_file(cfg.string())));
    CHECK(m["tool_version"] == tool_version());
    CHECK(m["cascade_echo"].size() == 2);
    CHECK(m.contains("config"));

    std::string out;
    const fs::path verdicts = scratch("verdicts.json");
    CHECK(cli({"verify", "--trace", a.string(), "--config", cfg.string(), "--json-out", verdicts.string()}, &out) ==
          0);
    const json vj = json::parse(slurp(verdicts));
    CHECK(vj["pass"] == true);
    CHECK(vj["verdicts"].size() == 6);

    // Push one lion-2 coordinate onto the man.
    std::string text = slurp(a);
    std::vector<std::string> lines;
    std::istringstream ls(text);
    for (std::string l; std::getline(ls, l);) lines.push_back(l);
    auto& row = lines[lines.size() / 2];
    std::vector<std::string> f;
    std::istringstream rs(row);
    for (std::string cell; std::getline(rs, cell, ',');) f.push_back(cell);
    f[10] = f[6];
    f[11] = f[7];
    row.clear();
    for (std::size_t i = 0; i < f.size(); ++i) row += (i ? "," : "") + f[i];
    std::string tampered;
    for (const auto& l : lines) tampered += l + "\n";
    const fs::path t = scratch("tampered.csv");
    write(t, tampered);
    std::string err;
    CHECK(cli({"verify", "--trace", t.string(), "--config", cfg.string()}, &out, &err) == 1);
    CHECK(err.find("safety") != std::string::npos);

    const fs::path svg = scratch("plot.svg");
    CHECK(cli({"plot", "--trace", a.string(), "--out", svg.string(), "--show-goals"}) == 0);
    CHECK(balanced_xml(slurp(svg)));
}

TEST_CASE("sweep output does not depend on the worker count") {
    const fs::path dir = scratch("sweep");
    fs::create_directories(dir);
    for (int i = 0; i < 4; ++i) {
        write(dir / ("run" + std::to_string(i) + ".json"),
              R"({"eps": 0.5, "man_start": [0, 0], "lions": [{"start": [1, 0]}, {"start": [0, )" +
                  std::to_string(1 + i) + R"(]}], "level": 2, "horizon": {"time": 0.01}})");
    }
    bool pass1 = false;
    bool pass4 = false;
    const std::string one = run_sweep(dir.string(), 1, &pass1);
    const std::string four = run_sweep(dir.string(), 4, &pass4);
    CHECK(one == four);
    CHECK(pass1);
    CHECK(pass4);
    const json doc = json::parse(one);
    CHECK(doc.dump().find("run3.json") != std::string::npos);
}
