#pragma once

#include "escape/config.hpp"
#include "escape/engine.hpp"
#include "escape/invariants.hpp"

#include <string>

namespace fixtures {

using namespace escape;

/// eps 0.5, man at the origin, lions (1,0), (0,1), (-1,0), all pursuing.
inline GameConfig cfg_a(int level = 2, std::int64_t intervals = 50) {
    GameConfig c;
    c.start.eps = 0.5;
    c.start.man_start = {0.0, 0.0};
    c.start.lion_starts = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}};
    c.controllers = {PurePursuit{}, PurePursuit{}, PurePursuit{}};
    c.level_n = level;
    c.horizon.intervals = intervals;
    if (level >= 3) {
        c.precision = Precision::Extended;
    }
    return c;
}

inline GameConfig with_time(GameConfig c, double t) {
    c.horizon.intervals.reset();
    c.horizon.time = t;
    return c;
}

/// Lion 2 starts just ahead of the man on his first milestone ray, so the
/// level-2 man has to escape and go around it.
inline GameConfig engagement(LionController lion2 = PurePursuit{}, std::int64_t intervals = 2) {
    GameConfig c;
    c.start.eps = 0.5;
    c.start.man_start = {0.0, 0.0};
    c.start.lion_starts = {{1.0, 0.0}, {-0.05, 0.00001}};
    c.controllers = {PurePursuit{}, std::move(lion2)};
    c.level_n = 2;
    c.horizon.intervals = intervals;
    return c;
}

template <class Real>
std::vector<Verdict> run_checked(const GameConfig& c, RunStats* stats = nullptr) {
    Engine<Real> engine(c);
    const CheckContext<Real> ctx{engine.header(), engine.cascade(), engine.max_sample_spacing()};
    CheckerSuite<Real> suite(default_checkers(ctx));
    engine.run(suite);
    if (stats) *stats = engine.stats();
    return suite.finish();
}

inline const Verdict* find(const std::vector<Verdict>& vs, const std::string& name) {
    for (const auto& v : vs) {
        if (v.name == name) return &v;
    }
    return nullptr;
}

}  // namespace fixtures
