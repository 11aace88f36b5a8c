#include "doctest.h"

#include "escape/adversaries.hpp"

#include <cmath>
#include <set>

using namespace escape;
using P = Point2<double>;

namespace {

class FixedMan final : public ManPast<double> {
public:
    FixedMan(double now, P pos, std::optional<P> goal = std::nullopt) : now_(now), pos_(pos), goal_(goal) {}
    const double& now() const override { return now_; }
    P position_at(const double& s) const override {
        if (s > now_) throw CausalityError("future");
        return pos_;
    }
    std::optional<P> goal() const override { return goal_; }

private:
    double now_;
    P pos_;
    std::optional<P> goal_;
};

}  // namespace

TEST_CASE("pure pursuit") {
    const FixedMan man(0.0, P{3, 4});
    const P a = lion_step<double>(PurePursuit{}, P{0, 0}, man, 0.0, 1.0);
    CHECK(a.x == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(a.y == doctest::Approx(0.8).epsilon(1e-15));
    const FixedMan close(0.0, P{0.5, 0});
    CHECK(lion_step<double>(PurePursuit{}, P{0, 0}, close, 0.0, 1.0) == P{0.5, 0});
}

TEST_CASE("stationary") {
    const FixedMan man(0.0, P{3, 4});
    CHECK(lion_step<double>(Stationary{}, P{7, -2}, man, 0.0, 0.25) == P{7, -2});
    CHECK_THROWS_AS(lion_step<double>(Stationary{}, P{7, -2}, man, 0.0, 0.0), DomainError);
}

TEST_CASE("goal ambush") {
    const FixedMan man(0.0, P{3, 4}, P{0, -2});
    CHECK(lion_step<double>(GoalAmbush{true}, P{0, 0}, man, 0.0, 1.0) == P{0, -1});
    const P blind = lion_step<double>(GoalAmbush{false}, P{0, 0}, man, 0.0, 1.0);
    CHECK(blind.x == doctest::Approx(0.6));
    const FixedMan no_goal(0.0, P{3, 4});
    CHECK(lion_step<double>(GoalAmbush{true}, P{0, 0}, no_goal, 0.0, 1.0).y == doctest::Approx(0.8));
}

TEST_CASE("scripted paths") {
    Scripted s;
    s.waypoints = {{1.0, P{1, 0}}, {2.0, P{1, 1}}};
    const auto ctrl = normalize_controller(s, P{0, 0});
    const auto& w = std::get<Scripted>(ctrl).waypoints;
    REQUIRE(w.size() == 3);
    CHECK(w[0].t == 0.0);
    CHECK(scripted_position(w, 0.5) == P{0.5, 0});
    CHECK(scripted_position(w, 1.5) == P{1, 0.5});
    CHECK(scripted_position(w, 9.0) == P{1, 1});
    const FixedMan man(0.0, P{5, 5});
    CHECK(lion_step<double>(ctrl, P{0, 0}, man, 0.0, 0.25) == P{0.25, 0});

    Scripted fast;
    fast.waypoints = {{0.0, P{0, 0}}, {1.0, P{2, 0}}};
    CHECK_THROWS_AS(normalize_controller(fast, P{0, 0}), ConfigError);
    Scripted wrong_start;
    wrong_start.waypoints = {{0.0, P{1, 0}}};
    CHECK_THROWS_AS(normalize_controller(wrong_start, P{0, 0}), ConfigError);
    Scripted backwards;
    backwards.waypoints = {{1.0, P{0.5, 0}}, {1.0, P{0.5, 0}}};
    CHECK_THROWS_AS(normalize_controller(backwards, P{0, 0}), ConfigError);
    CHECK_THROWS_AS(normalize_controller(Replay{}, P{0, 0}), ConfigError);
}

TEST_CASE("controller kinds") {
    CHECK(controller_kind(Stationary{}) == "stationary");
    CHECK(controller_kind(PurePursuit{}) == "pure_pursuit");
    CHECK(controller_kind(GoalAmbush{}) == "goal_ambush");
    CHECK(controller_kind(Scripted{}) == "scripted");
    CHECK(controller_kind(Replay{}) == "replay");
}

TEST_CASE("orbit respects the unit speed bound") {
    const Scripted s = scripted_orbit(P{0, 1}, P{-0.125, 0}, 0.3, 5.0);
    CHECK_NOTHROW(normalize_controller(s, P{0, 1}));
    const auto& w = s.waypoints;
    CHECK(w.back().t >= 5.0);
    for (std::size_t i = 2; i < w.size(); ++i) {
        CHECK(distance(w[i].p, P{-0.125, 0}) == doctest::Approx(0.3).epsilon(1e-12));
    }
    CHECK_THROWS_AS(scripted_orbit(P{0, 0}, P{0, 0}, 0.0, 1.0), ConfigError);
}

TEST_CASE("rational grid starts") {
    const auto a = rational_grid_starts(1.0, 3, P{10, 10});
    REQUIRE(a.size() == 3);
    CHECK(a[0] == P{-1, 0});
    CHECK(a[1] == P{0, -1});
    CHECK(a[2] == P{0, 0});

    const auto b = rational_grid_starts(1.0, 3, P{0, 0});
    REQUIRE(b.size() == 3);
    CHECK(b[2] == P{0, 1});

    for (double radius : {0.5, 1.0, 2.5}) {
        const auto g = rational_grid_starts(radius, 200, P{0, 0});
        CHECK(g.size() == 200);
        std::set<std::pair<double, double>> seen;
        for (const auto& p : g) {
            CHECK(norm(p) <= radius + 1e-15);
            CHECK(norm(p) > 0.0);
            CHECK(seen.insert({p.x, p.y}).second);
        }
        CHECK(g == rational_grid_starts(radius, 200, P{0, 0}));
    }
    CHECK(rational_grid_starts(1.0, 0, P{0, 0}).empty());
}
