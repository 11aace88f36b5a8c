#include "doctest.h"

#include "../support/oracles.hpp"
#include "escape/geometry.hpp"

#include <cmath>
#include <random>

using namespace escape;
using P = Point2<double>;

namespace {

bool near(const P& a, const P& b, double tol) { return distance(a, b) <= tol; }

double angle_gap(long double a, long double b) {
    long double d = std::fmod(std::fabs(a - b), 2 * std::numbers::pi_v<long double>);
    return static_cast<double>(std::min(d, 2 * std::numbers::pi_v<long double>- d));
}

}  // namespace

TEST_CASE("circle_circle_intersection examples") {
    auto tangent = circle_circle_intersection(P{0, 0}, 1.0, P{2, 0}, 1.0);
    REQUIRE(tangent.size() == 1);
    CHECK(near(tangent[0], P{1, 0}, 1e-12));

    auto pair = circle_circle_intersection(P{0, 0}, 1.0, P{1, 0}, 1.0);
    REQUIRE(pair.size() == 2);
    CHECK(near(pair[0], P{0.5, -std::sqrt(3.0) / 2}, 1e-12));
    CHECK(near(pair[1], P{0.5, std::sqrt(3.0) / 2}, 1e-12));

    CHECK(circle_circle_intersection(P{0, 0}, 1.0, P{3, 0}, 1.0).empty());
    CHECK_THROWS_AS(circle_circle_intersection(P{0, 0}, 1.0, P{0, 0}, 2.0), DegenerateInput);
    CHECK_THROWS_AS(circle_circle_intersection(P{0, 0}, 0.0, P{1, 0}, 1.0), DegenerateInput);
}

TEST_CASE("intersection points lie on both circles") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coord(-5, 5);
    std::uniform_real_distribution<double> radius(1e-9, 3);
    int checked = 0;
    for (int k = 0; k < 5000; ++k) {
        const P c1{coord(rng), coord(rng)};
        const P c2{coord(rng), coord(rng)};
        const double r1 = radius(rng);
        const double r2 = radius(rng);
        const auto pts = circle_circle_intersection(c1, r1, c2, r2);
        const double tol = 1e-12 * std::max({r1, r2, distance(c1, c2)});
        for (const auto& q : pts) {
            CHECK(std::abs(distance(q, c1) - r1) <= tol);
            CHECK(std::abs(distance(q, c2) - r2) <= tol);
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("ccw_leading_intersection examples") {
    const P q = ccw_leading_intersection(P{1.5, 0}, 1.0, P{0, 0}, 1.0);
    CHECK(near(q, P{0.75, std::sqrt(7.0) / 4}, 1e-12));

    CHECK(near(ccw_leading_intersection(P{2, 0}, 1.0, P{0, 0}, 1.0), P{1, 0}, 1e-7));

    const P north = ccw_leading_intersection(P{0, 1.5}, 1.0, P{0, 0}, 1.0);
    CHECK(near(north, P{-std::sqrt(7.0) / 4, 0.75}, 1e-12));

    CHECK_THROWS_AS(ccw_leading_intersection(P{0, 0}, 1.0, P{0, 0}, 1.0), DegenerateInput);
    CHECK_THROWS_AS(ccw_leading_intersection(P{5, 0}, 1.0, P{0, 0}, 1.0), InvariantViolation);
}

TEST_CASE("ccw_leading_intersection matches the 10^6-sample scan on the worked examples") {
    const long double a = oracle::ccw_exit_angle({1.5L, 0}, 1, {0, 0}, 1);
    const P q = ccw_leading_intersection(P{1.5, 0}, 1.0, P{0, 0}, 1.0);
    CHECK(angle_gap(a, std::atan2(q.y, q.x)) < 1e-6);

    const long double b = oracle::ccw_exit_angle({0, 1.5L}, 1, {0, 0}, 1);
    const P r = ccw_leading_intersection(P{0, 1.5}, 1.0, P{0, 0}, 1.0);
    CHECK(angle_gap(b, std::atan2(r.y, r.x)) < 1e-6);
}

TEST_CASE("direction_arc examples") {
    const auto a = direction_arc(P{1, 0}, std::sqrt(2.0) / 2);
    CHECK(a.center_angle == doctest::Approx(0.0));
    CHECK(a.half_width == doctest::Approx(pi<double>() / 4).epsilon(1e-14));

    CHECK(direction_arc(P{1, 0}, 2.0).empty);

    const auto h = direction_arc(P{0, 3}, 0.0);
    CHECK(h.center_angle == doctest::Approx(pi<double>() / 2).epsilon(1e-15));
    CHECK(h.half_width == doctest::Approx(pi<double>() / 2).epsilon(1e-15));

    CHECK(direction_arc(P{1, 0}, -1.0).is_full());
    CHECK_THROWS_AS(direction_arc(P{0, 0}, 0.0), DegenerateInput);
}

TEST_CASE("direction_arc is rotation equivariant") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    std::uniform_real_distribution<double> rot(0, two_pi<double>());
    for (int k = 0; k < 2000; ++k) {
        const P a{u(rng) * 3, u(rng) * 3};
        const double c = u(rng) * norm(a) * 0.99;
        const double phi = rot(rng);
        const P ra{std::cos(phi) * a.x - std::sin(phi) * a.y, std::sin(phi) * a.x + std::cos(phi) * a.y};
        const auto s = direction_arc(a, c);
        const auto t = direction_arc(ra, c);
        CHECK(std::abs(t.half_width - s.half_width) <= 1e-12);
        CHECK(angle_gap(t.center_angle, s.center_angle + phi) <= 1e-12);
    }
}

TEST_CASE("arcs_intersect examples") {
    const double p = pi<double>();
    using A = DirectionArc<double>;
    CHECK(arcs_intersect(A{0, p / 4}, A{p / 2, p / 4}));
    CHECK_FALSE(arcs_intersect(A{0, p / 8}, A{p, p / 8}));
    CHECK(arcs_intersect(A{2 * p - 0.1, 0.2}, A{0.05, 0.01}));
    CHECK_FALSE(arcs_intersect(A::none(), A::full()));
    CHECK(arcs_intersect(A::full(), A{1.0, 0.0}));
}

TEST_CASE("arcs_intersect agrees with a 10^5 direction scan away from the boundary") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> center(0, two_pi<double>());
    std::uniform_real_distribution<double> width(0, 1.5);
    constexpr std::size_t n = 100000;
    const double step = two_pi<double>() / n;
    int compared = 0;
    while (compared < 300) {
        const DirectionArc<double> s{center(rng), width(rng), false};
        const DirectionArc<double> t{center(rng), width(rng), false};
        double d = std::fmod(std::abs(s.center_angle - t.center_angle), two_pi<double>());
        d = std::min(d, two_pi<double>() - d);
        if (std::abs(d - (s.half_width + t.half_width)) < 1e-4) continue;
        bool any = false;
        for (std::size_t j = 0; j < n && !any; ++j) {
            const double a = step * static_cast<double>(j);
            any = s.contains(a) && t.contains(a);
        }
        CHECK(arcs_intersect(s, t) == any);
        ++compared;
    }
}

TEST_CASE("wrap_angle and segment_distance") {
    CHECK(wrap_angle(-0.5) == doctest::Approx(two_pi<double>() - 0.5));
    CHECK(wrap_angle(two_pi<double>()) == 0.0);
    CHECK(segment_distance(P{0, 1}, P{-1, 0}, P{1, 0}) == 1.0);
    CHECK(segment_distance(P{3, 4}, P{0, 0}, P{0, 0}) == 5.0);
    CHECK(segment_distance(P{5, 0}, P{-1, 0}, P{1, 0}) == 4.0);
}

TEST_CASE("extended precision geometry") {
    using E = Point2<Extended>;
    const auto pts = circle_circle_intersection(E{0, 0}, Extended(1), E{1, 0}, Extended(1));
    REQUIRE(pts.size() == 2);
    using std::abs;
    using std::sqrt;
    CHECK(abs(pts[1].y - sqrt(Extended(3)) / 2) < Extended(1e-30));
}
