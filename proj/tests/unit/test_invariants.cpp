#include "doctest.h"

#include "../support/corpus.hpp"

using namespace escape;
using P = Point2<double>;

namespace {

const Trace<double>& engagement_trace() {
    static const Trace<double> tr = run<double>(fixtures::engagement());
    return tr;
}

std::size_t count(const Trace<double>& tr, MoveKind k) {
    std::size_t n = 0;
    for (const auto& s : tr.samples) n += s.move == k;
    return n;
}

}  // namespace

TEST_CASE("engagement trace passes every checker and exercises all move kinds") {
    const auto& tr = engagement_trace();
    CHECK(count(tr, MoveKind::Escape) > 0);
    CHECK(count(tr, MoveKind::Avoidance) > 0);
    const auto verdicts = check_all(tr);
    CHECK(verdicts.size() == 6);
    for (const auto& v : verdicts) {
        CHECK_MESSAGE(v.pass, v.name << ": " << v.details);
        CHECK(v.pass == !v.first_violation_time.has_value());
        CHECK(v.measured_margin >= 0.0);
    }
}

TEST_CASE("streaming checkers agree with the in-memory ones") {
    const auto streamed = fixtures::run_checked<double>(fixtures::engagement());
    const auto stored = check_all(engagement_trace());
    REQUIRE(streamed.size() == stored.size());
    for (std::size_t i = 0; i < stored.size(); ++i) {
        CHECK(streamed[i].name == stored[i].name);
        CHECK(streamed[i].pass == stored[i].pass);
    }
}

TEST_CASE("checkers are pure") {
    const auto a = check_all(engagement_trace());
    const auto b = check_all(engagement_trace());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].pass == b[i].pass);
        CHECK(a[i].measured_margin == b[i].measured_margin);
        CHECK(a[i].details == b[i].details);
    }
}

TEST_CASE("level-1 safety against a stationary lion") {
    GameConfig c;
    c.start.eps = 0.5;
    c.start.man_start = {0, 0};
    c.start.lion_starts = {{-1, 0}};
    c.controllers = {Stationary{}};
    c.horizon.time = 4.0;
    const auto tr = run<double>(c);
    const Verdict v = check_safety(tr);
    CHECK(v.pass);
    CHECK(v.measured_margin >= 0.5 - 1e-9);
    double prev = 0.0;
    for (const auto& s : tr.samples) {
        const double d = distance(s.man[0], s.lions[0]);
        CHECK(d > prev);
        prev = d;
    }
    CHECK(check_move_grammar(tr).pass);
    CHECK_THROWS_AS(check_deviation(tr), DomainError);
}

TEST_CASE("move grammar on hand-labelled sequences") {
    Trace<double> tr = corpus::base_trace(8);
    const auto ch = corpus::choice_samples(tr);
    SUBCASE("A, A, E, F, F passes") {
        const MoveKind seq[] = {MoveKind::Avoidance, MoveKind::Avoidance, MoveKind::Escape, MoveKind::Free,
                                MoveKind::Free};
        for (std::size_t i = 0; i < 5; ++i) corpus::label(tr, ch[i], ch[i + 1], seq[i]);
        CHECK(check_move_grammar(tr).pass);
    }
    SUBCASE("A, F fails") {
        corpus::label(tr, ch[0], ch[1], MoveKind::Avoidance);
        const Verdict v = check_move_grammar(tr);
        CHECK_FALSE(v.pass);
        CHECK(v.first_violation_sample == ch[1]);
    }
}

TEST_CASE("avoidance duration passes vacuously without avoidance moves") {
    const Trace<double> tr = corpus::base_trace(20);
    CHECK(count(tr, MoveKind::Avoidance) == 0);
    const Verdict v = check_avoidance_duration(tr);
    CHECK(v.pass);
}

TEST_CASE("deviation and cauchy") {
    const auto& tr = engagement_trace();
    CHECK(distance(tr.samples[0].man[0], tr.samples[0].man[1]) == 0.0);
    const Verdict same = check_cauchy(tr, 2, 2);
    CHECK(same.pass);
    CHECK(same.measured_margin == 0.0);
    const Verdict c = check_cauchy(tr, 1, 2);
    CHECK(c.pass);
    CHECK(c.measured_margin > 0.0);
    CHECK_THROWS_AS(check_cauchy(tr, 2, 3), DomainError);
}

TEST_CASE("goal adherence skips the unfinished last interval") {
    GameConfig c = fixtures::engagement();
    const auto cascade = derive_cascade<double>(c.start, 2);
    c = fixtures::with_time(c, 0.1 + 0.5 * cascade[0].sigma_n / static_cast<double>(*cascade[1].p));
    const auto tr = run<double>(c);
    const Verdict v = check_goal_adherence(tr);
    CHECK_MESSAGE(v.pass, v.details);
    CHECK(v.details.rfind("1 complete intervals", 0) == 0);
}

TEST_CASE("canonical intervals") {
    Engine<double> e(fixtures::engagement(PurePursuit{}, 1));
    TraceCollector<double> col;
    e.run(col);
    const auto& ps = e.cascade()[1];
    for (std::int64_t i = 0; i < 10; ++i) {
        const auto iv = canonical_interval(ps, e.path(1), i);
        CHECK(iv.end - iv.begin == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(distance(iv.goal, evaluate(e.path(1), iv.end)) < 1e-15);
    }
}

TEST_CASE("every checker fails on its constructed violation") {
    const auto cases = corpus::violation_corpus();
    CHECK(cases.size() == 7);
    for (const auto& c : cases) {
        CAPTURE(c.description);
        const Verdict v = c.check(c.trace);
        CHECK(v.name == c.checker);
        CHECK_FALSE(v.pass);
        REQUIRE(v.first_violation_sample.has_value());
        CHECK(*v.first_violation_sample == c.expected_sample);
        CHECK(*v.first_violation_time == c.trace.samples[c.expected_sample].t);
    }
}

TEST_CASE("the unmutated corpus base trace passes") {
    for (const auto& v : check_all(corpus::base_trace(64))) {
        CHECK_MESSAGE(v.pass, v.name << ": " << v.details);
    }
}
