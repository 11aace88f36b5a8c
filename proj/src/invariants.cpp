#include "escape/invariants.hpp"

#include "escape/errors.hpp"

#include <cstdio>
#include <future>
#include <limits>

namespace escape {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

template <class Real>
int require_column(const CheckContext<Real>& ctx, int level, const char* check) {
    const int col = ctx.header.column_of(level);
    if (col < 0) {
        throw DomainError(std::string(check) + " needs level " + std::to_string(level) + " recorded in the trace");
    }
    return col;
}

/// Recognizes the samples that sit on a level's times of choice.
template <class Real>
class ChoiceTicks {
public:
    explicit ChoiceTicks(const Real& sigma) : clock_(sigma) {}
    bool at(const Real& t) {
        if (clock_.time_of(next_) < t) {
            next_ = clock_.index_at(t);
            if (clock_.time_of(next_) < t) {
                ++next_;
            }
        }
        if (clock_.time_of(next_) == t) {
            ++next_;
            return true;
        }
        return false;
    }

private:
    PeriodicClock<Real> clock_;
    std::int64_t next_ = 0;
};

/// Smallest observed (bound - value); negative means violated.
struct Worst {
    double margin = std::numeric_limits<double>::infinity();
    void observe(double m) {
        if (m < margin) margin = m;
    }
    std::string str() const { return std::isinf(margin) ? "n/a" : num(margin); }
};

template <class Real>
class SafetyChecker final : public TraceChecker<Real> {
public:
    explicit SafetyChecker(const CheckContext<Real>& ctx)
        : n_(ctx.level()), col_(require_column(ctx, n_, "check_safety")), s_(ctx.slack()), ticks_(ctx.top().sigma_n) {
        verdict_.name = "safety";
        for (int i = 0; i < n_; ++i) {
            half_c_.push_back(ctx.cascade[static_cast<std::size_t>(i)].c_n / 2);
            closest_.push_back(std::numeric_limits<double>::infinity());
        }
        if (n_ >= 2) {
            const auto& ps = ctx.top();
            r_ = *ps.r;
            sigma_ = ps.sigma_n;
            wide_ = (Real(3) + ps.eps_n) * ps.sigma_n;
        }
    }

    void sample(const TraceSample<Real>& s, std::size_t index) override {
        const Point2<Real>& m = s.man[static_cast<std::size_t>(col_)];
        const double t = to_double(s.t);
        const bool choice = ticks_.at(s.t);
        for (int i = 0; i < n_; ++i) {
            const Real d = distance(m, s.lions[static_cast<std::size_t>(i)]);
            const double margin = to_double(Real(d - (half_c_[static_cast<std::size_t>(i)] - s_)));
            closest_[static_cast<std::size_t>(i)] = std::min(closest_[static_cast<std::size_t>(i)], to_double(d));
            margin_c_.observe(margin);
            if (!(margin > 0.0)) {
                verdict_.fail_at(t, index);
                note("(c) lion " + std::to_string(i + 1) + " within c_i/2 - s at t = " + num(t));
            }
        }
        if (n_ < 2) {
            return;
        }
        const Real d = distance(m, s.lions[static_cast<std::size_t>(n_ - 1)]);
        if (choice) {
            const double ma = to_double(Real(d - (r_ - sigma_))) + kTol;
            margin_a_.observe(ma);
            if (ma < 0.0) {
                verdict_.fail_at(t, index);
                note("(a) time of choice closer than r - sigma at t = " + num(t));
            }
            if (prev_move_ == MoveKind::Avoidance) {
                const double mb = to_double(Real(r_ + sigma_ - d)) + kTol;
                margin_b_.observe(mb);
                if (mb < 0.0) {
                    verdict_.fail_at(t, index);
                    note("(b) farther than r + sigma after an avoidance move at t = " + num(t));
                }
            }
            prev_move_ = s.move;
        }
        const double md = to_double(Real(d - (r_ - wide_ - s_)));
        margin_d_.observe(md);
        if (md < 0.0) {
            verdict_.fail_at(t, index);
            note("(d) closer than r - (3+eps)sigma - s at t = " + num(t));
        }
        if (s.move == MoveKind::Avoidance) {
            const double mu = to_double(Real(r_ + wide_ + s_ - d));
            margin_d_.observe(mu);
            if (mu < 0.0) {
                verdict_.fail_at(t, index);
                note("(d) avoidance farther than r + (3+eps)sigma + s at t = " + num(t));
            }
        }
    }

    Verdict finish() override {
        verdict_.measured_margin = std::min({margin_a_.margin, margin_b_.margin, margin_c_.margin, margin_d_.margin});
        std::string d;
        double d_n = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n_; ++i) {
            const double hc = to_double(half_c_[static_cast<std::size_t>(i)]);
            d_n = std::min(d_n, hc);
            d += "lion " + std::to_string(i + 1) + ": min distance " + num(closest_[static_cast<std::size_t>(i)]) +
                 ", c_i/2 " + num(hc) + "; ";
        }
        d += "d_n " + num(d_n) + "; s " + num(to_double(s_)) + "; margins (a) " + margin_a_.str() + " (b) " +
             margin_b_.str() + " (c) " + margin_c_.str() + " (d) " + margin_d_.str();
        if (!first_note_.empty()) {
            d += "; first violation " + first_note_;
        }
        verdict_.details = d;
        return verdict_;
    }

private:
    static constexpr double kTol = 1e-12;
    void note(const std::string& what) {
        if (first_note_.empty()) first_note_ = what;
    }

    int n_;
    int col_;
    Real s_;
    ChoiceTicks<Real> ticks_;
    std::vector<Real> half_c_;
    std::vector<double> closest_;
    Real r_{};
    Real sigma_{};
    Real wide_{};
    std::optional<MoveKind> prev_move_;
    Worst margin_a_, margin_b_, margin_c_, margin_d_;
    std::string first_note_;
    Verdict verdict_;
};

template <class Real>
bool same_goal(const std::optional<Point2<Real>>& a, const std::optional<Point2<Real>>& b) {
    return a.has_value() == b.has_value() && (!a || *a == *b);
}

template <class Real>
class MoveGrammarChecker final : public TraceChecker<Real> {
public:
    explicit MoveGrammarChecker(const CheckContext<Real>& ctx)
        : col_(require_column(ctx, ctx.level(), "check_move_grammar")),
          step_(ctx.top().step()),
          ticks_(ctx.top().sigma_n) {
        verdict_.name = "move_grammar";
    }

    void sample(const TraceSample<Real>& s, std::size_t index) override {
        if (!same_goal(s.goal, last_goal_)) {
            pending_.reset();
        }
        last_goal_ = s.goal;
        if (!ticks_.at(s.t)) {
            return;
        }
        const Point2<Real>& m = s.man[static_cast<std::size_t>(col_)];
        if (pending_ && prev_man_ && goal_reached(*prev_man_, m, *pending_, step_)) {
            pending_.reset();
        }
        const double t = to_double(s.t);
        if (prev_ == MoveKind::Avoidance && s.move == MoveKind::Free) {
            verdict_.fail_at(t, index);
            note("avoidance followed by a free move at t = " + num(t));
        }
        if (s.move == MoveKind::Avoidance && pending_) {
            verdict_.fail_at(t, index);
            note("avoidance after an escape before its goal was reached or changed at t = " + num(t));
        }
        if (s.move == MoveKind::Escape) {
            pending_ = s.goal;
        }
        ++counts_[static_cast<std::size_t>(s.move)];
        prev_ = s.move;
        prev_man_ = m;
    }

    Verdict finish() override {
        verdict_.measured_margin = verdict_.pass ? 0.0 : -1.0;
        verdict_.details = "moves F " + std::to_string(counts_[0]) + ", E " + std::to_string(counts_[1]) + ", A " +
                           std::to_string(counts_[2]);
        if (!first_note_.empty()) {
            verdict_.details += "; first violation " + first_note_;
        }
        return verdict_;
    }

private:
    void note(const std::string& what) {
        if (first_note_.empty()) first_note_ = what;
    }

    int col_;
    Real step_;
    ChoiceTicks<Real> ticks_;
    std::optional<MoveKind> prev_;
    std::optional<Point2<Real>> prev_man_;
    std::optional<Point2<Real>> pending_;
    std::optional<Point2<Real>> last_goal_;
    std::int64_t counts_[3] = {0, 0, 0};
    std::string first_note_;
    Verdict verdict_;
};

template <class Real>
class AvoidanceDurationChecker final : public TraceChecker<Real> {
public:
    explicit AvoidanceDurationChecker(const CheckContext<Real>& ctx)
        : active_(ctx.level() >= 2), ticks_(ctx.top().sigma_n) {
        verdict_.name = "avoidance_duration";
        if (active_) {
            col_ = require_column(ctx, ctx.level(), "check_avoidance_duration");
            const auto& ps = ctx.top();
            limit_ = ceil_to_int(Real(*ps.tau / ps.sigma_n)) + 1;
            rho_prime_ = *ps.rho_prime;
        }
    }

    void sample(const TraceSample<Real>& s, std::size_t index) override {
        if (!active_) {
            return;
        }
        if (!same_goal(s.goal, last_goal_)) {
            run_ = 0;
        }
        last_goal_ = s.goal;
        if (s.goal && distance(s.man[static_cast<std::size_t>(col_)], *s.goal) < rho_prime_) {
            run_ = 0;
        }
        if (!ticks_.at(s.t)) {
            return;
        }
        if (s.move != MoveKind::Avoidance) {
            run_ = 0;
            return;
        }
        ++run_;
        longest_ = std::max(longest_, run_);
        if (run_ > limit_) {
            verdict_.fail_at(to_double(s.t), index);
        }
    }

    Verdict finish() override {
        if (!active_) {
            verdict_.details = "level 1 makes no avoidance moves";
            return verdict_;
        }
        verdict_.measured_margin = static_cast<double>(limit_ - longest_);
        verdict_.details = "max avoidance run " + std::to_string(longest_) + " steps, limit " + std::to_string(limit_);
        return verdict_;
    }

private:
    bool active_;
    int col_ = 0;
    ChoiceTicks<Real> ticks_;
    std::int64_t limit_ = 0;
    Real rho_prime_{};
    std::int64_t run_ = 0;
    std::int64_t longest_ = 0;
    std::optional<Point2<Real>> last_goal_;
    Verdict verdict_;
};

template <class Real>
class GoalAdherenceChecker final : public TraceChecker<Real> {
public:
    explicit GoalAdherenceChecker(const CheckContext<Real>& ctx) {
        verdict_.name = "goal_adherence";
        if (ctx.level() < 2) {
            throw DomainError("check_goal_adherence needs a level >= 2 trace");
        }
        col_ = require_column(ctx, ctx.level(), "check_goal_adherence");
        lower_ = require_column(ctx, ctx.level() - 1, "check_goal_adherence");
        const auto& ps = ctx.top();
        clock_ = PeriodicClock<Real>(ctx.cascade[static_cast<std::size_t>(ctx.level() - 2)].sigma_n, *ps.p);
        const Real s = ctx.slack();
        const Real drift = (Real(1) + ps.eps_n) * *ps.tau;
        rho_prime_ = *ps.rho_prime;
        near_bound_ = rho_prime_ + drift + s;
        tube_bound_ = rho_prime_ + Real(2) * drift + s;
    }

    void sample(const TraceSample<Real>& s, std::size_t index) override {
        const double t = to_double(s.t);
        const Point2<Real>& m = s.man[static_cast<std::size_t>(col_)];
        if (!s.goal) {
            verdict_.fail_at(t, index);
            note("sample without a goal at t = " + num(t));
            return;
        }
        if (!started_) {
            started_ = true;
            index_ = clock_.index_at(s.t);
            open(s, s.man[static_cast<std::size_t>(lower_)]);
        } else if (clock_.time_of(index_ + 1) <= s.t) {
            const Real end = clock_.time_of(index_ + 1);
            const Point2<Real> m_end = s.t == end ? m : lerp(prev_t_, prev_man_, s.t, m, end);
            const double mc = to_double(Real(near_bound_ - distance(m_end, goal_)));
            margin_c_.observe(mc);
            ++closed_;
            if (mc < 0.0) {
                verdict_.fail_at(t, index);
                note("(c) interval " + std::to_string(index_) + " ends too far from its goal");
            }
            index_ = clock_.index_at(s.t);
            const Real begin = clock_.time_of(index_);
            const Point2<Real>& low = s.man[static_cast<std::size_t>(lower_)];
            open(s, s.t == begin ? low : lerp(prev_t_, prev_lower_, s.t, low, begin));
        } else if (!(*s.goal == goal_)) {
            verdict_.fail_at(t, index);
            note("goal changed inside interval " + std::to_string(index_));
        }
        const Real dg = distance(m, goal_);
        if (reached_) {
            const double ma = to_double(Real(near_bound_ - dg));
            margin_a_.observe(ma);
            if (ma < 0.0) {
                verdict_.fail_at(t, index);
                note("(a) left the goal neighbourhood at t = " + num(t));
            }
        }
        if (dg <= rho_prime_) {
            reached_ = true;
        }
        const double mb = to_double(Real(tube_bound_ - segment_distance(m, begin_point_, goal_)));
        margin_b_.observe(mb);
        if (mb < 0.0) {
            verdict_.fail_at(t, index);
            note("(b) outside the tube around the lower segment at t = " + num(t));
        }
        prev_t_ = s.t;
        prev_man_ = m;
        prev_lower_ = s.man[static_cast<std::size_t>(lower_)];
    }

    Verdict finish() override {
        verdict_.measured_margin = std::min({margin_a_.margin, margin_b_.margin, margin_c_.margin});
        verdict_.details = std::to_string(closed_) + " complete intervals; margins (a) " + margin_a_.str() + " (b) " +
                           margin_b_.str() + " (c) " + margin_c_.str() + "; final interval " +
                           std::to_string(index_) + " unchecked for (c)";
        if (!first_note_.empty()) {
            verdict_.details += "; first violation " + first_note_;
        }
        return verdict_;
    }

private:
    static Point2<Real> lerp(const Real& t0, const Point2<Real>& a, const Real& t1, const Point2<Real>& b,
                             const Real& t) {
        if (!(t1 > t0)) return b;
        const Real f = (t - t0) / (t1 - t0);
        return a + f * (b - a);
    }
    void open(const TraceSample<Real>& s, const Point2<Real>& begin_point) {
        begin_point_ = begin_point;
        goal_ = *s.goal;
        reached_ = false;
    }
    void note(const std::string& what) {
        if (first_note_.empty()) first_note_ = what;
    }

    int col_ = 0;
    int lower_ = 0;
    PeriodicClock<Real> clock_;
    Real rho_prime_{}, near_bound_{}, tube_bound_{};
    bool started_ = false;
    std::int64_t index_ = 0;
    std::int64_t closed_ = 0;
    Point2<Real> begin_point_, goal_;
    bool reached_ = false;
    Real prev_t_{};
    Point2<Real> prev_man_, prev_lower_;
    Worst margin_a_, margin_b_, margin_c_;
    std::string first_note_;
    Verdict verdict_;
};

/// max over samples of |M_a(t) - M_b(t)| against a fixed bound.
template <class Real>
class GapChecker final : public TraceChecker<Real> {
public:
    GapChecker(std::string name, int col_a, int col_b, Real bound, std::string bound_text)
        : col_a_(col_a), col_b_(col_b), bound_(bound), bound_text_(std::move(bound_text)) {
        verdict_.name = std::move(name);
    }

    void sample(const TraceSample<Real>& s, std::size_t index) override {
        const Real gap = distance(s.man[static_cast<std::size_t>(col_a_)], s.man[static_cast<std::size_t>(col_b_)]);
        if (gap > largest_) {
            largest_ = gap;
        }
        if (gap > bound_) {
            verdict_.fail_at(to_double(s.t), index);
        }
    }

    Verdict finish() override {
        verdict_.measured_margin = to_double(Real(bound_ - largest_));
        verdict_.details = "max gap " + num(to_double(largest_)) + ", bound " + bound_text_;
        return verdict_;
    }

private:
    int col_a_, col_b_;
    Real bound_;
    std::string bound_text_;
    Real largest_{0};
    Verdict verdict_;
};

}  // namespace

template <class Real>
CheckContext<Real> context_of(const Trace<Real>& trace) {
    return {trace.header, trace.cascade, trace.max_spacing()};
}

template <class Real>
CanonicalInterval<Real> canonical_interval(const ParameterSet<Real>& ps, const StrategyState<Real>& lower,
                                           std::int64_t index) {
    if (!ps.p) {
        throw DomainError("canonical intervals need a level >= 2 parameter set");
    }
    const PeriodicClock<Real> clock(lower.sigma(), *ps.p);
    CanonicalInterval<Real> out;
    out.index = index;
    out.begin = clock.time_of(index);
    out.end = clock.time_of(index + 1);
    out.goal = milestone_goal(out.begin, lower, *ps.p).point;
    return out;
}

template <class Real>
std::unique_ptr<TraceChecker<Real>> make_safety_checker(const CheckContext<Real>& ctx) {
    return std::make_unique<SafetyChecker<Real>>(ctx);
}

template <class Real>
std::unique_ptr<TraceChecker<Real>> make_move_grammar_checker(const CheckContext<Real>& ctx) {
    return std::make_unique<MoveGrammarChecker<Real>>(ctx);
}

template <class Real>
std::unique_ptr<TraceChecker<Real>> make_avoidance_duration_checker(const CheckContext<Real>& ctx) {
    return std::make_unique<AvoidanceDurationChecker<Real>>(ctx);
}

template <class Real>
std::unique_ptr<TraceChecker<Real>> make_goal_adherence_checker(const CheckContext<Real>& ctx) {
    return std::make_unique<GoalAdherenceChecker<Real>>(ctx);
}

template <class Real>
std::unique_ptr<TraceChecker<Real>> make_deviation_checker(const CheckContext<Real>& ctx) {
    const int n = ctx.level();
    if (n < 2) {
        throw DomainError("check_deviation needs a level >= 2 trace");
    }
    const Real delta = *ctx.top().delta_n;
    return std::make_unique<GapChecker<Real>>("deviation", require_column(ctx, n - 1, "check_deviation"),
                                              require_column(ctx, n, "check_deviation"), delta + ctx.slack(),
                                              "delta_" + std::to_string(n) + " + s = " + num(to_double(delta)) +
                                                  " + " + num(to_double(ctx.slack())));
}

template <class Real>
std::unique_ptr<TraceChecker<Real>> make_cauchy_checker(const CheckContext<Real>& ctx, int n, int m) {
    if (n < 1 || m < n || m > ctx.level()) {
        throw DomainError("check_cauchy needs 1 <= n <= m <= trace level");
    }
    const std::vector<Real> deltas = active_deltas(ctx.cascade);
    const Real tail = m == n ? Real(0) : truncation_bound<Real>(deltas, n, m);
    const Real bound = m == n ? Real(0) : tail + ctx.slack();
    return std::make_unique<GapChecker<Real>>(
        "cauchy(" + std::to_string(n) + "," + std::to_string(m) + ")", require_column(ctx, n, "check_cauchy"),
        require_column(ctx, m, "check_cauchy"), bound,
        "truncation bound " + num(to_double(tail)) + " + s " + num(to_double(ctx.slack())));
}

template <class Real>
std::vector<std::unique_ptr<TraceChecker<Real>>> default_checkers(const CheckContext<Real>& ctx) {
    std::vector<std::unique_ptr<TraceChecker<Real>>> out;
    out.push_back(make_safety_checker(ctx));
    out.push_back(make_move_grammar_checker(ctx));
    const int n = ctx.level();
    if (n >= 2) {
        out.push_back(make_avoidance_duration_checker(ctx));
        if (ctx.header.column_of(n - 1) >= 0) {
            out.push_back(make_goal_adherence_checker(ctx));
            out.push_back(make_deviation_checker(ctx));
            out.push_back(make_cauchy_checker(ctx, n - 1, n));
        }
    }
    return out;
}

namespace {

template <class Real>
Verdict run_one(const Trace<Real>& trace, std::unique_ptr<TraceChecker<Real>> checker) {
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        checker->sample(trace.samples[i], i);
    }
    return checker->finish();
}

}  // namespace

template <class Real>
Verdict check_safety(const Trace<Real>& trace) {
    return run_one(trace, make_safety_checker(context_of(trace)));
}
template <class Real>
Verdict check_move_grammar(const Trace<Real>& trace) {
    return run_one(trace, make_move_grammar_checker(context_of(trace)));
}
template <class Real>
Verdict check_avoidance_duration(const Trace<Real>& trace) {
    return run_one(trace, make_avoidance_duration_checker(context_of(trace)));
}
template <class Real>
Verdict check_goal_adherence(const Trace<Real>& trace) {
    return run_one(trace, make_goal_adherence_checker(context_of(trace)));
}
template <class Real>
Verdict check_deviation(const Trace<Real>& trace) {
    return run_one(trace, make_deviation_checker(context_of(trace)));
}
template <class Real>
Verdict check_cauchy(const Trace<Real>& trace, int n, int m) {
    return run_one(trace, make_cauchy_checker(context_of(trace), n, m));
}

template <class Real>
std::vector<Verdict> check_all(const Trace<Real>& trace) {
    auto checkers = default_checkers(context_of(trace));
    std::vector<std::future<Verdict>> jobs;
    for (auto& c : checkers) {
        jobs.push_back(std::async(std::launch::async, [&trace, c = std::move(c)]() mutable {
            return run_one(trace, std::move(c));
        }));
    }
    std::vector<Verdict> out;
    for (auto& j : jobs) {
        out.push_back(j.get());
    }
    return out;
}

#define ESCAPE_INSTANTIATE_INVARIANTS(Real)                                                                        \
    template CheckContext<Real> context_of<Real>(const Trace<Real>&);                                           \
    template CanonicalInterval<Real> canonical_interval<Real>(const ParameterSet<Real>&, const StrategyState<Real>&, \
                                                              std::int64_t);                                    \
    template std::unique_ptr<TraceChecker<Real>> make_safety_checker<Real>(const CheckContext<Real>&);           \
    template std::unique_ptr<TraceChecker<Real>> make_move_grammar_checker<Real>(const CheckContext<Real>&);     \
    template std::unique_ptr<TraceChecker<Real>> make_avoidance_duration_checker<Real>(const CheckContext<Real>&); \
    template std::unique_ptr<TraceChecker<Real>> make_goal_adherence_checker<Real>(const CheckContext<Real>&);   \
    template std::unique_ptr<TraceChecker<Real>> make_deviation_checker<Real>(const CheckContext<Real>&);        \
    template std::unique_ptr<TraceChecker<Real>> make_cauchy_checker<Real>(const CheckContext<Real>&, int, int); \
    template std::vector<std::unique_ptr<TraceChecker<Real>>> default_checkers<Real>(const CheckContext<Real>&); \
    template Verdict check_safety<Real>(const Trace<Real>&);                                                    \
    template Verdict check_move_grammar<Real>(const Trace<Real>&);                                              \
    template Verdict check_avoidance_duration<Real>(const Trace<Real>&);                                        \
    template Verdict check_goal_adherence<Real>(const Trace<Real>&);                                            \
    template Verdict check_deviation<Real>(const Trace<Real>&);                                                 \
    template Verdict check_cauchy<Real>(const Trace<Real>&, int, int);                                          \
    template std::vector<Verdict> check_all<Real>(const Trace<Real>&);

ESCAPE_INSTANTIATE_INVARIANTS(double)
ESCAPE_INSTANTIATE_INVARIANTS(Extended)

}  // namespace escape
