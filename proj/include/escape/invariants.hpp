#pragma once

#include "escape/engine.hpp"
#include "escape/verdict.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace escape {

/// What every checker needs besides the samples themselves.
template <class Real>
struct CheckContext {
    TraceHeader header;
    Cascade<Real> cascade;  // levels 1..n
    Real spacing{};         // largest gap between consecutive samples

    int level() const { return header.level_n; }
    const ParameterSet<Real>& top() const { return cascade.at(static_cast<std::size_t>(level() - 1)); }
    /// (2 + eps_n) * spacing: how far any man-lion distance can move between samples.
    Real slack() const { return (Real(2) + top().eps_n) * spacing; }
};

template <class Real>
CheckContext<Real> context_of(const Trace<Real>& trace);

/// I_i = [i*P, (i+1)*P) with P = sigma_{n-1}/p_n; its goal is M_{n-1}((i+1)*P).
template <class Real>
struct CanonicalInterval {
    std::int64_t index = 0;
    Real begin{};
    Real end{};
    Point2<Real> goal;
};

template <class Real>
CanonicalInterval<Real> canonical_interval(const ParameterSet<Real>& ps, const StrategyState<Real>& lower,
                                           std::int64_t index);

/// Consumes samples in time order; finish() yields the verdict.
template <class Real>
class TraceChecker {
public:
    virtual ~TraceChecker() = default;
    virtual void sample(const TraceSample<Real>& s, std::size_t index) = 0;
    virtual Verdict finish() = 0;
};

template <class Real>
std::unique_ptr<TraceChecker<Real>> make_safety_checker(const CheckContext<Real>& ctx);
template <class Real>
std::unique_ptr<TraceChecker<Real>> make_move_grammar_checker(const CheckContext<Real>& ctx);
template <class Real>
std::unique_ptr<TraceChecker<Real>> make_avoidance_duration_checker(const CheckContext<Real>& ctx);
template <class Real>
std::unique_ptr<TraceChecker<Real>> make_goal_adherence_checker(const CheckContext<Real>& ctx);
template <class Real>
std::unique_ptr<TraceChecker<Real>> make_deviation_checker(const CheckContext<Real>& ctx);
/// Levels n < m, both recorded; n == m gives a zero bound.
template <class Real>
std::unique_ptr<TraceChecker<Real>> make_cauchy_checker(const CheckContext<Real>& ctx, int n, int m);

/// Safety and move grammar at level 1; at level n >= 2 also avoidance
/// duration, goal adherence, deviation and Cauchy(n-1, n) when level n-1 is
/// recorded.
template <class Real>
std::vector<std::unique_ptr<TraceChecker<Real>>> default_checkers(const CheckContext<Real>& ctx);

/// Runs a set of checkers alongside an engine or a trace reader.
template <class Real>
class CheckerSuite final : public TraceSink<Real> {
public:
    explicit CheckerSuite(std::vector<std::unique_ptr<TraceChecker<Real>>> checkers)
        : checkers_(std::move(checkers)) {}
    void sample(const TraceSample<Real>& s) override {
        for (auto& c : checkers_) {
            c->sample(s, index_);
        }
        ++index_;
    }
    std::vector<Verdict> finish() {
        std::vector<Verdict> out;
        for (auto& c : checkers_) {
            out.push_back(c->finish());
        }
        return out;
    }

private:
    std::vector<std::unique_ptr<TraceChecker<Real>>> checkers_;
    std::size_t index_ = 0;
};

template <class Real>
Verdict check_safety(const Trace<Real>& trace);
template <class Real>
Verdict check_move_grammar(const Trace<Real>& trace);
template <class Real>
Verdict check_avoidance_duration(const Trace<Real>& trace);
template <class Real>
Verdict check_goal_adherence(const Trace<Real>& trace);
template <class Real>
Verdict check_deviation(const Trace<Real>& trace);
template <class Real>
Verdict check_cauchy(const Trace<Real>& trace, int n, int m);

/// The default checkers over one in-memory trace, run concurrently.
template <class Real>
std::vector<Verdict> check_all(const Trace<Real>& trace);

}  // namespace escape
