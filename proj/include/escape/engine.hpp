#pragma once

#include "escape/adversaries.hpp"
#include "escape/params.hpp"
#include "escape/strategy.hpp"

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace escape {

/// Run length, either in time units or in canonical intervals of the top level
/// (milestone periods sigma_{n-1}/p_n; sigma_1 at level 1).
struct Horizon {
    std::optional<double> time;
    std::optional<std::int64_t> intervals;
};

struct GameConfig {
    StartConfiguration start;
    int level_n = 1;
    std::vector<LionController> controllers;  // one per lion start
    Horizon horizon;
    int substep_factor = 16;
    Precision precision = Precision::Standard;
    std::optional<std::vector<double>> delta_override;
    std::vector<int> record_levels;  // empty means every level 1..level_n

    void validate() const;
    /// Ascending, always containing level_n.
    std::vector<int> recorded_levels() const;
    CascadeOptions cascade_options() const { return {delta_override}; }
};

struct TraceHeader {
    int level_n = 1;
    std::vector<int> levels;  // recorded man levels, ascending
    std::size_t lion_count = 0;

    /// Index into TraceSample::man, or -1 when the level was not recorded.
    int column_of(int level) const;
};

template <class Real>
struct TraceSample {
    Real t{};
    std::vector<Point2<Real>> man;  // per recorded level, ascending
    MoveKind move = MoveKind::Free;
    std::optional<Point2<Real>> goal;  // level-n goal; empty at level 1
    std::vector<Point2<Real>> lions;
};

struct CaptureEvent {
    double t = 0.0;
    std::size_t lion = 0;  // 1-based
    double distance = 0.0;
};

/// A whole run held in memory.
template <class Real>
struct Trace {
    TraceHeader header;
    std::vector<TraceSample<Real>> samples;
    Cascade<Real> cascade;
    std::string config_digest;
    std::optional<CaptureEvent> capture;

    Real max_spacing() const;
};

template <class Real>
class TraceSink {
public:
    virtual ~TraceSink() = default;
    virtual void begin(const TraceHeader&) {}
    virtual void sample(const TraceSample<Real>& s) = 0;
    virtual void capture(const CaptureEvent&) {}
    virtual void end() {}
};

template <class Real>
class TraceCollector final : public TraceSink<Real> {
public:
    void begin(const TraceHeader& h) override { trace_.header = h; }
    void sample(const TraceSample<Real>& s) override { trace_.samples.push_back(s); }
    void capture(const CaptureEvent& c) override { trace_.capture = c; }
    Trace<Real>& trace() { return trace_; }

private:
    Trace<Real> trace_;
};

template <class Real>
class TeeSink final : public TraceSink<Real> {
public:
    explicit TeeSink(std::vector<TraceSink<Real>*> sinks) : sinks_(std::move(sinks)) {}
    void begin(const TraceHeader& h) override {
        for (auto* s : sinks_) s->begin(h);
    }
    void sample(const TraceSample<Real>& x) override {
        for (auto* s : sinks_) s->sample(x);
    }
    void capture(const CaptureEvent& c) override {
        for (auto* s : sinks_) s->capture(c);
    }
    void end() override {
        for (auto* s : sinks_) s->end();
    }

private:
    std::vector<TraceSink<Real>*> sinks_;
};

struct RunStats {
    std::int64_t events = 0;
    std::int64_t samples = 0;
    std::int64_t lion_steps = 0;
    std::vector<std::int64_t> decisions;  // per level
    std::vector<std::int64_t> moves_by_kind = {0, 0, 0};  // top level: free, escape, avoidance
    std::optional<CaptureEvent> capture;
};

/// Deterministic discrete-event run of the man's level-n strategy against
/// the configured lions. Clocks merged: level-k times of choice i*sigma_k,
/// milestone boundaries j*sigma_{k-1}/p_k, lion sub-steps m*sigma_n/K.
/// At equal times: lower-level commits, then higher levels, then lions,
/// then one sample.
template <class Real>
class Engine {
public:
    explicit Engine(GameConfig config);
    Engine(GameConfig config, Cascade<Real> cascade);
    ~Engine();

    const GameConfig& config() const { return config_; }
    const Cascade<Real>& cascade() const { return cascade_; }
    const TraceHeader& header() const { return header_; }
    Real horizon_time() const { return horizon_; }
    /// Largest gap between consecutive samples.
    Real max_sample_spacing() const;
    const Real& now() const { return now_; }
    const StrategyState<Real>& path(int level) const;
    const RunStats& stats() const { return stats_; }

    void run(TraceSink<Real>& sink);

    /// Lion positions at t <= now(), interpolated inside a sub-step. Later
    /// times throw CausalityError; times older than the retained history
    /// throw SchedulingError.
    std::vector<Point2<Real>> observe_lions(const Real& t) const;

private:
    struct LionLeg {
        Real t0{};
        Real t1{};
        std::vector<Point2<Real>> from;
        std::vector<Point2<Real>> to;
    };
    class ManView;

    Point2<Real> position(int level, const Real& t) const;
    Goal<Real> top_goal(const Real& t) const;
    void observe_into(const Real& t, std::vector<Point2<Real>>& out) const;
    void step_lions(std::int64_t index);
    void fill_sample(const Real& t);
    bool check_capture(const Real& t, TraceSink<Real>& sink);

    GameConfig config_;
    Cascade<Real> cascade_;
    TraceHeader header_;
    Real horizon_{};
    Real now_{};
    std::vector<StrategyState<Real>> paths_;
    std::vector<PeriodicClock<Real>> milestone_clocks_;  // index k-2 for level k
    std::vector<std::int64_t> milestone_next_;
    PeriodicClock<Real> lion_clock_;
    std::int64_t lion_next_ = 0;
    std::deque<LionLeg> legs_;  // most recent last
    std::vector<Point2<Real>> lion_buffer_;
    TraceSample<Real> sample_;
    RunStats stats_;
    bool ran_ = false;
    double capture_tolerance_ = 0.0;
};

template <class Real>
Trace<Real> run(const GameConfig& config);

}  // namespace escape
