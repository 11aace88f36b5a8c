#include "escape/engine.hpp"

#include "escape/config.hpp"
#include "escape/errors.hpp"

#include <algorithm>

namespace escape {

void GameConfig::validate() const {
    start.validate();
    if (level_n < 1) {
        throw ConfigError("level must be >= 1");
    }
    if (controllers.size() != start.lion_starts.size()) {
        throw ConfigError("every lion needs exactly one controller");
    }
    if (start.lion_starts.size() < static_cast<std::size_t>(level_n)) {
        throw ConfigError("level " + std::to_string(level_n) + " needs at least " + std::to_string(level_n) +
                          " lions");
    }
    if (horizon.time.has_value() == horizon.intervals.has_value()) {
        throw ConfigError("horizon needs exactly one of time or intervals");
    }
    if (horizon.time && !(*horizon.time >= 0.0 && std::isfinite(*horizon.time))) {
        throw ConfigError("horizon time must be finite and >= 0");
    }
    if (horizon.intervals && *horizon.intervals < 0) {
        throw ConfigError("horizon intervals must be >= 0");
    }
    if (substep_factor < 1) {
        throw ConfigError("substep_factor must be >= 1");
    }
    if (delta_override) {
        for (double d : *delta_override) {
            if (!(d > 0.0)) {
                throw ConfigError("delta_override entries must be positive");
            }
        }
        if (delta_override->size() + 1 < static_cast<std::size_t>(level_n)) {
            throw ConfigError("delta_override needs one entry per level 2..n");
        }
    }
    for (int k : record_levels) {
        if (k < 1 || k > level_n) {
            throw ConfigError("record_levels entries must lie in 1..level");
        }
    }
    for (std::size_t i = 0; i < controllers.size(); ++i) {
        (void)normalize_controller(controllers[i], start.lion_starts[i]);
    }
}

std::vector<int> GameConfig::recorded_levels() const {
    std::vector<int> out = record_levels;
    if (out.empty()) {
        for (int k = 1; k <= level_n; ++k) {
            out.push_back(k);
        }
    }
    out.push_back(level_n);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int TraceHeader::column_of(int level) const {
    const auto it = std::find(levels.begin(), levels.end(), level);
    return it == levels.end() ? -1 : static_cast<int>(it - levels.begin());
}

template <class Real>
Real Trace<Real>::max_spacing() const {
    Real best = Real(0);
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const Real gap = samples[i].t - samples[i - 1].t;
        if (gap > best) {
            best = gap;
        }
    }
    return best;
}

template <class Real>
class Engine<Real>::ManView final : public ManPast<Real> {
public:
    ManView(const Engine& e, const Real& now) : engine_(e), now_(now) {}
    const Real& now() const override { return now_; }
    Point2<Real> position_at(const Real& s) const override {
        if (s > now_) {
            throw CausalityError("lion asked for the man's future position");
        }
        return engine_.position(engine_.config_.level_n, s);
    }
    std::optional<Point2<Real>> goal() const override {
        if (engine_.config_.level_n < 2) {
            return std::nullopt;
        }
        return engine_.top_goal(now_).point;
    }

private:
    const Engine& engine_;
    const Real& now_;
};

namespace {

const GameConfig& validated(const GameConfig& c) {
    c.validate();
    return c;
}

}  // namespace

template <class Real>
Engine<Real>::Engine(GameConfig config)
    : Engine(config, derive_cascade<Real>(validated(config).start, config.level_n, config.cascade_options())) {}

template <class Real>
Engine<Real>::Engine(GameConfig config, Cascade<Real> cascade) : config_(std::move(config)), cascade_(std::move(cascade)) {
    config_.validate();
    for (std::size_t i = 0; i < config_.controllers.size(); ++i) {
        config_.controllers[i] = normalize_controller(config_.controllers[i], config_.start.lion_starts[i]);
    }
    const int n = config_.level_n;
    if (cascade_.size() < static_cast<std::size_t>(n)) {
        throw DomainError("cascade shallower than the strategy level");
    }
    header_.level_n = n;
    header_.levels = config_.recorded_levels();
    header_.lion_count = config_.start.lion_starts.size();

    const Point2<Real> m0 = Point2<Real>::from(config_.start.man_start);
    for (int k = 1; k <= n; ++k) {
        paths_.emplace_back(k, cascade_[static_cast<std::size_t>(k - 1)].sigma_n, m0);
    }
    for (int k = 2; k <= n; ++k) {
        const auto& ps = cascade_[static_cast<std::size_t>(k - 1)];
        milestone_clocks_.emplace_back(cascade_[static_cast<std::size_t>(k - 2)].sigma_n, *ps.p);
        milestone_next_.push_back(0);
    }
    lion_clock_ = PeriodicClock<Real>(cascade_[static_cast<std::size_t>(n - 1)].sigma_n, config_.substep_factor);

    if (config_.horizon.time) {
        horizon_ = Real(*config_.horizon.time);
    } else if (n >= 2) {
        horizon_ = milestone_clocks_.back().time_of(*config_.horizon.intervals);
    } else {
        horizon_ = PeriodicClock<Real>(cascade_[0].sigma_n).time_of(*config_.horizon.intervals);
    }

    LionLeg first;
    for (const auto& l : config_.start.lion_starts) {
        first.from.push_back(Point2<Real>::from(l));
    }
    first.to = first.from;
    legs_.push_back(std::move(first));

    capture_tolerance_ = 1e-12 * std::max(config_.start.max_coordinate_magnitude(), 1e-300);
    stats_.decisions.assign(static_cast<std::size_t>(n), 0);
}

template <class Real>
Engine<Real>::~Engine() = default;

template <class Real>
Real Engine<Real>::max_sample_spacing() const {
    return lion_clock_.period() / Real(lion_clock_.subdivisions());
}

template <class Real>
const StrategyState<Real>& Engine<Real>::path(int level) const {
    return paths_.at(static_cast<std::size_t>(level - 1));
}

template <class Real>
Point2<Real> Engine<Real>::position(int level, const Real& t) const {
    const StrategyState<Real>& s = paths_[static_cast<std::size_t>(level - 1)];
    const std::int64_t ci = s.clock_index();
    if (ci >= 1) {
        const Real start = s.time_of_choice(ci - 1);
        if (start <= t && t < s.horizon()) {
            return s.along(ci - 1, (t - start) / s.sigma());
        }
    }
    return evaluate(s, t);
}

template <class Real>
Goal<Real> Engine<Real>::top_goal(const Real& t) const {
    const int n = config_.level_n;
    return milestone_goal(t, paths_[static_cast<std::size_t>(n - 2)], *cascade_[static_cast<std::size_t>(n - 1)].p);
}

template <class Real>
void Engine<Real>::observe_into(const Real& t, std::vector<Point2<Real>>& out) const {
    if (t > now_) {
        throw CausalityError("lion positions requested in the future");
    }
    for (auto it = legs_.rbegin(); it != legs_.rend(); ++it) {
        if (it->t0 <= t && t <= it->t1) {
            out.resize(it->from.size());
            if (t == it->t0) {
                std::copy(it->from.begin(), it->from.end(), out.begin());
                return;
            }
            const Real f = (t - it->t0) / (it->t1 - it->t0);
            for (std::size_t i = 0; i < out.size(); ++i) {
                out[i] = it->from[i] + f * (it->to[i] - it->from[i]);
            }
            return;
        }
    }
    throw SchedulingError("lion positions requested before the retained history");
}

template <class Real>
std::vector<Point2<Real>> Engine<Real>::observe_lions(const Real& t) const {
    std::vector<Point2<Real>> out;
    observe_into(t, out);
    return out;
}

template <class Real>
void Engine<Real>::step_lions(std::int64_t index) {
    const Real t0 = lion_clock_.time_of(index);
    const Real t1 = lion_clock_.time_of(index + 1);
    const Real h = t1 - t0;
    LionLeg leg;
    if (legs_.size() > static_cast<std::size_t>(2 * config_.substep_factor + 4)) {
        leg = std::move(legs_.front());
        legs_.pop_front();
    }
    observe_into(t0, leg.from);
    leg.to.resize(leg.from.size());
    const ManView view(*this, now_);
    for (std::size_t i = 0; i < leg.from.size(); ++i) {
        leg.to[i] = lion_step(config_.controllers[i], leg.from[i], view, t0, h);
    }
    leg.t0 = t0;
    leg.t1 = t1;
    legs_.push_back(std::move(leg));
    ++stats_.lion_steps;
}

template <class Real>
void Engine<Real>::fill_sample(const Real& t) {
    const int n = config_.level_n;
    sample_.t = t;
    sample_.man.resize(header_.levels.size());
    for (std::size_t i = 0; i < header_.levels.size(); ++i) {
        sample_.man[i] = position(header_.levels[i], t);
    }
    sample_.move = paths_[static_cast<std::size_t>(n - 1)].kinds().back();
    if (n >= 2) {
        sample_.goal = top_goal(t).point;
    } else {
        sample_.goal.reset();
    }
    observe_into(t, sample_.lions);
}

template <class Real>
bool Engine<Real>::check_capture(const Real& t, TraceSink<Real>& sink) {
    const Point2<Real> man = position(config_.level_n, t);
    for (std::size_t i = 0; i < sample_.lions.size(); ++i) {
        const double d = to_double(distance(man, sample_.lions[i]));
        if (d <= capture_tolerance_) {
            CaptureEvent ev{to_double(t), i + 1, d};
            stats_.capture = ev;
            sink.capture(ev);
            return true;
        }
    }
    return false;
}

template <class Real>
void Engine<Real>::run(TraceSink<Real>& sink) {
    if (ran_) {
        throw SchedulingError("an engine runs exactly once");
    }
    ran_ = true;
    const int n = config_.level_n;
    sink.begin(header_);
    bool have_sample = false;
    Real last_sample{};
    while (true) {
        Real next = paths_[0].horizon();
        for (const auto& p : paths_) {
            next = std::min(next, p.horizon());
        }
        for (std::size_t i = 0; i < milestone_clocks_.size(); ++i) {
            next = std::min(next, milestone_clocks_[i].time_of(milestone_next_[i]));
        }
        next = std::min(next, lion_clock_.time_of(lion_next_));
        if (next > horizon_) {
            break;
        }
        now_ = next;
        ++stats_.events;
        for (int k = 1; k <= n; ++k) {
            StrategyState<Real>& s = paths_[static_cast<std::size_t>(k - 1)];
            if (s.horizon() == now_) {
                observe_into(now_, lion_buffer_);
                const Decision<Real> d = commit_next(s, cascade_[static_cast<std::size_t>(k - 1)],
                                                     std::span<const Point2<Real>>(lion_buffer_),
                                                     k >= 2 ? &paths_[static_cast<std::size_t>(k - 2)] : nullptr);
                ++stats_.decisions[static_cast<std::size_t>(k - 1)];
                if (k == n) {
                    ++stats_.moves_by_kind[static_cast<std::size_t>(d.kind)];
                }
            }
        }
        for (std::size_t i = 0; i < milestone_clocks_.size(); ++i) {
            if (milestone_clocks_[i].time_of(milestone_next_[i]) == now_) {
                ++milestone_next_[i];
            }
        }
        if (lion_clock_.time_of(lion_next_) == now_) {
            step_lions(lion_next_);
            ++lion_next_;
        }
        fill_sample(now_);
        sink.sample(sample_);
        ++stats_.samples;
        have_sample = true;
        last_sample = now_;
        if (check_capture(now_, sink)) {
            sink.end();
            return;
        }
    }
    if (!have_sample || last_sample < horizon_) {
        now_ = horizon_;
        fill_sample(now_);
        sink.sample(sample_);
        ++stats_.samples;
        check_capture(now_, sink);
    }
    sink.end();
}

template <class Real>
Trace<Real> run(const GameConfig& config) {
    Engine<Real> engine(config);
    TraceCollector<Real> collector;
    engine.run(collector);
    Trace<Real> trace = std::move(collector.trace());
    trace.cascade = engine.cascade();
    trace.config_digest = config_digest(config);
    return trace;
}

template struct Trace<double>;
template struct Trace<Extended>;
template class Engine<double>;
template class Engine<Extended>;
template Trace<double> run<double>(const GameConfig&);
template Trace<Extended> run<Extended>(const GameConfig&);

}  // namespace escape
