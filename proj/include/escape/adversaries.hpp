#pragma once

#include "escape/geometry.hpp"

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace escape {

/// A lion that never moves.
struct Stationary {};

/// Runs straight at the man's current position at full speed.
struct PurePursuit {};

/// Runs at the man's current milestone goal. Without goal visibility it
/// behaves exactly like PurePursuit.
struct GoalAmbush {
    bool goal_visible = false;
};

struct Waypoint {
    double t = 0.0;
    Point2<double> p;
};

/// Piecewise-linear path through timed waypoints; speed between consecutive
/// waypoints must not exceed 1.
struct Scripted {
    std::vector<Waypoint> waypoints;
};

/// A precomputed sampled lion path, replayed verbatim.
struct Replay {
    std::vector<Waypoint> samples;
};

using LionController = std::variant<Stationary, PurePursuit, GoalAmbush, Scripted, Replay>;

std::string_view controller_kind(const LionController& ctrl);

/// Prepends the start position at t = 0 to scripted / replayed paths and
/// checks the unit speed bound. Throws ConfigError on a violation.
LionController normalize_controller(LionController ctrl, const Point2<double>& start);

/// What a lion may know about the man when it plans its next sub-step.
template <class Real>
class ManPast {
public:
    virtual ~ManPast() = default;
    virtual const Real& now() const = 0;
    /// Man position at s <= now(); later times throw CausalityError.
    virtual Point2<Real> position_at(const Real& s) const = 0;
    /// The man's current milestone goal, when the engine grants visibility.
    virtual std::optional<Point2<Real>> goal() const = 0;
};

/// Lion position at t + h given its position at t.
template <class Real>
Point2<Real> lion_step(const LionController& ctrl, const Point2<Real>& lion, const ManPast<Real>& man,
                       const Real& t, const Real& h);

/// Position of a normalized scripted / replayed path at time t.
template <class Real>
Point2<Real> scripted_position(const std::vector<Waypoint>& path, const Real& t);

/// Points (a/k, b/k) with |(a/k, b/k)| <= radius in (k, a, b) order, without
/// repeats and without man_start; the first `count` of them.
std::vector<Point2<double>> rational_grid_starts(double radius, std::size_t count, const Point2<double>& man_start);

/// A lion that walks from `start` to the nearest point of the circle
/// C(center, radius) and then circles it counterclockwise at unit speed
/// until `until`.
Scripted scripted_orbit(const Point2<double>& start, const Point2<double>& center, double radius, double until,
                        int segments_per_turn = 64);

}  // namespace escape
