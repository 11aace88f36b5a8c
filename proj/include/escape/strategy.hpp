#pragma once

#include "escape/clock.hpp"
#include "escape/geometry.hpp"
#include "escape/params.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace escape {

enum class MoveKind : std::uint8_t { Free, Escape, Avoidance };

char move_code(MoveKind kind);
MoveKind parse_move_code(char c);
std::string_view to_string(MoveKind kind);

/// A milestone on the lower-level path: its point and its index j
/// (reached at time j * sigma_{n-1} / p).
template <class Real>
struct Goal {
    Point2<Real> point;
    std::int64_t milestone = 0;
};

template <class Real>
struct Decision {
    MoveKind kind = MoveKind::Free;
    Point2<Real> target;
};

/// The committed polygonal path of one strategy level. Corner i is the
/// position at time i * sigma; all segments have the same length.
template <class Real>
class StrategyState {
public:
    StrategyState() = default;
    StrategyState(int level, Real sigma, Point2<Real> start);

    int level() const { return level_; }
    const Real& sigma() const { return clock_.period(); }
    /// Number of committed moves; the path is known up to time clock_index() * sigma.
    std::int64_t clock_index() const { return static_cast<std::int64_t>(kinds_.size()); }
    Real horizon() const { return clock_.time_of(clock_index()); }
    Real time_of_choice(std::int64_t i) const { return clock_.time_of(i); }
    const PeriodicClock<Real>& clock() const { return clock_; }

    const std::vector<Point2<Real>>& corners() const { return corners_; }
    const std::vector<MoveKind>& kinds() const { return kinds_; }
    const Point2<Real>& last_corner() const { return corners_.back(); }

    /// Unit direction of the most recent segment, if any.
    std::optional<Point2<Real>> heading() const { return heading_; }
    const std::optional<Goal<Real>>& goal_cache() const { return goal_; }

    void append(const Point2<Real>& corner, MoveKind kind, const std::optional<Goal<Real>>& goal = std::nullopt);
    /// Fixes the straight-line direction of a level-1 path.
    void set_heading(const Point2<Real>& h) { heading_ = h; }

    /// Point of segment i at parameter fraction in [0, 1].
    Point2<Real> along(std::int64_t segment, const Real& fraction) const;

private:
    int level_ = 1;
    PeriodicClock<Real> clock_;
    std::vector<Point2<Real>> corners_;
    std::vector<MoveKind> kinds_;
    std::optional<Point2<Real>> heading_;
    std::optional<Goal<Real>> goal_;
};

/// Position on the committed path at time t; throws SchedulingError past the horizon.
template <class Real>
Point2<Real> evaluate(const StrategyState<Real>& state, const Real& t);

/// The milestone of `lower` that follows time t. Milestones split every
/// lower segment into `pieces` equal parts; at an exact milestone time the
/// next one is returned.
template <class Real>
Goal<Real> milestone_goal(const Real& t, const StrategyState<Real>& lower, std::int64_t pieces);

/// The free / escape / avoidance rule of one time of choice.
template <class Real>
Decision<Real> choose_move(const ParameterSet<Real>& ps, const Point2<Real>& man, const Point2<Real>& lion,
                           const Point2<Real>& goal, const std::optional<Point2<Real>>& prev_heading);

/// Whether the escape witness exists: a unit u with <u, man - lion> >= r - sigma
/// and <u, b - man> >= sigma.
template <class Real>
bool escape_witness_exists(const ParameterSet<Real>& ps, const Point2<Real>& man, const Point2<Real>& lion,
                           const Point2<Real>& b);

/// Commits the move starting at the state's next time of choice.
/// `lions` are all lion positions at that time; level k consults lions[k-1].
/// `lower` is the level-(k-1) path (null at level 1).
template <class Real>
Decision<Real> commit_next(StrategyState<Real>& state, const ParameterSet<Real>& ps,
                           std::span<const Point2<Real>> lions, const StrategyState<Real>* lower);

/// Sum of delta_{i+1} for i = n..m-1; `deltas` starts at delta_2.
template <class Real>
Real truncation_bound(std::span<const Real> deltas, int n, int m);

/// True when the man has reached `goal` during the segment [from, to].
template <class Real>
bool goal_reached(const Point2<Real>& from, const Point2<Real>& to, const Point2<Real>& goal, const Real& step);

}  // namespace escape
