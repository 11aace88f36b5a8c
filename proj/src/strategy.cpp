#include "escape/strategy.hpp"

#include "escape/errors.hpp"

namespace escape {

char move_code(MoveKind kind) {
    switch (kind) {
        case MoveKind::Free:
            return 'F';
        case MoveKind::Escape:
            return 'E';
        case MoveKind::Avoidance:
            return 'A';
    }
    return '?';
}

MoveKind parse_move_code(char c) {
    switch (c) {
        case 'F':
            return MoveKind::Free;
        case 'E':
            return MoveKind::Escape;
        case 'A':
            return MoveKind::Avoidance;
        default:
            throw ConfigError(std::string("unknown move code '") + c + "'");
    }
}

std::string_view to_string(MoveKind kind) {
    switch (kind) {
        case MoveKind::Free:
            return "free";
        case MoveKind::Escape:
            return "escape";
        case MoveKind::Avoidance:
            return "avoidance";
    }
    return "?";
}

template <class Real>
StrategyState<Real>::StrategyState(int level, Real sigma, Point2<Real> start)
    : level_(level), clock_(sigma, 1) {
    corners_.push_back(std::move(start));
}

template <class Real>
void StrategyState<Real>::append(const Point2<Real>& corner, MoveKind kind, const std::optional<Goal<Real>>& goal) {
    const Point2<Real> delta = corner - corners_.back();
    if (!(delta == Point2<Real>{})) {
        heading_ = unit(delta);
    }
    corners_.push_back(corner);
    kinds_.push_back(kind);
    goal_ = goal;
}

template <class Real>
Point2<Real> StrategyState<Real>::along(std::int64_t segment, const Real& fraction) const {
    const auto i = static_cast<std::size_t>(segment);
    const Point2<Real>& a = corners_[i];
    if (fraction == Real(0)) {
        return a;
    }
    return a + fraction * (corners_[i + 1] - a);
}

template <class Real>
Point2<Real> evaluate(const StrategyState<Real>& state, const Real& t) {
    if (t < Real(0)) {
        throw SchedulingError("evaluate at negative time");
    }
    const std::int64_t i = state.clock().index_at(t);
    if (i > state.clock_index() || (i == state.clock_index() && t != state.horizon())) {
        throw SchedulingError("level " + std::to_string(state.level()) + " path queried past its committed horizon");
    }
    if (i == state.clock_index()) {
        return state.last_corner();
    }
    const Real fraction = (t - state.time_of_choice(i)) / state.sigma();
    return state.along(i, fraction);
}

template <class Real>
Goal<Real> milestone_goal(const Real& t, const StrategyState<Real>& lower, std::int64_t pieces) {
    const PeriodicClock<Real> milestones(lower.sigma(), pieces);
    const std::int64_t j = milestones.index_at(t) + 1;
    const std::int64_t q = j / pieces;
    const std::int64_t rem = j % pieces;
    if (q > lower.clock_index() || (rem != 0 && q == lower.clock_index())) {
        throw SchedulingError("milestone " + std::to_string(j) + " of level " + std::to_string(lower.level()) +
                              " is not committed yet");
    }
    if (rem == 0) {
        return {lower.corners()[static_cast<std::size_t>(q)], j};
    }
    return {lower.along(q, Real(rem) / Real(pieces)), j};
}

template <class Real>
bool escape_witness_exists(const ParameterSet<Real>& ps, const Point2<Real>& man, const Point2<Real>& lion,
                           const Point2<Real>& b) {
    const Real& r = *ps.r;
    const Real& sigma = ps.sigma_n;
    const DirectionArc<Real> away = direction_arc(Point2<Real>(man - lion), Real(r - sigma));
    const DirectionArc<Real> ahead = direction_arc(Point2<Real>(b - man), sigma);
    return arcs_intersect(away, ahead);
}

template <class Real>
Decision<Real> choose_move(const ParameterSet<Real>& ps, const Point2<Real>& man, const Point2<Real>& lion,
                           const Point2<Real>& goal, const std::optional<Point2<Real>>& prev_heading) {
    if (!ps.r) {
        throw DomainError("choose_move needs a level >= 2 parameter set");
    }
    const Real& r = *ps.r;
    const Real step = ps.step();
    const Real gap = distance(man, lion);
    const bool at_goal = man == goal;

    if (gap >= r + step) {
        Point2<Real> dir = at_goal ? prev_heading.value_or(Point2<Real>{Real(1), Real(0)}) : unit(Point2<Real>(goal - man));
        return {MoveKind::Free, man + step * dir};
    }
    if (!at_goal) {
        const Point2<Real> b = man + step * unit(Point2<Real>(goal - man));
        if (escape_witness_exists(ps, man, lion, b)) {
            return {MoveKind::Escape, b};
        }
    }
    // Measured from the man so the target lies on his step circle to full precision.
    using std::max;
    using std::sqrt;
    const Point2<Real> e = (lion - man) / gap;
    const Real along = (gap * gap + step * step - r * r) / (2 * gap);
    Real h2 = step * step - along * along;
    if (h2 < -Real(1e-14) * step * step) {
        throw InvariantViolation("avoidance circles do not intersect");
    }
    if (h2 < Real(0)) {
        h2 = Real(0);
    }
    // q lies counterclockwise of the lion->man ray, i.e. clockwise of man->lion.
    const Point2<Real> q = man + along * e - sqrt(h2) * perp(e);
    return {MoveKind::Avoidance, q};
}

template <class Real>
Decision<Real> commit_next(StrategyState<Real>& state, const ParameterSet<Real>& ps,
                           std::span<const Point2<Real>> lions, const StrategyState<Real>* lower) {
    const int k = state.level();
    if (lions.size() < static_cast<std::size_t>(k)) {
        throw DomainError("level " + std::to_string(k) + " needs lion " + std::to_string(k));
    }
    if (k == 1) {
        if (!state.heading()) {
            state.set_heading(unit(Point2<Real>(state.corners().front() - lions[0])));
        }
        const Decision<Real> d{MoveKind::Free, state.last_corner() + ps.step() * *state.heading()};
        state.append(d.target, d.kind);
        return d;
    }
    if (lower == nullptr || !ps.p) {
        throw SchedulingError("level " + std::to_string(k) + " commit without its lower level");
    }
    const Real t = state.horizon();
    const Goal<Real> goal = milestone_goal(t, *lower, *ps.p);
    const Decision<Real> d =
        choose_move(ps, state.last_corner(), lions[static_cast<std::size_t>(k - 1)], goal.point, state.heading());
    state.append(d.target, d.kind, goal);
    return d;
}

template <class Real>
Real truncation_bound(std::span<const Real> deltas, int n, int m) {
    if (n < 1 || m <= n) {
        throw DomainError("truncation_bound needs m > n >= 1");
    }
    Real sum = Real(0);
    for (int i = n; i <= m - 1; ++i) {
        const auto idx = static_cast<std::size_t>(i + 1 - 2);
        if (idx >= deltas.size()) {
            throw DomainError("delta_" + std::to_string(i + 1) + " is not available");
        }
        sum += deltas[idx];
    }
    return sum;
}

template <class Real>
bool goal_reached(const Point2<Real>& from, const Point2<Real>& to, const Point2<Real>& goal, const Real& step) {
    return segment_distance(goal, from, to) <= Real(1e-9) * step;
}

#define ESCAPE_INSTANTIATE_STRATEGY(Real)                                                                          \
    template class StrategyState<Real>;                                                                          \
    template Point2<Real> evaluate<Real>(const StrategyState<Real>&, const Real&);                               \
    template Goal<Real> milestone_goal<Real>(const Real&, const StrategyState<Real>&, std::int64_t);             \
    template Decision<Real> choose_move<Real>(const ParameterSet<Real>&, const Point2<Real>&, const Point2<Real>&, \
                                              const Point2<Real>&, const std::optional<Point2<Real>>&);          \
    template bool escape_witness_exists<Real>(const ParameterSet<Real>&, const Point2<Real>&, const Point2<Real>&, \
                                              const Point2<Real>&);                                              \
    template Decision<Real> commit_next<Real>(StrategyState<Real>&, const ParameterSet<Real>&,                   \
                                              std::span<const Point2<Real>>, const StrategyState<Real>*);        \
    template Real truncation_bound<Real>(std::span<const Real>, int, int);                                       \
    template bool goal_reached<Real>(const Point2<Real>&, const Point2<Real>&, const Point2<Real>&, const Real&);

ESCAPE_INSTANTIATE_STRATEGY(double)
ESCAPE_INSTANTIATE_STRATEGY(Extended)

}  // namespace escape
