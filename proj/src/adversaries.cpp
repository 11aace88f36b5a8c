#include "escape/adversaries.hpp"

#include "escape/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace escape {

std::string_view controller_kind(const LionController& ctrl) {
    struct Visitor {
        std::string_view operator()(const Stationary&) const { return "stationary"; }
        std::string_view operator()(const PurePursuit&) const { return "pure_pursuit"; }
        std::string_view operator()(const GoalAmbush&) const { return "goal_ambush"; }
        std::string_view operator()(const Scripted&) const { return "scripted"; }
        std::string_view operator()(const Replay&) const { return "replay"; }
    };
    return std::visit(Visitor{}, ctrl);
}

namespace {

std::vector<Waypoint> normalize_path(std::vector<Waypoint> path, const Point2<double>& start, std::string_view kind) {
    if (path.empty()) {
        throw ConfigError(std::string(kind) + " controller needs at least one waypoint");
    }
    if (path.front().t < 0.0) {
        throw ConfigError(std::string(kind) + " waypoints must have non-negative times");
    }
    if (path.front().t > 0.0) {
        path.insert(path.begin(), Waypoint{0.0, start});
    } else if (path.front().p != start) {
        throw ConfigError(std::string(kind) + " path at t = 0 must be the lion's start");
    }
    for (std::size_t i = 1; i < path.size(); ++i) {
        const double dt = path[i].t - path[i - 1].t;
        if (!(dt > 0.0)) {
            throw ConfigError(std::string(kind) + " waypoint times must be strictly increasing");
        }
        const double len = distance(path[i].p, path[i - 1].p);
        if (len > dt * (1.0 + 1e-12)) {
            throw ConfigError(std::string(kind) + " path exceeds unit speed between t = " +
                              std::to_string(path[i - 1].t) + " and t = " + std::to_string(path[i].t));
        }
    }
    return path;
}

template <class Real>
Point2<Real> move_toward(const Point2<Real>& from, const Point2<Real>& to, const Real& h) {
    const Point2<Real> delta = to - from;
    const Real len = norm(delta);
    if (len <= h) {
        return to;
    }
    return from + (h / len) * delta;
}

}  // namespace

LionController normalize_controller(LionController ctrl, const Point2<double>& start) {
    if (auto* s = std::get_if<Scripted>(&ctrl)) {
        s->waypoints = normalize_path(std::move(s->waypoints), start, "Scripted");
    } else if (auto* r = std::get_if<Replay>(&ctrl)) {
        r->samples = normalize_path(std::move(r->samples), start, "Replay");
    }
    return ctrl;
}

template <class Real>
Point2<Real> scripted_position(const std::vector<Waypoint>& path, const Real& t) {
    if (t <= Real(path.front().t)) {
        return Point2<Real>::from(path.front().p);
    }
    if (t >= Real(path.back().t)) {
        return Point2<Real>::from(path.back().p);
    }
    const auto it = std::upper_bound(path.begin(), path.end(), t,
                                     [](const Real& v, const Waypoint& w) { return v < Real(w.t); });
    const Waypoint& b = *it;
    const Waypoint& a = *(it - 1);
    const Real f = (t - Real(a.t)) / (Real(b.t) - Real(a.t));
    const Point2<Real> pa = Point2<Real>::from(a.p);
    const Point2<Real> pb = Point2<Real>::from(b.p);
    return pa + f * (pb - pa);
}

template <class Real>
Point2<Real> lion_step(const LionController& ctrl, const Point2<Real>& lion, const ManPast<Real>& man,
                       const Real& t, const Real& h) {
    if (!(h > Real(0))) {
        throw DomainError("lion_step needs h > 0");
    }
    if (std::holds_alternative<Stationary>(ctrl)) {
        return lion;
    }
    if (const auto* ambush = std::get_if<GoalAmbush>(&ctrl)) {
        if (ambush->goal_visible) {
            if (const auto g = man.goal()) {
                return move_toward(lion, *g, h);
            }
        }
        return move_toward(lion, man.position_at(t), h);
    }
    if (std::holds_alternative<PurePursuit>(ctrl)) {
        return move_toward(lion, man.position_at(t), h);
    }
    const std::vector<Waypoint>& path =
        std::holds_alternative<Scripted>(ctrl) ? std::get<Scripted>(ctrl).waypoints : std::get<Replay>(ctrl).samples;
    return move_toward(lion, scripted_position(path, Real(t + h)), h);
}

std::vector<Point2<double>> rational_grid_starts(double radius, std::size_t count, const Point2<double>& man_start) {
    std::vector<Point2<double>> out;
    if (count == 0 || !(radius > 0.0)) {
        return out;
    }
    for (std::int64_t k = 1; out.size() < count; ++k) {
        const auto reach = static_cast<std::int64_t>(std::floor(radius * static_cast<double>(k)));
        const double limit = radius * radius * static_cast<double>(k) * static_cast<double>(k);
        for (std::int64_t a = -reach; a <= reach && out.size() < count; ++a) {
            for (std::int64_t b = -reach; b <= reach && out.size() < count; ++b) {
                if (static_cast<double>(a * a + b * b) > limit) {
                    continue;
                }
                // (a/k, b/k) already appeared with a smaller denominator.
                if (std::gcd(std::gcd(a, b), k) > 1) {
                    continue;
                }
                const Point2<double> p{static_cast<double>(a) / static_cast<double>(k),
                                       static_cast<double>(b) / static_cast<double>(k)};
                if (p == man_start) {
                    continue;
                }
                out.push_back(p);
            }
        }
    }
    return out;
}

Scripted scripted_orbit(const Point2<double>& start, const Point2<double>& center, double radius, double until,
                        int segments_per_turn) {
    if (!(radius > 0.0) || segments_per_turn < 3) {
        throw ConfigError("orbit needs radius > 0 and at least 3 segments per turn");
    }
    const Point2<double> out = start == center ? Point2<double>{1.0, 0.0} : unit(Point2<double>(start - center));
    const Point2<double> entry = center + radius * out;
    Scripted s;
    s.waypoints.push_back({0.0, start});
    double t = distance(start, entry);
    if (t > 0.0) {
        s.waypoints.push_back({t, entry});
    }
    const double base = angle_of(out);
    const double dtheta = two_pi<double>() / segments_per_turn;
    // Chords are shorter than the arcs they span, so timing by arc length keeps speed below 1.
    const double dt = radius * dtheta;
    for (int k = 1; t < until; ++k) {
        t += dt;
        s.waypoints.push_back({t, center + radius * direction(base + dtheta * k)});
    }
    return s;
}

template Point2<double> lion_step<double>(const LionController&, const Point2<double>&, const ManPast<double>&,
                                          const double&, const double&);
template Point2<Extended> lion_step<Extended>(const LionController&, const Point2<Extended>&,
                                              const ManPast<Extended>&, const Extended&, const Extended&);
template Point2<double> scripted_position<double>(const std::vector<Waypoint>&, const double&);
template Point2<Extended> scripted_position<Extended>(const std::vector<Waypoint>&, const Extended&);

}  // namespace escape
