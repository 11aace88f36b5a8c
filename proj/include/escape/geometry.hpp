#pragma once

#include "escape/errors.hpp"
#include "escape/scalar.hpp"

#include <cmath>
#include <vector>

namespace escape {

/// A planar point, also used as a displacement vector.
template <class Real>
struct Point2 {
    Real x{};
    Real y{};

    Point2() = default;
    Point2(Real x_, Real y_) : x(std::move(x_)), y(std::move(y_)) {}

    template <class Other>
    static Point2 from(const Point2<Other>& p) {
        return {Real(p.x), Real(p.y)};
    }

    Point2& operator+=(const Point2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    Point2& operator-=(const Point2& o) {
        x -= o.x;
        y -= o.y;
        return *this;
    }
    friend Point2 operator+(Point2 a, const Point2& b) { return a += b; }
    friend Point2 operator-(Point2 a, const Point2& b) { return a -= b; }
    friend Point2 operator-(const Point2& a) { return {-a.x, -a.y}; }
    friend Point2 operator*(const Real& s, const Point2& a) { return {s * a.x, s * a.y}; }
    friend Point2 operator*(const Point2& a, const Real& s) { return {s * a.x, s * a.y}; }
    friend Point2 operator/(const Point2& a, const Real& s) { return {a.x / s, a.y / s}; }
    friend bool operator==(const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(const Point2& a, const Point2& b) { return !(a == b); }
};

template <class Real>
Real dot(const Point2<Real>& a, const Point2<Real>& b) {
    return a.x * b.x + a.y * b.y;
}

template <class Real>
Real cross(const Point2<Real>& a, const Point2<Real>& b) {
    return a.x * b.y - a.y * b.x;
}

template <class Real>
Real norm(const Point2<Real>& a) {
    using std::hypot;
    return hypot(a.x, a.y);
}

template <class Real>
Real distance(const Point2<Real>& a, const Point2<Real>& b) {
    return norm(a - b);
}

/// Counterclockwise quarter turn.
template <class Real>
Point2<Real> perp(const Point2<Real>& a) {
    return {-a.y, a.x};
}

template <class Real>
Point2<Real> unit(const Point2<Real>& a) {
    const Real n = norm(a);
    if (n == Real(0)) {
        throw DegenerateInput("unit() of the zero vector");
    }
    return a / n;
}

template <class Real>
Point2<Real> direction(const Real& angle) {
    using std::cos;
    using std::sin;
    return {cos(angle), sin(angle)};
}

template <class Real>
Real angle_of(const Point2<Real>& a) {
    using std::atan2;
    return atan2(a.y, a.x);
}

/// Maps any angle to [0, 2*pi).
template <class Real>
Real wrap_angle(Real a) {
    using std::fmod;
    const Real tau = two_pi<Real>();
    a = fmod(a, tau);
    if (a < Real(0)) {
        a += tau;
    }
    if (a >= tau) {
        a -= tau;
    }
    return a;
}

/// Distance from p to the closed segment [a, b].
template <class Real>
Real segment_distance(const Point2<Real>& p, const Point2<Real>& a, const Point2<Real>& b) {
    const Point2<Real> ab = b - a;
    const Real len2 = dot(ab, ab);
    if (len2 == Real(0)) {
        return distance(p, a);
    }
    Real s = dot(p - a, ab) / len2;
    if (s < Real(0)) {
        s = Real(0);
    } else if (s > Real(1)) {
        s = Real(1);
    }
    return distance(p, a + s * ab);
}

/// Closed set of unit directions within half_width of center_angle.
template <class Real>
struct DirectionArc {
    Real center_angle{};  // [0, 2*pi)
    Real half_width{};    // [0, pi]; pi means the full circle
    bool empty = false;

    static DirectionArc none() { return {Real(0), Real(0), true}; }
    static DirectionArc full() { return {Real(0), pi<Real>(), false}; }

    bool is_full() const { return !empty && half_width >= pi<Real>(); }

    bool contains(const Real& angle) const {
        using std::abs;
        if (empty) {
            return false;
        }
        if (is_full()) {
            return true;
        }
        Real d = wrap_angle(angle - center_angle);
        if (d > pi<Real>()) {
            d = two_pi<Real>() - d;
        }
        return d <= half_width;
    }
};

/// All points shared by C(c1, r1) and C(c2, r2): zero, one (tangency) or two,
/// the pair sorted by atan2 angle around c2 in (-pi, pi].
template <class Real>
std::vector<Point2<Real>> circle_circle_intersection(const Point2<Real>& c1, const Real& r1,
                                                     const Point2<Real>& c2, const Real& r2) {
    using std::abs;
    using std::max;
    using std::sqrt;
    if (!(r1 > Real(0)) || !(r2 > Real(0))) {
        throw DegenerateInput("circle radius must be positive");
    }
    if (c1 == c2) {
        throw DegenerateInput("coincident circle centers");
    }
    // Work relative to c2 so tiny radii next to large coordinates keep their bits.
    const Point2<Real> rel = c1 - c2;
    const Real d = norm(rel);
    const Point2<Real> e = rel / d;
    const Real along = (d * d + r2 * r2 - r1 * r1) / (2 * d);
    const Real h2 = r2 * r2 - along * along;
    const Real scale = max(max(r1, r2), d);
    const Real tol = Real(1e-14) * scale * scale;
    if (h2 < -tol) {
        return {};
    }
    if (h2 <= tol) {
        return {c2 + along * e};
    }
    const Real h = sqrt(h2);
    Point2<Real> a = c2 + along * e + h * perp(e);
    Point2<Real> b = c2 + along * e - h * perp(e);
    if (angle_of(Point2<Real>(a - c2)) > angle_of(Point2<Real>(b - c2))) {
        std::swap(a, b);
    }
    return {a, b};
}

/// The intersection q of C(man, step) and C(lion, r) at which the arc of the
/// lion circle lying inside the man circle ends when walked counterclockwise.
template <class Real>
Point2<Real> ccw_leading_intersection(const Point2<Real>& man, const Real& step,
                                      const Point2<Real>& lion, const Real& r) {
    using std::max;
    using std::sqrt;
    if (man == lion) {
        throw DegenerateInput("man and lion coincide");
    }
    const Point2<Real> rel = man - lion;
    const Real d = norm(rel);
    const Point2<Real> e = rel / d;
    const Real along = (d * d + r * r - step * step) / (2 * d);
    Real h2 = r * r - along * along;
    const Real scale = max(max(step, r), d);
    if (h2 < -Real(1e-14) * scale * scale) {
        throw InvariantViolation("avoidance circles do not intersect");
    }
    if (h2 < Real(0)) {
        h2 = Real(0);
    }
    return lion + along * e + sqrt(h2) * perp(e);
}

/// {unit u : <u, a> >= c}.
template <class Real>
DirectionArc<Real> direction_arc(const Point2<Real>& a, const Real& c) {
    using std::acos;
    const Real len = norm(a);
    if (len == Real(0)) {
        throw DegenerateInput("direction_arc of the zero vector");
    }
    if (c > len) {
        return DirectionArc<Real>::none();
    }
    if (c <= -len) {
        return DirectionArc<Real>::full();
    }
    return {wrap_angle(angle_of(a)), acos(c / len), false};
}

template <class Real>
bool arcs_intersect(const DirectionArc<Real>& s, const DirectionArc<Real>& t) {
    if (s.empty || t.empty) {
        return false;
    }
    if (s.is_full() || t.is_full()) {
        return true;
    }
    Real d = wrap_angle(s.center_angle - t.center_angle);
    if (d > pi<Real>()) {
        d = two_pi<Real>() - d;
    }
    return d <= s.half_width + t.half_width;
}

}  // namespace escape
