#pragma once

#include "escape/scalar.hpp"

#include <cstdint>

namespace escape {

/// Ticks at index * (period / subdivisions), evaluated as
/// (index / subdivisions) * period + (index % subdivisions) * (period / subdivisions)
/// so that every multiple of `subdivisions` lands exactly on a multiple of `period`.
/// Times are never accumulated.
template <class Real>
class PeriodicClock {
public:
    PeriodicClock() = default;
    PeriodicClock(Real period, std::int64_t subdivisions = 1)
        : period_(period), subdivisions_(subdivisions), tick_(period / Real(subdivisions)) {}

    const Real& period() const { return period_; }
    std::int64_t subdivisions() const { return subdivisions_; }

    Real time_of(std::int64_t index) const {
        const std::int64_t q = index / subdivisions_;
        const std::int64_t rem = index % subdivisions_;
        Real t = Real(q) * period_;
        if (rem != 0) {
            t += Real(rem) * tick_;
        }
        return t;
    }

    /// Largest index whose time is <= t (t >= 0).
    std::int64_t index_at(const Real& t) const {
        std::int64_t i = floor_to_int(Real(t / tick_));
        if (i < 0) {
            i = 0;
        }
        while (i > 0 && time_of(i) > t) {
            --i;
        }
        while (time_of(i + 1) <= t) {
            ++i;
        }
        return i;
    }

    /// True iff t is exactly one of the ticks.
    bool on_tick(const Real& t) const { return time_of(index_at(t)) == t; }

private:
    Real period_{1};
    std::int64_t subdivisions_ = 1;
    Real tick_{1};
};

}  // namespace escape
