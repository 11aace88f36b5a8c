#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace escape {

/// One named slack value; non-negative means the inequality holds.
struct Residual {
    std::string name;
    double slack = 0.0;
    bool pass = true;
};

/// Outcome of one certification or trace check.
struct Verdict {
    std::string name;
    bool pass = true;
    std::optional<double> first_violation_time;
    std::optional<std::size_t> first_violation_sample;
    /// Worst observed slack, in the check's own units (length, steps, ...).
    double measured_margin = 0.0;
    std::string details;
    std::vector<Residual> residuals;

    /// Records a violation; only the earliest one is kept.
    void fail_at(double t, std::optional<std::size_t> sample = std::nullopt) {
        if (pass) {
            pass = false;
            first_violation_time = t;
            first_violation_sample = sample;
        }
    }
};

}  // namespace escape
