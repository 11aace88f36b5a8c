#pragma once

#include "escape/geometry.hpp"
#include "escape/scalar.hpp"
#include "escape/verdict.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace escape {

/// Where the game starts. Coordinates are kept as declared (double); each
/// precision mode converts on entry.
struct StartConfiguration {
    Point2<double> man_start;
    std::vector<Point2<double>> lion_starts;
    double eps = 0.0;

    /// Throws ConfigError if a lion starts on the man or eps is outside (0, 1).
    void validate() const;
    double max_coordinate_magnitude() const;
};

struct CascadeOptions {
    /// delta_2, delta_3, ... replacing the default sequence when present.
    std::optional<std::vector<double>> delta_override;
};

/// Every constant of one strategy level. Fields that only exist for n >= 2
/// are empty at level 1.
template <class Real>
struct ParameterSet {
    int level = 1;
    Real eps_n{};
    Real sigma_n{};
    std::optional<Real> ell;
    std::optional<std::int64_t> p;
    std::optional<Real> r;
    std::optional<Real> rho;
    Real theta{};
    std::optional<Real> phi;
    std::optional<Real> tau;
    std::optional<Real> rho_prime;
    Real c_n{};
    std::optional<Real> delta_n;

    Real speed() const { return Real(1) + eps_n; }
    /// Length of every segment of the level's polygonal path.
    Real step() const { return sigma_n * speed(); }

    template <class Other>
    ParameterSet<Other> convert() const;
};

template <class Real>
using Cascade = std::vector<ParameterSet<Real>>;

struct PrecisionDiagnostic {
    int level = 0;
    double sigma_n = 0.0;
    double guard_threshold = 0.0;  // 1e6 ulp of the largest start coordinate
    double headroom = 0.0;         // sigma_n / guard_threshold
};

template <class Real>
Real eps_level(const Real& eps, int n);

/// delta_n from c_1..c_{n-1}.
template <class Real>
Real delta_level(std::span<const Real> safety, int n);

/// The phi in (0, pi/2] with tan(theta) = rho sin(phi) / (rho cos(phi) - 2r).
template <class Real>
Real solve_phi(const Real& rho, const Real& r, const Real& theta);

/// 0.99 times the largest sigma with
/// 2 asin((2+eps_n) sigma / (2 (r - sigma))) + sigma/rho <= phi and sigma <= r/(3+eps_n).
template <class Real>
Real solve_sigma(const Real& r, const Real& rho, const Real& eps_n, const Real& phi);

/// Left-hand side of the sigma condition.
template <class Real>
Real sigma_constraint_lhs(const Real& sigma, const Real& r, const Real& rho, const Real& eps_n);

template <class Real>
Real r_term_speed(const Real& piece_period, const Real& eps_n, const Real& eps_prev);

template <class Real>
Real r_term_delta(const Real& delta, const Real& eps_n);

/// Levels 1..n. Throws PrecisionError if a level's sigma drops below the
/// resolution guard of the scalar type, SolverError if c_k <= 0.
template <class Real>
Cascade<Real> derive_cascade(const StartConfiguration& config, int n, const CascadeOptions& options = {},
                             std::vector<PrecisionDiagnostic>* diagnostics = nullptr);

/// Re-substitutes every defining equation and inequality of `ps`.
/// `prior` holds levels 1..ps.level-1 of the same cascade.
template <class Real>
Verdict certify(const ParameterSet<Real>& ps, std::span<const ParameterSet<Real>> prior,
                const StartConfiguration& config, const CascadeOptions& options = {});

/// The delta sequence actually in use, indexed from delta_2.
template <class Real>
std::vector<Real> active_deltas(const Cascade<Real>& cascade);

template <class Real>
template <class Other>
ParameterSet<Other> ParameterSet<Real>::convert() const {
    auto opt = [](const std::optional<Real>& v) -> std::optional<Other> {
        if (!v) {
            return std::nullopt;
        }
        return Other(*v);
    };
    ParameterSet<Other> out;
    out.level = level;
    out.eps_n = Other(eps_n);
    out.sigma_n = Other(sigma_n);
    out.ell = opt(ell);
    out.p = p;
    out.r = opt(r);
    out.rho = opt(rho);
    out.theta = Other(theta);
    out.phi = opt(phi);
    out.tau = opt(tau);
    out.rho_prime = opt(rho_prime);
    out.c_n = Other(c_n);
    out.delta_n = opt(delta_n);
    return out;
}

}  // namespace escape
