#include "escape/params.hpp"

#include "escape/errors.hpp"

#include <algorithm>
#include <cmath>

namespace escape {

void StartConfiguration::validate() const {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw ConfigError("eps must lie in (0, 1), got " + std::to_string(eps));
    }
    if (lion_starts.empty()) {
        throw ConfigError("at least one lion is required");
    }
    auto finite = [](const Point2<double>& p) { return std::isfinite(p.x) && std::isfinite(p.y); };
    if (!finite(man_start)) {
        throw ConfigError("man start must be finite");
    }
    for (std::size_t i = 0; i < lion_starts.size(); ++i) {
        if (!finite(lion_starts[i])) {
            throw ConfigError("lion " + std::to_string(i + 1) + " start must be finite");
        }
        if (lion_starts[i] == man_start) {
            throw ConfigError("lion " + std::to_string(i + 1) +
                              " starts at the man's position; every lion must start away from the man");
        }
    }
}

double StartConfiguration::max_coordinate_magnitude() const {
    double m = std::max(std::abs(man_start.x), std::abs(man_start.y));
    for (const auto& l : lion_starts) {
        m = std::max({m, std::abs(l.x), std::abs(l.y)});
    }
    return m;
}

template <class Real>
Real eps_level(const Real& eps, int n) {
    using std::ldexp;
    if (n < 1) {
        throw DomainError("eps_level needs n >= 1");
    }
    return (Real(1) - ldexp(Real(1), -n)) * eps;
}

template <class Real>
Real delta_level(std::span<const Real> safety, int n) {
    using std::ldexp;
    if (n < 2) {
        throw DomainError("delta_level needs n >= 2");
    }
    if (safety.size() < static_cast<std::size_t>(n - 1)) {
        throw DomainError("delta_level needs c_1..c_{n-1}");
    }
    Real best = ldexp(Real(1), -n);
    for (int i = 1; i <= n - 1; ++i) {
        const Real& c = safety[static_cast<std::size_t>(i - 1)];
        if (!(c > Real(0))) {
            throw DomainError("safety distances must be positive");
        }
        const Real term = ldexp(c, -(n - i + 1));
        if (term < best) {
            best = term;
        }
    }
    return best;
}

namespace {

template <class Real>
Real phi_map(const Real& phi, const Real& rho, const Real& r) {
    using std::cos;
    using std::sin;
    return rho * sin(phi) / (rho * cos(phi) - 2 * r);
}

template <class Real>
Real relative_gap(const Real& a, const Real& b) {
    using std::abs;
    const Real scale = std::max(abs(a), abs(b));
    return scale == Real(0) ? Real(0) : abs(a - b) / scale;
}

}  // namespace

template <class Real>
Real solve_phi(const Real& rho, const Real& r, const Real& theta) {
    using std::abs;
    using std::acos;
    using std::tan;
    if (!(r > Real(0)) || !(rho > 2 * r)) {
        throw SolverError("solve_phi needs rho > 2r > 0");
    }
    if (!(theta > Real(0)) || !(theta < pi<Real>() / 2)) {
        throw SolverError("solve_phi needs theta in (0, pi/2)");
    }
    const Real target = tan(theta);
    Real lo = Real(0);
    Real hi = acos(2 * r / rho);
    // phi_map rises from 0 at phi=0 to +inf at hi.
    for (int it = 0; it < 400; ++it) {
        const Real mid = (lo + hi) / 2;
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (phi_map(mid, rho, r) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const Real res_lo = abs(phi_map(lo, rho, r) - target);
    const Real res_hi = abs(phi_map(hi, rho, r) - target);
    const Real phi = res_lo <= res_hi ? lo : hi;
    const Real residual = std::min(res_lo, res_hi) / target;
    if (!(phi > Real(0)) || !(residual <= Real(1e-12)) || !(phi <= pi<Real>() / 2)) {
        throw SolverError("solve_phi: no root with residual <= 1e-12");
    }
    return phi;
}

template <class Real>
Real sigma_constraint_lhs(const Real& sigma, const Real& r, const Real& rho, const Real& eps_n) {
    using std::asin;
    const Real arg = (2 + eps_n) * sigma / (2 * (r - sigma));
    if (arg > Real(1)) {
        return pi<Real>() + sigma / rho;
    }
    return 2 * asin(arg) + sigma / rho;
}

template <class Real>
Real solve_sigma(const Real& r, const Real& rho, const Real& eps_n, const Real& phi) {
    if (!(r > Real(0)) || !(rho > Real(0)) || !(phi > Real(0)) || !(eps_n > Real(0))) {
        throw SolverError("solve_sigma needs positive r, rho, phi, eps_n");
    }
    const Real cap = r / (3 + eps_n);
    Real sup = cap;
    if (sigma_constraint_lhs(cap, r, rho, eps_n) > phi) {
        Real lo = Real(0);
        Real hi = cap;
        for (int it = 0; it < 400; ++it) {
            const Real mid = (lo + hi) / 2;
            if (mid <= lo || mid >= hi) {
                break;
            }
            if (sigma_constraint_lhs(mid, r, rho, eps_n) <= phi) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        sup = lo;
    }
    const Real sigma = Real(0.99) * sup;
    if (!(sigma > Real(0))) {
        throw SolverError("solve_sigma: no positive sigma");
    }
    return sigma;
}

template <class Real>
Real r_term_speed(const Real& piece_period, const Real& eps_n, const Real& eps_prev) {
    return piece_period * eps_n * (eps_n - eps_prev) / (2 + 2 * eps_n + 18 * pi<Real>() * (1 + eps_n));
}

template <class Real>
Real r_term_delta(const Real& delta, const Real& eps_n) {
    return delta / 2 * eps_n / (2 + 2 * eps_n + 12 * pi<Real>() * (1 + eps_n));
}

namespace {

template <class Real>
Real start_distance(const StartConfiguration& config, std::size_t lion) {
    const Point2<Real> m0 = Point2<Real>::from(config.man_start);
    const Point2<Real> l0 = Point2<Real>::from(config.lion_starts.at(lion));
    return distance(m0, l0);
}

template <class Real>
Real guard_threshold(const StartConfiguration& config) {
    Real mag = Real(config.max_coordinate_magnitude());
    if (mag == Real(0)) {
        mag = Real(1);
    }
    return Real(1e6) * ulp(mag);
}

template <class Real>
Real level_delta(const Cascade<Real>& lower, int n, const CascadeOptions& options) {
    if (options.delta_override) {
        const auto& ov = *options.delta_override;
        const auto idx = static_cast<std::size_t>(n - 2);
        if (idx >= ov.size()) {
            throw DomainError("delta_override has no entry for level " + std::to_string(n));
        }
        if (!(ov[idx] > 0.0)) {
            throw DomainError("delta_override entries must be positive");
        }
        return Real(ov[idx]);
    }
    std::vector<Real> safety;
    safety.reserve(lower.size());
    for (const auto& ps : lower) {
        safety.push_back(ps.c_n);
    }
    return delta_level<Real>(safety, n);
}

}  // namespace

template <class Real>
Cascade<Real> derive_cascade(const StartConfiguration& config, int n, const CascadeOptions& options,
                             std::vector<PrecisionDiagnostic>* diagnostics) {
    using std::acos;
    config.validate();
    if (n < 1) {
        throw DomainError("cascade depth must be >= 1");
    }
    if (static_cast<std::size_t>(n) > config.lion_starts.size()) {
        throw DomainError("level " + std::to_string(n) + " needs at least that many lions");
    }
    const Real eps = Real(config.eps);
    const Real guard = guard_threshold<Real>(config);
    Cascade<Real> out;
    out.reserve(static_cast<std::size_t>(n));

    auto diagnose = [&](const ParameterSet<Real>& ps) {
        if (diagnostics) {
            diagnostics->push_back({ps.level, to_double(ps.sigma_n), to_double(guard), to_double(ps.sigma_n / guard)});
        }
        if (!(ps.sigma_n >= guard)) {
            throw PrecisionError(ps.level, "sigma_n below 1e6 ulp of the largest start coordinate; "
                                           "use extended precision");
        }
    };

    ParameterSet<Real> base;
    base.level = 1;
    base.eps_n = eps_level(eps, 1);
    base.sigma_n = Real(1);
    base.theta = acos(Real(1) / (1 + base.eps_n));
    base.c_n = start_distance<Real>(config, 0);
    diagnose(base);
    out.push_back(base);

    for (int k = 2; k <= n; ++k) {
        const ParameterSet<Real>& prev = out.back();
        ParameterSet<Real> ps;
        ps.level = k;
        ps.eps_n = eps_level(eps, k);
        const Real delta = level_delta(out, k, options);
        ps.delta_n = delta;
        const Real ell = prev.sigma_n * (1 + prev.eps_n);
        ps.ell = ell;
        const std::int64_t p = ceil_to_int(Real(ell / (delta / 2)));
        ps.p = p;
        const Real piece = prev.sigma_n / Real(p);
        const Real r = std::min({r_term_speed(piece, ps.eps_n, prev.eps_n), r_term_delta(delta, ps.eps_n),
                                 start_distance<Real>(config, static_cast<std::size_t>(k - 1))});
        ps.r = r;
        const Real rho = 2 * r / ps.eps_n;
        ps.rho = rho;
        ps.theta = acos(Real(1) / (1 + ps.eps_n));
        ps.phi = solve_phi(rho, r, ps.theta);
        ps.sigma_n = solve_sigma(r, rho, ps.eps_n, *ps.phi);
        ps.tau = 6 * pi<Real>() * r / ps.eps_n;
        ps.rho_prime = rho + r + (3 + ps.eps_n) * ps.sigma_n;
        ps.c_n = r - (3 + ps.eps_n) * ps.sigma_n;
        if (!(ps.c_n > Real(0))) {
            throw SolverError("level " + std::to_string(k) + ": safety distance is not positive");
        }
        diagnose(ps);
        out.push_back(ps);
    }
    return out;
}

template <class Real>
std::vector<Real> active_deltas(const Cascade<Real>& cascade) {
    std::vector<Real> d;
    for (const auto& ps : cascade) {
        if (ps.delta_n) {
            d.push_back(*ps.delta_n);
        }
    }
    return d;
}

namespace {

constexpr double kRelTol = 1e-12;

template <class Real>
struct ResidualSink {
    Verdict& v;

    /// lhs <= rhs (or <); slack is relative and includes the tolerance when not strict.
    void inequality(const std::string& name, const Real& lhs, const Real& rhs, bool strict = false) {
        using std::abs;
        const Real scale = std::max(abs(rhs), abs(lhs));
        const Real rel = scale == Real(0) ? Real(0) : (rhs - lhs) / scale;
        if (strict) {
            add(name, to_double(rel), lhs < rhs);
        } else {
            const Real slack = rel + Real(kRelTol);
            add(name, to_double(slack), slack >= Real(0));
        }
    }
    void equality(const std::string& name, const Real& a, const Real& b) {
        const Real slack = Real(kRelTol) - relative_gap(a, b);
        add(name, to_double(slack), slack >= Real(0));
    }
    void summarize(int level) {
        if (v.pass) {
            v.details = "level " + std::to_string(level) + ": " + std::to_string(v.residuals.size()) +
                        " residuals, all satisfied";
        }
    }
    void add(const std::string& name, double slack, bool ok) {
        v.residuals.push_back({name, slack, ok});
        if (!ok) {
            v.pass = false;
            v.details += (v.details.empty() ? "failed: " : ", ") + name;
        }
        if (v.residuals.size() == 1 || slack < v.measured_margin) {
            v.measured_margin = slack;
        }
    }
};

}  // namespace

template <class Real>
Verdict certify(const ParameterSet<Real>& ps, std::span<const ParameterSet<Real>> prior,
                const StartConfiguration& config, const CascadeOptions& options) {
    using std::acos;
    using std::tan;
    Verdict v;
    v.name = "certify(level " + std::to_string(ps.level) + ")";
    ResidualSink<Real> sink{v};
    const Real eps = Real(config.eps);
    const int n = ps.level;

    sink.equality("eps_formula", ps.eps_n, eps_level(eps, n));
    sink.inequality("eps_below_eps", ps.eps_n, eps, true);
    sink.equality("theta_formula", ps.theta, acos(Real(1) / (1 + ps.eps_n)));
    sink.inequality("c_positive", Real(0), ps.c_n, true);

    if (n == 1) {
        sink.equality("sigma_base", ps.sigma_n, Real(1));
        sink.equality("c_base", ps.c_n, start_distance<Real>(config, 0));
        sink.summarize(n);
        return v;
    }

    if (prior.size() < static_cast<std::size_t>(n - 1) || !ps.r || !ps.rho || !ps.phi || !ps.tau ||
        !ps.rho_prime || !ps.delta_n || !ps.ell || !ps.p) {
        sink.add("structure", -1.0, false);
        return v;
    }
    const ParameterSet<Real>& prev = prior[static_cast<std::size_t>(n - 2)];
    const Real r = *ps.r;
    const Real rho = *ps.rho;
    const Real phi = *ps.phi;
    const Real sigma = ps.sigma_n;
    const Real delta = *ps.delta_n;
    const std::int64_t p = *ps.p;

    sink.inequality("eps_increasing", prev.eps_n, ps.eps_n, true);
    sink.inequality("delta_positive", Real(0), delta, true);
    if (options.delta_override) {
        const auto idx = static_cast<std::size_t>(n - 2);
        const bool have = idx < options.delta_override->size();
        sink.add("delta_override", 0.0, have && Real((*options.delta_override)[idx]) == delta);
    } else {
        std::vector<Real> safety;
        for (std::size_t i = 0; i < static_cast<std::size_t>(n - 1); ++i) {
            safety.push_back(prior[i].c_n);
        }
        sink.equality("delta_formula", delta, delta_level<Real>(safety, n));
    }

    const Real ell = prev.sigma_n * (1 + prev.eps_n);
    sink.equality("ell_formula", *ps.ell, ell);
    const bool p_ok = p >= 1 && p == ceil_to_int(Real(ell / (delta / 2)));
    sink.add("p_formula", p_ok ? 0.0 : -1.0, p_ok);
    sink.inequality("piece_le_half_delta", ell / Real(p), delta / 2);

    const Real piece = prev.sigma_n / Real(p);
    const Real t1 = r_term_speed(piece, ps.eps_n, prev.eps_n);
    const Real t2 = r_term_delta(delta, ps.eps_n);
    const Real t3 = start_distance<Real>(config, static_cast<std::size_t>(n - 1));
    sink.inequality("r_le_speed_term", r, t1);
    sink.inequality("r_le_delta_term", r, t2);
    sink.inequality("r_le_start_distance", r, t3);
    sink.equality("r_formula", r, std::min({t1, t2, t3}));

    sink.equality("rho_formula", rho, 2 * r / ps.eps_n);
    const Real denom = rho * cos(phi) - 2 * r;
    sink.inequality("phi_denominator_positive", Real(0), denom, true);
    sink.inequality("phi_positive", Real(0), phi, true);
    sink.inequality("phi_le_half_pi", phi, pi<Real>() / 2);
    sink.equality("phi_equation", tan(ps.theta), rho * sin(phi) / denom);

    sink.inequality("sigma_arcsin", sigma_constraint_lhs(sigma, r, rho, ps.eps_n), phi);
    sink.inequality("sigma_cap", sigma, r / (3 + ps.eps_n), true);

    sink.equality("tau_formula", *ps.tau, 6 * pi<Real>() * r / ps.eps_n);
    sink.equality("rho_prime_formula", *ps.rho_prime, rho + r + (3 + ps.eps_n) * sigma);
    sink.equality("c_formula", ps.c_n, r - (3 + ps.eps_n) * sigma);
    sink.summarize(n);
    return v;
}

#define ESCAPE_INSTANTIATE_PARAMS(Real)                                                                         \
    template Real eps_level<Real>(const Real&, int);                                                          \
    template Real delta_level<Real>(std::span<const Real>, int);                                              \
    template Real solve_phi<Real>(const Real&, const Real&, const Real&);                                     \
    template Real solve_sigma<Real>(const Real&, const Real&, const Real&, const Real&);                      \
    template Real sigma_constraint_lhs<Real>(const Real&, const Real&, const Real&, const Real&);             \
    template Real r_term_speed<Real>(const Real&, const Real&, const Real&);                                  \
    template Real r_term_delta<Real>(const Real&, const Real&);                                               \
    template Cascade<Real> derive_cascade<Real>(const StartConfiguration&, int, const CascadeOptions&,        \
                                                std::vector<PrecisionDiagnostic>*);                           \
    template Verdict certify<Real>(const ParameterSet<Real>&, std::span<const ParameterSet<Real>>,            \
                                   const StartConfiguration&, const CascadeOptions&);                         \
    template std::vector<Real> active_deltas<Real>(const Cascade<Real>&);

ESCAPE_INSTANTIATE_PARAMS(double)
ESCAPE_INSTANTIATE_PARAMS(Extended)

}  // namespace escape
