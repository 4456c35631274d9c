#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "twocentre/core.hpp"
#include "twocentre/poisson.hpp"
#include "twocentre/systems.hpp"

namespace twocentre {

enum class IntegratorMethod { RK4Fixed, RK45Adaptive };
enum class ProjectionMode { None, Leaf };
enum class TerminationReason { Completed, MaxSteps, SingularityEncounter };

inline const char* termination_name(TerminationReason r) {
    switch (r) {
        case TerminationReason::Completed: return "completed";
        case TerminationReason::MaxSteps: return "max-steps";
        default: return "singularity encounter";
    }
}

struct IntegratorConfig {
    IntegratorMethod method = IntegratorMethod::RK45Adaptive;
    double step = 1e-3;       // RK4 fixed step
    double abs_tol = 1e-10;   // RK45
    double rel_tol = 1e-10;   // RK45
    double max_step = 1e-2;   // RK45 step cap; keeps Casimir drift secular-free
    double t_end = 100.0;
    std::int64_t max_steps = 50'000'000;
    double sample_dt = 0.05;
    ProjectionMode projection = ProjectionMode::None;
    double singularity_radius = 1e-8;  // threshold on R

    void validate() const {
        if (!(t_end > 0)) throw std::invalid_argument("IntegratorConfig: t_end must be > 0");
        if (method == IntegratorMethod::RK4Fixed && !(step > 0))
            throw std::invalid_argument("IntegratorConfig: step must be > 0");
        if (method == IntegratorMethod::RK45Adaptive && !(abs_tol > 0 && rel_tol > 0))
            throw std::invalid_argument("IntegratorConfig: tolerances must be > 0");
        if (!(sample_dt > 0)) throw std::invalid_argument("IntegratorConfig: sample_dt must be > 0");
        if (max_steps <= 0) throw std::invalid_argument("IntegratorConfig: max_steps must be > 0");
    }
};

/// Sampled trajectory with the four conserved quantities per sample.
struct TrajectoryRecord {
    std::vector<double> t;
    std::vector<PhasePoint> state;
    std::vector<double> H, F, C1, C2;
    TerminationReason reason = TerminationReason::Completed;
};

struct DriftReport {
    double dH = 0, dF = 0, dC1 = 0, dC2 = 0;
};

/// Per-quantity max |Q(t) - Q(0)| / max(1, |Q(0)|).
inline DriftReport drift_report(const TrajectoryRecord& tr) {
    if (tr.t.empty()) throw std::invalid_argument("drift_report: empty trajectory");
    DriftReport r;
    auto scan = [&](const std::vector<double>& col, double& out) {
        const double q0 = col.front();
        const double den = std::max(1.0, std::abs(q0));
        for (double v : col) out = std::max(out, std::abs(v - q0) / den);
    };
    scan(tr.H, r.dH);
    scan(tr.F, r.dF);
    scan(tr.C1, r.dC1);
    scan(tr.C2, r.dC2);
    return r;
}

/// Rescale q onto (q,Jq) = c1 and shift M along q to restore (M,Jq) = c2.
/// Idempotent; leaves the M components transverse to q untouched.
inline PhasePoint leaf_project(const PhasePoint& x, double c1, double c2,
                               Signature sig = Signature::Euclidean) {
    const double qq = dot_j(x.q, x.q, sig);
    if (!(qq > 0) || !(c1 > 0))
        throw std::domain_error("leaf_project: (q,Jq) and target C1 must be positive");
    PhasePoint y;
    y.q = std::sqrt(c1 / qq) * x.q;
    const double lam = (c2 - dot_j(x.M, y.q, sig)) / c1;
    y.M = x.M + lam * y.q;
    return y;
}

namespace detail {

struct Observables {
    double H, F, C1, C2, R;
};

inline Observables observe(const PhasePoint& x, const SystemParams& p,
                           const PoissonStructure& P) {
    Observables o{};
    o.R = R_value(x.q, p);
    auto [c1, c2] = casimirs(x, P);
    o.C1 = c1;
    o.C2 = c2;
    o.H = hamiltonian(x, p);
    o.F = integral_F(x, p);
    return o;
}

inline PhasePoint axpy(const PhasePoint& x, double h, const PhasePoint& d) {
    return {x.M + h * d.M, x.q + h * d.q};
}

// Dormand-Prince 5(4) tableau
inline constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
inline constexpr double dp_e[7] = {71.0 / 57600,  0.0,          -71.0 / 16695, 71.0 / 1920,
                                   -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

inline double component(const PhasePoint& x, int i) {
    return i < 3 ? x.M[i] : x.q[i - 3];
}

/// Cubic Hermite interpolant between accepted steps (dense output).
inline PhasePoint hermite(const PhasePoint& x0, const PhasePoint& f0, const PhasePoint& x1,
                          const PhasePoint& f1, double h, double s) {
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    PhasePoint out;
    out.M = h00 * x0.M + (h10 * h) * f0.M + h01 * x1.M + (h11 * h) * f1.M;
    out.q = h00 * x0.q + (h10 * h) * f0.q + h01 * x1.q + (h11 * h) * f1.q;
    return out;
}

}  // namespace detail

/// Integrate the Lie-Poisson flow of the family Hamiltonian.
///
/// Samples at multiples of cfg.sample_dt via dense output. Terminates at
/// t_end, at max_steps, or on singularity approach (R below the threshold,
/// or step-size underflow while the right-hand side keeps failing); the
/// partial trajectory is returned with the reason, never an exception.
inline TrajectoryRecord integrate(const PhasePoint& x0, const SystemParams& p,
                                  const IntegratorConfig& cfg) {
    p.validate();
    cfg.validate();
    const PoissonStructure P{p.signature()};
    const bool singular_potential = p.mu != 0.0;

    auto ham = [&p](const auto& x) { return hamiltonian_t(x, p); };
    auto rhs_checked = [&](const PhasePoint& x, PhasePoint& out) -> bool {
        try {
            out = hamiltonian_vector_field(ham, x, P);
        } catch (const std::exception&) {
            return false;
        }
        return is_finite(out);
    };

    TrajectoryRecord tr;
    auto push_sample = [&](double t, const PhasePoint& x) {
        try {
            const auto o = detail::observe(x, p, P);
            tr.t.push_back(t);
            tr.state.push_back(x);
            tr.H.push_back(o.H);
            tr.F.push_back(o.F);
            tr.C1.push_back(o.C1);
            tr.C2.push_back(o.C2);
            return true;
        } catch (const std::exception&) {
            return false;  // sample inside singular set; drop it
        }
    };

    const auto [c1_0, c2_0] = casimirs(x0, P);
    auto project = [&](PhasePoint& x) {
        if (cfg.projection == ProjectionMode::Leaf) x = leaf_project(x, c1_0, c2_0, P.signature);
    };

    if (singular_potential && R_value(x0.q, p) < cfg.singularity_radius)
        throw std::domain_error("integrate: initial point inside singularity radius");
    push_sample(0.0, x0);

    double t = 0.0;
    PhasePoint x = x0;
    PhasePoint f0;
    if (!rhs_checked(x, f0)) {
        tr.reason = TerminationReason::SingularityEncounter;
        return tr;
    }
    double next_sample = cfg.sample_dt;
    std::int64_t steps = 0;

    auto emit_dense = [&](const PhasePoint& xa, const PhasePoint& fa, const PhasePoint& xb,
                          const PhasePoint& fb, double ta, double h) {
        while (next_sample <= ta + h + 1e-14 && next_sample <= cfg.t_end + 1e-14) {
            const double s = (next_sample - ta) / h;
            push_sample(next_sample, detail::hermite(xa, fa, xb, fb, h, s));
            next_sample += cfg.sample_dt;
        }
    };

    if (cfg.method == IntegratorMethod::RK4Fixed) {
        const double h = cfg.step;
        while (t < cfg.t_end - 1e-14) {
            if (++steps > cfg.max_steps) {
                tr.reason = TerminationReason::MaxSteps;
                return tr;
            }
            const double hh = std::min(h, cfg.t_end - t);
            PhasePoint k1 = f0, k2, k3, k4;
            if (!rhs_checked(detail::axpy(x, hh / 2, k1), k2) ||
                !rhs_checked(detail::axpy(x, hh / 2, k2), k3) ||
                !rhs_checked(detail::axpy(x, hh, k3), k4)) {
                tr.reason = TerminationReason::SingularityEncounter;
                return tr;
            }
            PhasePoint x1;
            x1.M = x.M + (hh / 6) * (k1.M + 2.0 * k2.M + 2.0 * k3.M + k4.M);
            x1.q = x.q + (hh / 6) * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
            project(x1);
            PhasePoint f1;
            if (!rhs_checked(x1, f1)) {
                tr.reason = TerminationReason::SingularityEncounter;
                return tr;
            }
            emit_dense(x, f0, x1, f1, t, hh);
            t += hh;
            x = x1;
            f0 = f1;
            if (singular_potential && R_value(x.q, p) < cfg.singularity_radius) {
                tr.reason = TerminationReason::SingularityEncounter;
                return tr;
            }
        }
        tr.reason = TerminationReason::Completed;
        return tr;
    }

    // RK45 adaptive (Dormand-Prince, FSAL, max-norm error estimate)
    double h = std::min(cfg.max_step, std::min(1e-4, cfg.t_end));
    const double h_floor = 1e-14;
    while (t < cfg.t_end - 1e-14) {
        if (++steps > cfg.max_steps) {
            tr.reason = TerminationReason::MaxSteps;
            return tr;
        }
        h = std::min({h, cfg.max_step, cfg.t_end - t});
        PhasePoint k[7];
        k[0] = f0;
        bool stage_ok = true;
        for (int i = 1; i < 7 && stage_ok; ++i) {
            PhasePoint xi = x;
            for (int j = 0; j < i; ++j) xi = detail::axpy(xi, h * detail::dp_a[i][j], k[j]);
            stage_ok = rhs_checked(xi, k[i]);
        }
        if (!stage_ok) {
            h *= 0.25;
            if (h < h_floor) {
                tr.reason = TerminationReason::SingularityEncounter;
                return tr;
            }
            continue;
        }
        PhasePoint x1 = x;
        for (int j = 0; j < 6; ++j) x1 = detail::axpy(x1, h * detail::dp_a[6][j], k[j]);
        // error estimate (difference of the embedded orders)
        double err = 0.0;
        for (int i = 0; i < 6; ++i) {
            double e = 0.0;
            for (int j = 0; j < 7; ++j)
                e += detail::dp_e[j] * detail::component(k[j], i);
            e *= h;
            const double sk = cfg.abs_tol +
                              cfg.rel_tol * std::max(std::abs(detail::component(x, i)),
                                                     std::abs(detail::component(x1, i)));
            err = std::max(err, std::abs(e) / sk);
        }
        if (err <= 1.0) {
            project(x1);
            PhasePoint f1 = k[6];
            if (cfg.projection == ProjectionMode::Leaf && !rhs_checked(x1, f1)) {
                tr.reason = TerminationReason::SingularityEncounter;
                return tr;
            }
            emit_dense(x, f0, x1, f1, t, h);
            t += h;
            x = x1;
            f0 = f1;
            if (singular_potential && R_value(x.q, p) < cfg.singularity_radius) {
                tr.reason = TerminationReason::SingularityEncounter;
                return tr;
            }
        }
        const double fac = std::max(0.2, std::min(5.0, 0.9 * std::pow(std::max(err, 1e-16), -0.2)));
        h *= fac;
        if (h < h_floor) {
            tr.reason = TerminationReason::SingularityEncounter;
            return tr;
        }
    }
    tr.reason = TerminationReason::Completed;
    return tr;
}

}  // namespace twocentre
