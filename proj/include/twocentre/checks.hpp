#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "twocentre/core.hpp"
#include "twocentre/dynamics.hpp"
#include "twocentre/elliptic.hpp"
#include "twocentre/poisson.hpp"
#include "twocentre/quantum.hpp"
#include "twocentre/sampling.hpp"
#include "twocentre/systems.hpp"

namespace twocentre {

/// One named check. kind "assert": pass iff measured <= tolerance.
/// kind "negative": pass iff measured > tolerance (expected-failure control).
/// kind "report": informational, never affects the verdict.
struct CheckResult {
    std::string name;
    std::string kind = "assert";
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    std::string note;
};

inline CheckResult make_assert(std::string name, double measured, double tol,
                               std::string note = {}) {
    return {std::move(name), "assert", measured, tol, measured <= tol, std::move(note)};
}
inline CheckResult make_negative(std::string name, double measured, double threshold,
                                 std::string note = {}) {
    return {std::move(name), "negative", measured, threshold, measured > threshold,
            std::move(note)};
}
inline CheckResult make_report(std::string name, double measured, std::string note = {}) {
    return {std::move(name), "report", measured, 0.0, true, std::move(note)};
}

namespace checks_detail {

/// Admissible random point of the full 6-space for the given model
/// (components uniform in [-2,2], rejecting the potential's singular set
/// and, in the Lorentzian models, the wrong norm regime).
inline PhasePoint sample_admissible(Rng& rng, const SystemParams& p) {
    for (;;) {
        PhasePoint x = sample_box_point(rng);
        switch (p.model) {
            case Model::Spherical: {
                if (dot(x.q, x.q) < 1e-4) continue;
                if (R_value(x.q, p) < 1e-5) continue;
                return x;
            }
            case Model::Hyperbolic: {
                if (dot_j(x.q, x.q, Signature::Lorentzian) < 0.05) continue;
                if (R_value(x.q, p) < 1e-5) continue;
                return x;
            }
            default: {
                if (dot_j(x.q, x.q, Signature::Lorentzian) > -0.05) continue;
                if (R_value(x.q, p) < 1e-3) continue;
                return x;
            }
        }
    }
}

}  // namespace checks_detail

/// Max of |{H,F}| / scale over n admissible random points.
inline CheckResult theorem_bracket_check(const SystemParams& p, int n_points,
                                         std::uint64_t seed) {
    p.validate();
    const PoissonStructure P{p.signature()};
    Rng rng(seed);
    auto H = [&p](const auto& x) { return hamiltonian_t(x, p); };
    auto F = [&p](const auto& x) { return integral_F_t(x, p); };
    double worst = 0.0;
    for (int i = 0; i < n_points; ++i) {
        const PhasePoint x = checks_detail::sample_admissible(rng, p);
        const double br = poisson_bracket(H, F, x, P);
        const double sc = bracket_scale(H, F, x, P);
        worst = std::max(worst, std::abs(br) / sc);
    }
    std::string name = std::string("bracket-HF-") + model_name(p.model) + "-A" +
                       std::to_string(p.A) + "-B" + std::to_string(p.B) + "-mu" +
                       std::to_string(p.mu);
    return make_assert(std::move(name), worst, 1e-9, "max |{H,F}|/scale, n=" +
                                                         std::to_string(n_points));
}

/// Max over {H,C1},{H,C2},{F,C1},{F,C2} of |bracket|/scale at random points.
inline CheckResult casimir_bracket_check(const SystemParams& p, int n_points,
                                         std::uint64_t seed) {
    p.validate();
    const PoissonStructure P{p.signature()};
    Rng rng(seed);
    auto H = [&p](const auto& x) { return hamiltonian_t(x, p); };
    auto F = [&p](const auto& x) { return integral_F_t(x, p); };
    auto C1 = [&P](const auto& x) { return casimir_c1(x, P); };
    auto C2 = [&P](const auto& x) { return casimir_c2(x, P); };
    double worst = 0.0;
    for (int i = 0; i < n_points; ++i) {
        const PhasePoint x = checks_detail::sample_admissible(rng, p);
        auto upd = [&](auto&& f, auto&& c) {
            const double br = std::abs(poisson_bracket(f, c, x, P));
            const double sc = bracket_scale(f, c, x, P);
            if (sc > 0) worst = std::max(worst, br / sc);
        };
        upd(H, C1);
        upd(H, C2);
        upd(F, C1);
        upd(F, C2);
    }
    return make_assert(std::string("bracket-casimirs-") + model_name(p.model), worst, 1e-10,
                       "max |{H or F, C_i}|/scale");
}

/// Killing baseline: bracket with the quadratic integral vanishes on the
/// (M,q)=0 unit leaf and fails off it.
inline std::pair<CheckResult, CheckResult> mamaev_checks(const KillingParams& kp, int n_points,
                                                         std::uint64_t seed) {
    kp.validate();
    const PoissonStructure P{Signature::Euclidean};
    Rng rng(seed);
    auto H = [&kp](const auto& x) { return killing_hamiltonian_t(x, kp); };
    auto F = [&kp](const auto& x) { return mamaev_integral_t(x, kp); };
    double worst_on = 0.0;
    for (int i = 0; i < n_points; ++i) {
        PhasePoint x = sample_leaf_point(rng, 1.0, 0.0);
        const double br = poisson_bracket(H, F, x, P);
        const double sc = bracket_scale(H, F, x, P);
        worst_on = std::max(worst_on, std::abs(br) / sc);
    }
    double worst_off = 0.0;
    for (int i = 0; i < n_points; ++i) {
        PhasePoint x = sample_leaf_point(rng, 1.0, 1.0);
        worst_off = std::max(worst_off, std::abs(poisson_bracket(H, F, x, P)));
    }
    return {make_assert("mamaev-on-leaf", worst_on, 1e-9,
                        "(M,q)=0 leaf, max |{H,F}|/scale, n=" + std::to_string(n_points)),
            make_negative("mamaev-off-leaf-nonzero", worst_off, 1e-3,
                          "negative control: max |{H,F}| on the (M,q)=1 leaf; expected "
                          "nonzero (commutation fails off the special leaf)")};
}

/// Standard verify suite: Theorem certification for the configured parameter
/// sets plus Casimir commutation and the Killing/Mamaev leaf checks.
struct VerifyConfig {
    int points = 1000;
    int leaf_points = 500;
    std::uint64_t seed = 20260809;
    std::vector<std::pair<double, double>> spherical_ab = {{2.0, 1.0}, {5.0, 0.5}};
    std::vector<std::pair<double, double>> hyperbolic_ab = {{1.0, 2.0}, {0.25, 3.0}};  // (A,B)
    std::vector<double> mus = {-1.0, 0.0, 1.0, 3.7};
};

inline std::vector<CheckResult> run_verify_suite(const VerifyConfig& vc) {
    std::vector<CheckResult> out;
    std::uint64_t k = 0;
    for (auto [A, B] : vc.spherical_ab)
        for (double mu : vc.mus) {
            SystemParams p{A, B, mu, Model::Spherical};
            out.push_back(theorem_bracket_check(p, vc.points, vc.seed + 11 * k++));
        }
    for (auto [A, B] : vc.hyperbolic_ab)
        for (double mu : vc.mus) {
            SystemParams p{A, B, mu, Model::Hyperbolic};
            out.push_back(theorem_bracket_check(p, vc.points, vc.seed + 11 * k++));
        }
    out.push_back(casimir_bracket_check(SystemParams{2.0, 1.0, 1.0, Model::Spherical},
                                        vc.points / 4, vc.seed + 101));
    out.push_back(casimir_bracket_check(SystemParams{1.0, 2.0, 1.0, Model::Hyperbolic},
                                        vc.points / 4, vc.seed + 102));
    auto [on_leaf, off_leaf] = mamaev_checks(KillingParams{1.0, 0.6, 0.8}, vc.leaf_points,
                                             vc.seed + 103);
    out.push_back(on_leaf);
    out.push_back(off_leaf);
    return out;
}

inline bool all_pass(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks)
        if (c.kind != "report" && !c.pass) return false;
    return true;
}

}  // namespace twocentre
