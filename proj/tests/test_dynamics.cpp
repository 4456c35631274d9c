#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "twocentre/dynamics.hpp"
#include "twocentre/poisson.hpp"
#include "twocentre/sampling.hpp"
#include "twocentre/systems.hpp"

using namespace twocentre;

namespace {

// frozen acceptance-style initial data: repulsive system, orbit stays away
// from the centres (min R along the orbit is about 0.22)
PhasePoint reference_point(double nu) {
    const double n = std::sqrt(0.5 * 0.5 + 0.5 * 0.5 + 0.5);
    const Vec3 q0 = (1.0 / n) * Vec3{0.5, 0.5, std::sqrt(0.5)};
    Vec3 t{0.4, -0.3, 0.1};
    t = t - dot(t, q0) * q0;
    return {t + nu * q0, q0};
}

const SystemParams kRepulsive{2.0, 1.0, -1.0, Model::Spherical};

}  // namespace

TEST_CASE("geodesic flow: |q| = 1 and M constant") {
    SystemParams p = kRepulsive;
    p.mu = 0.0;
    IntegratorConfig cfg;
    cfg.t_end = 10.0;
    cfg.sample_dt = 0.01;
    const PhasePoint x0 = reference_point(0.0);
    const TrajectoryRecord tr = integrate(x0, p, cfg);
    REQUIRE(tr.reason == TerminationReason::Completed);
    REQUIRE(tr.t.back() == Catch::Approx(10.0));
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        REQUIRE(std::abs(std::sqrt(dot(tr.state[i].q, tr.state[i].q)) - 1.0) < 1e-9);
        for (int k = 0; k < 3; ++k)
            REQUIRE(tr.state[i].M[k] == Catch::Approx(x0.M[k]).margin(1e-9));
    }
}

TEST_CASE("RK45 conservation over t_end = 100 at tol 1e-10") {
    IntegratorConfig cfg;  // defaults: rk45, 1e-10, t_end 100
    for (double nu : {0.0, 1.0}) {
        const TrajectoryRecord tr = integrate(reference_point(nu), kRepulsive, cfg);
        REQUIRE(tr.reason == TerminationReason::Completed);
        const DriftReport dr = drift_report(tr);
        INFO("nu=" << nu << " dH=" << dr.dH << " dF=" << dr.dF << " dC1=" << dr.dC1
                   << " dC2=" << dr.dC2);
        REQUIRE(dr.dH <= 1e-6);
        REQUIRE(dr.dF <= 1e-6);
        REQUIRE(dr.dC1 <= 1e-8);
        REQUIRE(dr.dC2 <= 1e-8);
        // empirical bound 100 * tol * t_end
        REQUIRE(dr.dH <= 100 * 1e-10 * cfg.t_end);
    }
}

TEST_CASE("attractive benchmark orbit from rest above the north pole") {
    // passes within 1e-6 even though the orbit dips to R ~ 2e-5 near a centre
    const SystemParams p{2.0, 1.0, 1.0, Model::Spherical};
    PhasePoint x0;
    x0.M = {0.0, 0.4, 0.3};
    x0.q = {0.0, 0.0, 1.0};
    IntegratorConfig cfg;
    cfg.t_end = 100.0;
    const TrajectoryRecord tr = integrate(x0, p, cfg);
    REQUIRE(tr.reason == TerminationReason::Completed);
    const DriftReport dr = drift_report(tr);
    REQUIRE(dr.dH <= 1e-6);
    REQUIRE(dr.dF <= 1e-6);
    // record invariants: strictly increasing times, all columns populated
    REQUIRE(tr.state.size() == tr.t.size());
    REQUIRE(tr.H.size() == tr.t.size());
    REQUIRE(tr.F.size() == tr.t.size());
    REQUIRE(tr.C1.size() == tr.t.size());
    REQUIRE(tr.C2.size() == tr.t.size());
    for (std::size_t i = 1; i < tr.t.size(); ++i) REQUIRE(tr.t[i] > tr.t[i - 1]);
}

TEST_CASE("time reversal returns to the initial point") {
    IntegratorConfig cfg;
    cfg.t_end = 10.0;
    cfg.sample_dt = 10.0;
    for (double nu : {0.0, 0.7}) {
        const PhasePoint x0 = reference_point(nu);
        const TrajectoryRecord fwd = integrate(x0, kRepulsive, cfg);
        REQUIRE(fwd.reason == TerminationReason::Completed);
        PhasePoint xr = fwd.state.back();
        xr.M = -xr.M;
        const TrajectoryRecord back = integrate(xr, kRepulsive, cfg);
        REQUIRE(back.reason == TerminationReason::Completed);
        PhasePoint xb = back.state.back();
        xb.M = -xb.M;
        for (int i = 0; i < 3; ++i) {
            REQUIRE(xb.M[i] == Catch::Approx(x0.M[i]).margin(1e-6));
            REQUIRE(xb.q[i] == Catch::Approx(x0.q[i]).margin(1e-6));
        }
    }
}

TEST_CASE("RK4 fixed step: halving the step divides the H drift by about 16") {
    IntegratorConfig cfg;
    cfg.method = IntegratorMethod::RK4Fixed;
    cfg.t_end = 10.0;
    cfg.sample_dt = 10.0;
    const PhasePoint x0 = reference_point(0.0);
    const double H0 = hamiltonian(x0, kRepulsive);
    auto drift_at = [&](double h) {
        cfg.step = h;
        const TrajectoryRecord tr = integrate(x0, kRepulsive, cfg);
        REQUIRE(tr.reason == TerminationReason::Completed);
        return std::abs(tr.H.back() - H0);
    };
    const double d1 = drift_at(0.01);
    const double d2 = drift_at(0.005);
    INFO("drift(h)=" << d1 << " drift(h/2)=" << d2);
    const double ratio = d1 / d2;
    REQUIRE(ratio >= 12.0);
    REQUIRE(ratio <= 20.0);
}

TEST_CASE("drift report on a fixed point is zero") {
    // M = 0 at a potential minimum is not a fixed point in general; instead
    // use the trivial check: a single-sample trajectory reports zero drift.
    TrajectoryRecord tr;
    tr.t = {0.0};
    tr.state = {reference_point(0.0)};
    tr.H = {1.0};
    tr.F = {2.0};
    tr.C1 = {1.0};
    tr.C2 = {0.0};
    const DriftReport dr = drift_report(tr);
    REQUIRE(dr.dH == 0.0);
    REQUIRE(dr.dF == 0.0);
    REQUIRE(dr.dC1 == 0.0);
    REQUIRE(dr.dC2 == 0.0);
    REQUIRE_THROWS_AS(drift_report(TrajectoryRecord{}), std::invalid_argument);
}

TEST_CASE("attractive fall into a centre terminates as singularity encounter") {
    SystemParams p = kRepulsive;
    p.mu = 1.0;  // attractive
    const Centres c = centres(p);
    // at rest, slightly off the + centre
    const double th = 0.05;
    PhasePoint x0;
    x0.q = std::cos(th) * c.plus + std::sin(th) * Vec3{0.0, 1.0, 0.0};
    x0.M = {0, 0, 0};
    IntegratorConfig cfg;
    cfg.t_end = 20.0;
    cfg.sample_dt = 0.01;
    const TrajectoryRecord tr = integrate(x0, p, cfg);
    REQUIRE(tr.reason == TerminationReason::SingularityEncounter);
    REQUIRE(!tr.t.empty());  // partial trajectory, not an exception
    REQUIRE(tr.t.back() < 20.0);
}

TEST_CASE("leaf projection") {
    PhasePoint x = reference_point(0.3);
    SECTION("idempotent on on-leaf points") {
        const PhasePoint y = leaf_project(x, 1.0, 0.3);
        for (int i = 0; i < 3; ++i) {
            REQUIRE(y.M[i] == Catch::Approx(x.M[i]).margin(1e-15));
            REQUIRE(y.q[i] == Catch::Approx(x.q[i]).margin(1e-15));
        }
    }
    SECTION("restores the Casimirs exactly after a radial perturbation") {
        PhasePoint z = x;
        z.q = (1.0 + 1e-6) * z.q;
        const PhasePoint y = leaf_project(z, 1.0, 0.3);
        REQUIRE(dot(y.q, y.q) == Catch::Approx(1.0).margin(1e-15));
        REQUIRE(dot(y.M, y.q) == Catch::Approx(0.3).margin(1e-14));
        // tangential M components untouched
        const Vec3 tang = y.M - dot(y.M, y.q) * y.q;
        const Vec3 tang0 = z.M - dot(z.M, y.q) * y.q;
        for (int i = 0; i < 3; ++i) REQUIRE(tang[i] == Catch::Approx(tang0[i]).margin(1e-12));
    }
    SECTION("q = 0 is a domain error") {
        PhasePoint z;
        z.M = {1, 0, 0};
        z.q = {0, 0, 0};
        REQUIRE_THROWS_AS(leaf_project(z, 1.0, 0.0), std::domain_error);
    }
}

TEST_CASE("per-step leaf projection pins the Casimirs") {
    IntegratorConfig cfg;
    cfg.method = IntegratorMethod::RK4Fixed;
    cfg.step = 1e-3;
    cfg.t_end = 100.0;
    cfg.sample_dt = 0.1;
    cfg.projection = ProjectionMode::Leaf;
    const TrajectoryRecord tr = integrate(reference_point(0.5), kRepulsive, cfg);
    REQUIRE(tr.reason == TerminationReason::Completed);
    const DriftReport dr = drift_report(tr);
    REQUIRE(dr.dC1 <= 1e-13);
    REQUIRE(dr.dC2 <= 1e-13);

    SECTION("same with the adaptive integrator, measured at step endpoints") {
        // interpolated samples carry the O(h^4) dense-output sagitta, so the
        // projection guarantee is asserted on accepted steps (sparse cadence)
        IntegratorConfig ac;
        ac.t_end = 50.0;
        ac.sample_dt = 50.0;
        ac.projection = ProjectionMode::Leaf;
        const TrajectoryRecord ta = integrate(reference_point(0.5), kRepulsive, ac);
        REQUIRE(ta.reason == TerminationReason::Completed);
        const DriftReport da = drift_report(ta);
        REQUIRE(da.dC1 <= 1e-13);
        REQUIRE(da.dC2 <= 1e-13);
    }
}

TEST_CASE("adaptive Casimir drift at tol 1e-10") {
    IntegratorConfig cfg;
    cfg.t_end = 100.0;
    const TrajectoryRecord tr = integrate(reference_point(0.5), kRepulsive, cfg);
    const DriftReport dr = drift_report(tr);
    REQUIRE(dr.dC1 <= 1e-8);
    REQUIRE(dr.dC2 <= 1e-8);
}

TEST_CASE("hyperbolic scattering trajectory conserves its integrals") {
    // repulsive two-centre scattering on the hyperboloid; orbits escape
    // exponentially (q3 ~ e^{1.7 t}), so the horizon is chosen while the
    // ambient coordinates still hold full double precision (q3 <= ~1e3)
    const SystemParams p{1.0, 2.0, 1.0, Model::Hyperbolic};
    PhasePoint x0;
    x0.M = {0.32, 0.07, -0.04};
    x0.q = {-0.09, -0.39, std::sqrt(1.0 + 0.09 * 0.09 + 0.39 * 0.39)};
    IntegratorConfig cfg;
    cfg.t_end = 4.0;
    cfg.sample_dt = 0.01;
    const TrajectoryRecord tr = integrate(x0, p, cfg);
    REQUIRE(tr.reason == TerminationReason::Completed);
    const DriftReport dr = drift_report(tr);
    REQUIRE(dr.dH <= 1e-8);
    REQUIRE(dr.dF <= 1e-8);
    REQUIRE(dr.dC1 <= 1e-8);
    REQUIRE(dr.dC2 <= 1e-8);
}

TEST_CASE("config validation") {
    IntegratorConfig cfg;
    cfg.t_end = -1.0;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = IntegratorConfig{};
    cfg.abs_tol = 0.0;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
}
