#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "twocentre/dynamics.hpp"
#include "twocentre/elliptic.hpp"
#include "twocentre/poisson.hpp"
#include "twocentre/sampling.hpp"
#include "twocentre/systems.hpp"

using namespace twocentre;

namespace {
const SystemParams kP{2.0, 1.0, 1.3, Model::Spherical};
constexpr std::uint64_t kSeed = 31337;

Vec3 random_unit(Rng& rng) {
    Vec3 q;
    double n2;
    do {
        q = {rng.normal(), rng.normal(), rng.normal()};
        n2 = dot(q, q);
    } while (n2 < 1e-12);
    return (1.0 / std::sqrt(n2)) * q;
}

std::array<int, 3> octant_of(const Vec3& q) {
    return {q.x1 >= 0 ? 1 : -1, q.x2 >= 0 ? 1 : -1, q.x3 >= 0 ? 1 : -1};
}

PhasePoint interior_leaf_point(Rng& rng, double nu, double margin = 2e-2) {
    for (;;) {
        PhasePoint x = sample_leaf_point(rng, 1.0, nu);
        x.q.x3 = std::abs(x.q.x3);
        x.M = x.M + (nu - dot(x.M, x.q)) * x.q;
        const EllipticPoint u = to_elliptic(x.q, kP);
        if (chart_margin(u, kP) > margin) return x;
    }
}

}  // namespace

TEST_CASE("to_elliptic examples") {
    auto u = to_elliptic({0, 0, 1}, kP);
    REQUIRE(u.u1 == Catch::Approx(1.0));
    REQUIRE(u.u2 == Catch::Approx(2.0));
    u = to_elliptic({1, 0, 0}, kP);
    REQUIRE(u.u1 == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(u.u2 == Catch::Approx(1.0));
    u = to_elliptic({0, 1, 0}, kP);
    REQUIRE(u.u1 == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(u.u2 == Catch::Approx(2.0));
    REQUIRE_THROWS_AS(to_elliptic({0, 0, 2}, kP), std::domain_error);
}

TEST_CASE("from_elliptic examples and domain") {
    Vec3 q = from_elliptic({1.0, 2.0}, {1, 1, 1}, kP);
    REQUIRE(q.x1 == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(q.x2 == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(q.x3 == Catch::Approx(1.0));
    q = from_elliptic({0.5, 1.5}, {1, 1, 1}, kP);
    REQUIRE(q.x1 == Catch::Approx(0.6123724356957945));
    REQUIRE(q.x2 == Catch::Approx(0.5));
    REQUIRE(q.x3 == Catch::Approx(0.6123724356957945));
    REQUIRE_THROWS_AS(from_elliptic({1.5, 1.7}, {1, 1, 1}, kP), std::domain_error);
}

TEST_CASE("root ordering on 10^4 random sphere points") {
    CAPTURE(kSeed);
    Rng rng(kSeed);
    for (int i = 0; i < 10000; ++i) {
        const Vec3 q = random_unit(rng);
        const auto u = to_elliptic(q, kP);
        REQUIRE(u.u1 >= -1e-12);
        REQUIRE(u.u1 <= kP.B + 1e-12);
        REQUIRE(u.u2 >= kP.B - 1e-12);
        REQUIRE(u.u2 <= kP.A + 1e-12);
    }
}

TEST_CASE("round trip from_elliptic . to_elliptic on the chart interior") {
    Rng rng(kSeed + 1);
    int done = 0;
    while (done < 1000) {
        const Vec3 q = random_unit(rng);
        const auto u = to_elliptic(q, kP);
        if (chart_margin(u, kP) < 1e-6 * kP.A) continue;
        ++done;
        const Vec3 qr = from_elliptic(u, octant_of(q), kP);
        REQUIRE(qr.x1 == Catch::Approx(q.x1).margin(1e-10));
        REQUIRE(qr.x2 == Catch::Approx(q.x2).margin(1e-10));
        REQUIRE(qr.x3 == Catch::Approx(q.x3).margin(1e-10));
    }
}

TEST_CASE("R identity in elliptic coordinates") {
    REQUIRE(R_in_elliptic({1.0, 2.0}) == Catch::Approx(3.0 - 2.0 * std::sqrt(2.0)));
    REQUIRE(R_in_elliptic({1.0, 1.0}) == 0.0);  // the centres: u1 = u2 = B
    Rng rng(kSeed + 2);
    int done = 0;
    while (done < 1000) {
        Vec3 q = random_unit(rng);
        q.x3 = std::abs(q.x3);  // q3 > 0 branch
        const auto u = to_elliptic(q, kP);
        ++done;
        REQUIRE(std::abs(R_in_elliptic(u) - R_value(q, kP)) < 1e-12);
    }
}

TEST_CASE("confocal polynomial sign makes the metric positive") {
    REQUIRE(confocal_f(0.5, kP) == Catch::Approx(-1.5));
    Rng rng(kSeed + 3);
    for (int i = 0; i < 100; ++i) {
        const double u1 = rng.uniform(1e-3, kP.B - 1e-3);
        const double u2 = rng.uniform(kP.B + 1e-3, kP.A - 1e-3);
        REQUIRE(confocal_f(u1, kP) < 0.0);
        REQUIRE((u1 - u2) / confocal_f(u1, kP) > 0.0);
        REQUIRE((u2 - u1) / confocal_f(u2, kP) > 0.0);
    }
}

TEST_CASE("gauge potential") {
    REQUIRE(gauge_A({1, 0, 0}, 0.5).x2 == Catch::Approx(0.0).margin(1e-15));  // equator: q3 = 0
    const Vec3 a = gauge_A({0.6, 0.0, 0.8}, 0.0);
    REQUIRE(a.x1 == 0.0);
    REQUIRE(a.x2 == 0.0);
    REQUIRE_THROWS_AS(gauge_A({0, 0, 1}, 0.5), std::domain_error);  // pole

    const GaugePotential gp{0.5};
    REQUIRE(gp.excluded({0, 0, 1}));
    REQUIRE(!gp.excluded({0.6, 0, 0.8}));
    REQUIRE(gp({0.6, 0, 0.8}).x2 == Catch::Approx(gauge_A({0.6, 0, 0.8}, 0.5).x2));
}

TEST_CASE("dA density equals nu (chart-oriented frame)") {
    Rng rng(kSeed + 4);
    for (double nu : {0.0, 0.5, -1.0}) {
        for (int i = 0; i < 20; ++i) {
            Vec3 q = random_unit(rng);
            if (q.x1 * q.x1 + q.x2 * q.x2 < 0.05) continue;
            REQUIRE(verify_dA(q, nu) == Catch::Approx(nu).margin(1e-6));
        }
    }
}

TEST_CASE("gauge pullback curl matches the elliptic field density B(u)") {
    // d/du1 A2 - d/du2 A1 = sign(q1 q2) B(u) on the q3 > 0 branch
    const double nu = 0.7;
    Rng rng(kSeed + 5);
    for (const std::array<int, 3> s :
         {std::array<int, 3>{1, 1, 1}, {1, -1, 1}, {-1, 1, 1}, {-1, -1, 1}}) {
        for (int i = 0; i < 25; ++i) {
            const EllipticPoint u{rng.uniform(0.1, kP.B - 0.1), rng.uniform(kP.B + 0.1, kP.A - 0.1)};
            const double h = 1e-6;
            const auto ap = gauge_pullback({u.u1 + h, u.u2}, s, nu, kP);
            const auto am = gauge_pullback({u.u1 - h, u.u2}, s, nu, kP);
            const auto bp = gauge_pullback({u.u1, u.u2 + h}, s, nu, kP);
            const auto bm = gauge_pullback({u.u1, u.u2 - h}, s, nu, kP);
            const double curl = (ap[1] - am[1]) / (2 * h) - (bp[0] - bm[0]) / (2 * h);
            const double want = s[0] * s[1] * magnetic_density(u, nu, kP);
            REQUIRE(curl == Catch::Approx(want).margin(1e-6));
        }
    }
}

TEST_CASE("phase_to_elliptic: metric-inverse kinetic identity") {
    Rng rng(kSeed + 6);
    for (double nu : {0.0, 0.5, 1.0}) {
        for (int i = 0; i < 100; ++i) {
            const PhasePoint x = interior_leaf_point(rng, nu);
            const EllipticPhasePoint ep = phase_to_elliptic(x, kP, nu);
            const Vec3 L = x.M - nu * x.q;
            const double kin =
                0.5 * (confocal_f(ep.u.u1, kP) / (ep.u.u1 - ep.u.u2) * ep.pt1 * ep.pt1 +
                       confocal_f(ep.u.u2, kP) / (ep.u.u2 - ep.u.u1) * ep.pt2 * ep.pt2);
            REQUIRE(kin == Catch::Approx(0.5 * dot(L, L)).margin(1e-10));
        }
    }
}

TEST_CASE("pure monopole momentum: L = 0 gives vanishing magnetic momenta") {
    Rng rng(kSeed + 7);
    const double nu = 0.8;
    for (int i = 0; i < 20; ++i) {
        PhasePoint x = interior_leaf_point(rng, nu);
        x.M = nu * x.q;  // L = 0
        const EllipticPhasePoint ep = phase_to_elliptic(x, kP, nu);
        REQUIRE(ep.pt1 == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(ep.pt2 == Catch::Approx(0.0).margin(1e-12));
        // the Darboux (canonical) momenta p = pt + A(u) then sit on the gauge
        const auto a = gauge_pullback(ep.u, ep.octant, nu, kP);
        REQUIRE(ep.pt1 + a[0] == Catch::Approx(a[0]));
        REQUIRE(ep.pt2 + a[1] == Catch::Approx(a[1]));
    }
}

TEST_CASE("reduced bracket relations of (u, pt)") {
    // {pt_i, u_j} = delta_ij and {pt1, pt2} = B(u), evaluated through the
    // e(3)* bracket at leaf points
    Rng rng(kSeed + 8);
    const PoissonStructure P{Signature::Euclidean};
    const double nu = 0.7;
    auto u_func = [&](int i) {
        return [i](const auto& z) {
            using T = std::decay_t<decltype(z.M.x1)>;
            const T S = kP.B * z.q.x1 * z.q.x1 + kP.A * z.q.x2 * z.q.x2 +
                        (kP.A + kP.B) * z.q.x3 * z.q.x3;
            const T Pq = kP.A * kP.B * z.q.x3 * z.q.x3;
            const T u2 = 0.5 * (S + sqrt(S * S - 4.0 * Pq));
            return i == 0 ? Pq / u2 : u2;
        };
    };
    auto pt_func = [&](int i, const std::array<int, 3>& signs) {
        return [i, signs, nu](const auto& z) {
            using T = std::decay_t<decltype(z.M.x1)>;
            const T S = kP.B * z.q.x1 * z.q.x1 + kP.A * z.q.x2 * z.q.x2 +
                        (kP.A + kP.B) * z.q.x3 * z.q.x3;
            const T Pq = kP.A * kP.B * z.q.x3 * z.q.x3;
            const T u2 = 0.5 * (S + sqrt(S * S - 4.0 * Pq));
            const T u1 = Pq / u2;
            Vec3T<T> L = z.M - nu * z.q;
            Vec3T<T> pc = cross(z.q, L);
            // dq/du_i at (u1,u2) via one more dual level over the scalar T
            using DU = Dual<T, 2>;
            const auto qd = from_elliptic_t<DU>(DU::seeded(u1, 0), DU::seeded(u2, 1), signs, kP);
            return pc.x1 * qd.x1.d[i] + pc.x2 * qd.x2.d[i] + pc.x3 * qd.x3.d[i];
        };
    };
    int done = 0;
    while (done < 15) {
        const PhasePoint x = interior_leaf_point(rng, nu, 5e-2);
        const auto signs = octant_of(x.q);
        ++done;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double br = poisson_bracket(pt_func(i, signs), u_func(j), x, P);
                REQUIRE(br == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-8));
            }
        const double br12 = poisson_bracket(pt_func(0, signs), pt_func(1, signs), x, P);
        const auto u = to_elliptic(x.q, kP);
        // the field density carries the chart orientation, like the gauge curl
        REQUIRE(br12 ==
                Catch::Approx(signs[0] * signs[1] * magnetic_density(u, nu, kP)).margin(1e-7));
    }
}

TEST_CASE("H agreement: elliptic form equals the Cartesian Hamiltonian") {
    Rng rng(kSeed + 9);
    for (double nu : {0.0, 0.5, -0.5, 1.0, -1.0, 2.0}) {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const PhasePoint x = interior_leaf_point(rng, nu);
            const EllipticPhasePoint ep = phase_to_elliptic(x, kP, nu);
            worst = std::max(worst, std::abs(H_elliptic(ep, kP, nu) - hamiltonian(x, kP)));
        }
        INFO("nu=" << nu << " worst=" << worst);
        REQUIRE(worst < 1e-9);
    }
}

TEST_CASE("F agreement: elliptic form equals the Cartesian integral") {
    Rng rng(kSeed + 10);
    for (double nu : {0.0, 0.5, -0.5, 1.0}) {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const PhasePoint x = interior_leaf_point(rng, nu);
            const EllipticPhasePoint ep = phase_to_elliptic(x, kP, nu);
            worst = std::max(worst, std::abs(F_elliptic(ep, kP, nu) - integral_F(x, kP)));
        }
        INFO("nu=" << nu << " worst=" << worst);
        REQUIRE(worst < 1e-9);
    }
}

TEST_CASE("chart errors") {
    PhasePoint x;
    x.q = {0, 0, 1};  // u = (B, A): chart boundary
    x.M = {0.3, 0.2, 0};
    x.M = x.M - dot(x.M, x.q) * x.q;
    REQUIRE_THROWS_AS(phase_to_elliptic(x, kP, 0.0), chart_error);
    REQUIRE_THROWS_AS(H_elliptic({{1.0, 1.0}, 0.1, 0.1}, kP, 0.0), std::domain_error);
}

TEST_CASE("separation constants along a nu = 0 trajectory") {
    SystemParams p = kP;
    p.mu = -1.0;  // repulsive: the orbit stays clear of the centres
    PhasePoint x0;
    {
        const double n = std::sqrt(0.5 * 0.5 + 0.5 * 0.5 + 0.5);
        x0.q = (1.0 / n) * Vec3{0.5, 0.5, std::sqrt(0.5)};
        Vec3 t{0.4, -0.3, 0.1};
        x0.M = t - dot(t, x0.q) * x0.q;
    }
    IntegratorConfig cfg;
    cfg.t_end = 50.0;
    cfg.sample_dt = 0.05;
    const TrajectoryRecord tr = integrate(x0, p, cfg);
    REQUIRE(tr.reason == TerminationReason::Completed);
    const SeparationSeries ss = separation_check(tr, p);
    REQUIRE(ss.t.size() > 500);
    double scale = 1.0;
    for (std::size_t i = 0; i < ss.t.size(); ++i)
        scale = std::max({scale, std::abs(ss.k1[i]), std::abs(ss.k2[i])});
    double worst_eq = 0.0, drift = 0.0;
    for (std::size_t i = 0; i < ss.t.size(); ++i) {
        worst_eq = std::max(worst_eq, std::abs(ss.k1[i] - ss.k2[i]));
        drift = std::max(drift, std::abs(ss.k1[i] - ss.k1.front()));
    }
    INFO("samples=" << ss.t.size() << " worst_eq=" << worst_eq << " drift=" << drift
                    << " scale=" << scale);
    REQUIRE(worst_eq <= 1e-8 * scale);
    REQUIRE(drift <= 1e-6 * scale);

    SECTION("mu = 0 reduces to geodesic separation") {
        SystemParams g = p;
        g.mu = 0.0;
        const TrajectoryRecord tg = integrate(x0, g, cfg);
        const SeparationSeries sg = separation_check(tg, g);
        REQUIRE(sg.t.size() > 500);
        for (std::size_t i = 0; i < sg.t.size(); i += 37)
            REQUIRE(sg.k1[i] == Catch::Approx(sg.k2[i]).margin(1e-8 * scale));
    }
}

TEST_CASE("separation_check rejects off-leaf trajectories") {
    TrajectoryRecord tr;
    tr.t = {0.0};
    PhasePoint x;
    x.q = {0.6, 0.48, 0.64};
    x.q = (1.0 / std::sqrt(dot(x.q, x.q))) * x.q;
    x.M = x.q;  // (M,q) = 1 != 0
    tr.state = {x};
    tr.H = {1.0};
    tr.F = {0.0};
    tr.C1 = {1.0};
    tr.C2 = {1.0};
    REQUIRE_THROWS_AS(separation_check(tr, kP), std::invalid_argument);
}
