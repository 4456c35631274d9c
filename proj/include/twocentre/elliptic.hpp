#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "twocentre/core.hpp"
#include "twocentre/dual.hpp"
#include "twocentre/dynamics.hpp"
#include "twocentre/systems.hpp"

namespace twocentre {

/// Spherical elliptic coordinates: roots u1 <= u2 of
/// u^2 - (B q1^2 + A q2^2 + (A+B) q3^2) u + A B q3^2 on the unit sphere,
/// with 0 <= u1 <= B <= u2 <= A.
struct EllipticPoint {
    double u1 = 0, u2 = 0;
};

/// Phase point in the elliptic chart. pt1, pt2 are the magnetic momenta
/// (kinetic momenta of the reduced motion); the octant signs record which
/// branch of the square roots the chart covers.
struct EllipticPhasePoint {
    EllipticPoint u;
    double pt1 = 0, pt2 = 0;
    std::array<int, 3> octant{1, 1, 1};
    std::string gauge_id = "monopole-balanced";
};

/// f(u) = -4 u (u - A)(u - B); negative on (0,B), positive on (B,A).
template <typename T>
T confocal_f(const T& u, const SystemParams& p) {
    return -4.0 * u * (u - p.A) * (u - p.B);
}

namespace ell_detail {
inline void require_spherical(const SystemParams& p, const char* who) {
    p.validate();
    if (p.model != Model::Spherical)
        throw std::invalid_argument(std::string(who) + ": spherical model only");
}
}  // namespace ell_detail

inline EllipticPoint to_elliptic(const Vec3& q, const SystemParams& p) {
    ell_detail::require_spherical(p, "to_elliptic");
    if (std::abs(dot(q, q) - 1.0) > 1e-10)
        throw std::domain_error("to_elliptic: q must lie on the unit sphere");
    const double S = p.B * q.x1 * q.x1 + p.A * q.x2 * q.x2 + (p.A + p.B) * q.x3 * q.x3;
    const double P = p.A * p.B * q.x3 * q.x3;
    // larger root via the sign-aware formula, smaller via the product
    const double disc = std::max(S * S - 4.0 * P, 0.0);
    const double u2 = 0.5 * (S + std::sqrt(disc));
    const double u1 = u2 > 0.0 ? P / u2 : 0.0;
    return {std::max(u1, 0.0), std::min(u2, p.A)};
}

/// Cartesian point from elliptic coordinates and octant sign bits.
template <typename T>
Vec3T<T> from_elliptic_t(const T& u1, const T& u2, const std::array<int, 3>& signs,
                         const SystemParams& p) {
    using std::sqrt;
    auto clamp0 = [](const T& w) { return deep_value(w) < 0.0 ? T{} : w; };
    const T q1s = clamp0((p.A - u1) * (p.A - u2) / (p.A * (p.A - p.B)));
    const T q2s = clamp0((p.B - u1) * (p.B - u2) / (p.B * (p.B - p.A)));
    const T q3s = clamp0(u1 * u2 / (p.A * p.B));
    return {signs[0] * sqrt(q1s), signs[1] * sqrt(q2s), signs[2] * sqrt(q3s)};
}

inline Vec3 from_elliptic(const EllipticPoint& u, const std::array<int, 3>& signs,
                          const SystemParams& p) {
    ell_detail::require_spherical(p, "from_elliptic");
    if (!(u.u1 >= -1e-12 && u.u1 <= p.B + 1e-12 && u.u2 >= p.B - 1e-12 && u.u2 <= p.A + 1e-12))
        throw std::domain_error("from_elliptic: u outside 0 <= u1 <= B <= u2 <= A");
    return from_elliptic_t(u.u1, u.u2, signs, p);
}

/// R in elliptic coordinates: (sqrt(u1) - sqrt(u2))^2 (q3 > 0 branch).
inline double R_in_elliptic(const EllipticPoint& u) {
    const double d = std::sqrt(u.u1) - std::sqrt(u.u2);
    return d * d;
}

/// Monopole field density in the elliptic chart:
/// B(u) = nu (u2 - u1)/sqrt(-f(u1) f(u2)).
inline double magnetic_density(const EllipticPoint& u, double nu, const SystemParams& p) {
    return nu * (u.u2 - u.u1) /
           std::sqrt(-confocal_f(u.u1, p) * confocal_f(u.u2, p));
}

/// Gauge potential of the monopole with punctures at both poles,
/// A = nu q3 (q1 dq2 - q2 dq1)/(q1^2 + q2^2), returned as Cartesian 1-form
/// components. The excluded set is q1^2 + q2^2 <= 1e-10.
template <typename T>
Vec3T<T> gauge_A_t(const Vec3T<T>& q, double nu) {
    const T r2 = q.x1 * q.x1 + q.x2 * q.x2;
    if (deep_value(r2) <= 1e-10)
        throw std::domain_error("gauge_A: too close to a pole (q1^2+q2^2 <= 1e-10)");
    const T c = nu * q.x3 / r2;
    return {-(c * q.x2), c * q.x1, T{}};
}

inline Vec3 gauge_A(const Vec3& q, double nu) { return gauge_A_t(q, nu); }

/// Monopole gauge potential as an object: evaluator plus its excluded set.
struct GaugePotential {
    double nu = 0.0;
    std::string id = "monopole-balanced";

    Vec3 operator()(const Vec3& q) const { return gauge_A(q, nu); }
    bool excluded(const Vec3& q) const { return q.x1 * q.x1 + q.x2 * q.x2 <= 1e-10; }
};

/// Surface density of dA at q by a central finite-difference exterior
/// derivative on a local chart.
///
/// The frame is oriented compatibly with the (u1,u2) chart (e_a x e_b = -q),
/// in which the density of this gauge equals +nu; with the outward normal it
/// is -nu.
inline double verify_dA(const Vec3& q, double nu) {
    if (std::abs(dot(q, q) - 1.0) > 1e-8)
        throw std::domain_error("verify_dA: q must lie on the unit sphere");
    Vec3 ea = cross(Vec3{0, 0, 1}, q);
    if (dot(ea, ea) < 1e-12) ea = Vec3{1, 0, 0};
    ea = (1.0 / std::sqrt(dot(ea, ea))) * ea;
    const Vec3 eb = cross(ea, q);  // ea x eb = -q
    auto chart = [&](double s, double t) {
        Vec3 v = q + s * ea + t * eb;
        return (1.0 / std::sqrt(dot(v, v))) * v;
    };
    const double h = 1e-5;
    auto a_comp = [&](double s, double t, bool along_s) {
        const Vec3 pos = chart(s, t);
        Vec3 d;
        if (along_s)
            d = (0.5 / h) * (chart(s + h, t) - chart(s - h, t));
        else
            d = (0.5 / h) * (chart(s, t + h) - chart(s, t - h));
        return dot(gauge_A(pos, nu), d);
    };
    const double d_s_at = (a_comp(h, 0, false) - a_comp(-h, 0, false)) / (2 * h);
    const double d_t_as = (a_comp(0, h, true) - a_comp(0, -h, true)) / (2 * h);
    return d_s_at - d_t_as;
}

/// Chart-interior margin min(u1, B-u1, u2-B, A-u2); conversions degenerate
/// on the boundary.
inline double chart_margin(const EllipticPoint& u, const SystemParams& p) {
    return std::min(std::min(u.u1, p.B - u.u1), std::min(u.u2 - p.B, p.A - u.u2));
}

namespace ell_detail {

/// dq/du_i by dual-number differentiation of from_elliptic.
inline std::array<Vec3, 2> chart_jacobian(const EllipticPoint& u,
                                          const std::array<int, 3>& signs,
                                          const SystemParams& p) {
    using D2 = Dual<double, 2>;
    const auto qd = from_elliptic_t<D2>(D2::seeded(u.u1, 0), D2::seeded(u.u2, 1), signs, p);
    std::array<Vec3, 2> J;
    for (int i = 0; i < 2; ++i) J[i] = Vec3{qd.x1.d[i], qd.x2.d[i], qd.x3.d[i]};
    return J;
}

}  // namespace ell_detail

/// Convert a leaf phase point (|q| = 1, (M,q) = nu) to the elliptic chart.
///
/// L = M - nu q, kinetic momentum covector p = q x L, and
/// pt_i = p . dq/du_i. These momenta satisfy {pt_i, u_j} = delta_ij and
/// {pt1, pt2} = sign(q1 q2) B(u) under the reduced bracket (the bare B(u)
/// form is the positive-octant statement, like the displays in F_elliptic).
inline EllipticPhasePoint phase_to_elliptic(const PhasePoint& x, const SystemParams& p,
                                            double nu,
                                            const std::string& gauge_id = "monopole-balanced") {
    ell_detail::require_spherical(p, "phase_to_elliptic");
    if (std::abs(dot(x.q, x.q) - 1.0) > 1e-10)
        throw std::domain_error("phase_to_elliptic: |q| != 1");
    if (std::abs(dot(x.M, x.q) - nu) > 1e-10)
        throw std::domain_error("phase_to_elliptic: (M,q) != nu");
    const EllipticPoint u = to_elliptic(x.q, p);
    if (chart_margin(u, p) <= 1e-6 * p.A)
        throw chart_error("phase_to_elliptic: at the boundary of the elliptic chart");
    EllipticPhasePoint ep;
    ep.u = u;
    ep.gauge_id = gauge_id;
    ep.octant = {x.q.x1 >= 0 ? 1 : -1, x.q.x2 >= 0 ? 1 : -1, x.q.x3 >= 0 ? 1 : -1};
    const Vec3 L = x.M - nu * x.q;
    const Vec3 pc = cross(x.q, L);
    const auto J = ell_detail::chart_jacobian(u, ep.octant, p);
    ep.pt1 = dot(pc, J[0]);
    ep.pt2 = dot(pc, J[1]);
    return ep;
}

/// Pullback components A_i(u) = A(q(u)) . dq/du_i of the gauge potential.
inline std::array<double, 2> gauge_pullback(const EllipticPoint& u,
                                            const std::array<int, 3>& signs, double nu,
                                            const SystemParams& p) {
    const auto J = ell_detail::chart_jacobian(u, signs, p);
    const Vec3 a = gauge_A(from_elliptic(u, signs, p), nu);
    return {dot(a, J[0]), dot(a, J[1])};
}

/// Hamiltonian in elliptic coordinates:
///   H = 1/2 ( f(u1)/(u1-u2) pt1^2 + f(u2)/(u2-u1) pt2^2 )
///       - mu/(sqrt(u2) - sqrt(u1)) + nu^2/2.
/// The nu^2/2 term is the Casimir contribution C2^2/(2 C1) that the
/// chart display absorbs into the leaf constant; with it the value equals
/// hamiltonian(x) exactly.
inline double H_elliptic(const EllipticPhasePoint& ep, const SystemParams& p, double nu) {
    ell_detail::require_spherical(p, "H_elliptic");
    const double u1 = ep.u.u1, u2 = ep.u.u2;
    if (std::abs(u1 - u2) < 1e-14)
        throw std::domain_error("H_elliptic: coordinate degeneracy u1 = u2");
    const double kin = 0.5 * (confocal_f(u1, p) / (u1 - u2) * ep.pt1 * ep.pt1 +
                              confocal_f(u2, p) / (u2 - u1) * ep.pt2 * ep.pt2);
    return kin - p.mu / (std::sqrt(u2) - std::sqrt(u1)) + 0.5 * nu * nu;
}

/// Second integral in elliptic coordinates:
///   F = u2 f(u1)/(u1-u2) pt1^2 + u1 f(u2)/(u2-u1) pt2^2
///       + sigma (phi1 pt1 + phi2 pt2) + V + (A+B) nu^2,
///   phi_i = -nu sqrt(-f(u1) f(u2)) / (sqrt(u1 u2) + u_{3-i}),
///   V = -2 mu sqrt(u1 u2)/(sqrt(u2)-sqrt(u1)) - nu^2 (sqrt(u1)-sqrt(u2))^2.
/// sigma = sign(q1 q2) carries the chart orientation; the bare display is
/// the positive-octant (q3 > 0) form. The (A+B) nu^2 Casimir term makes the
/// value equal integral_F(x) exactly.
inline double F_elliptic(const EllipticPhasePoint& ep, const SystemParams& p, double nu) {
    ell_detail::require_spherical(p, "F_elliptic");
    const double u1 = ep.u.u1, u2 = ep.u.u2;
    if (std::abs(u1 - u2) < 1e-14)
        throw std::domain_error("F_elliptic: coordinate degeneracy u1 = u2");
    const double f1 = confocal_f(u1, p), f2 = confocal_f(u2, p);
    const double quad =
        u2 * f1 / (u1 - u2) * ep.pt1 * ep.pt1 + u1 * f2 / (u2 - u1) * ep.pt2 * ep.pt2;
    const double root = std::sqrt(-f1 * f2);
    const double su = std::sqrt(u1 * u2);
    const double phi1 = -nu * root / (su + u2);
    const double phi2 = -nu * root / (su + u1);
    const double sigma = ep.octant[0] * ep.octant[1];
    const double sr = std::sqrt(u1) - std::sqrt(u2);
    const double V = -2.0 * p.mu * su / (std::sqrt(u2) - std::sqrt(u1)) - nu * nu * sr * sr;
    return quad + sigma * (phi1 * ep.pt1 + phi2 * ep.pt2) + V + (p.A + p.B) * nu * nu;
}

/// Separation constants along a nu = 0 trajectory:
///   k1 = 1/2 f(u1) pt1^2 + sign(q3) mu sqrt(u1) - H u1
///   k2 = 1/2 f(u2) pt2^2 -          mu sqrt(u2) - H u2
/// Equal to each other and constant in t for the exact flow. Samples outside
/// the chart interior are skipped and flag the series as truncated.
struct SeparationSeries {
    std::vector<double> t, k1, k2;
    bool truncated = false;
};

inline SeparationSeries separation_check(const TrajectoryRecord& tr, const SystemParams& p,
                                         double margin = 1e-6) {
    ell_detail::require_spherical(p, "separation_check");
    SeparationSeries out;
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        if (std::abs(dot(tr.state[i].M, tr.state[i].q)) > 1e-6 ||
            std::abs(dot(tr.state[i].q, tr.state[i].q) - 1.0) > 1e-6)
            throw std::invalid_argument(
                "separation_check: trajectory must lie on the |q|=1, (M,q)=0 leaf");
        // integrator samples carry O(tol) Casimir noise; project it away
        const PhasePoint x = leaf_project(tr.state[i], 1.0, 0.0);
        const EllipticPoint u = to_elliptic(x.q, p);
        if (chart_margin(u, p) <= margin * p.A) {
            out.truncated = true;
            continue;
        }
        const std::array<int, 3> signs = {x.q.x1 >= 0 ? 1 : -1, x.q.x2 >= 0 ? 1 : -1,
                                          x.q.x3 >= 0 ? 1 : -1};
        const auto J = ell_detail::chart_jacobian(u, signs, p);
        const Vec3 pc = cross(x.q, x.M);  // nu = 0: L = M
        const double pt1 = dot(pc, J[0]);
        const double pt2 = dot(pc, J[1]);
        const double h = tr.H[i];
        const double s3 = x.q.x3 >= 0 ? 1.0 : -1.0;
        out.t.push_back(tr.t[i]);
        out.k1.push_back(0.5 * confocal_f(u.u1, p) * pt1 * pt1 +
                         s3 * p.mu * std::sqrt(u.u1) - h * u.u1);
        out.k2.push_back(0.5 * confocal_f(u.u2, p) * pt2 * pt2 - p.mu * std::sqrt(u.u2) -
                         h * u.u2);
    }
    return out;
}

}  // namespace twocentre
