#pragma once

#include <array>
#include <cmath>
#include <utility>

#include "twocentre/core.hpp"
#include "twocentre/dual.hpp"

namespace twocentre {

/// Lie-Poisson structure on e(3)* (Euclidean) or so(2,1)* (Lorentzian).
///
/// Both are encoded by one twisted triple-product form,
///   {f,g}(x) = (JM).(f_M x g_M) + (Jq).(f_M x g_q) + (Jq).(f_q x g_M),
/// which reproduces the structure relations
///   {M_i,M_j} = eps_ijk J_kk M_k,  {M_i,q_j} = eps_ijk J_kk q_k,  {q_i,q_j} = 0.
struct PoissonStructure {
    Signature signature = Signature::Euclidean;
};

/// Forward-mode gradient of f at x, ordered (dM1,dM2,dM3,dq1,dq2,dq3).
template <typename T, typename F>
std::array<T, 6> gradient_t(F&& f, const PhasePointT<T>& x) {
    const DualPhase<T> fx = std::forward<F>(f)(seed_phase_point(x));
    return fx.d;
}

template <typename F>
std::array<double, 6> gradient(F&& f, const PhasePoint& x) {
    auto g = gradient_t<double>(std::forward<F>(f), x);
    for (double gi : g)
        if (!std::isfinite(gi))
            throw evaluation_error("gradient: non-finite derivative component");
    return g;
}

template <typename T>
std::pair<Vec3T<T>, Vec3T<T>> split_grad(const std::array<T, 6>& g) {
    return {Vec3T<T>{g[0], g[1], g[2]}, Vec3T<T>{g[3], g[4], g[5]}};
}

/// Scalar-generic bracket core; T may itself be a dual type.
template <typename T, typename F, typename G>
T poisson_bracket_t(F&& f, G&& g, const PhasePointT<T>& x, const PoissonStructure& P) {
    const auto gf = gradient_t<T>(std::forward<F>(f), x);
    const auto gg = gradient_t<T>(std::forward<G>(g), x);
    const auto [fM, fq] = split_grad(gf);
    const auto [gM, gq] = split_grad(gg);
    const Vec3T<T> JM = apply_j(x.M, P.signature);
    const Vec3T<T> Jq = apply_j(x.q, P.signature);
    return dot(JM, cross(fM, gM)) + dot(Jq, cross(fM, gq)) + dot(Jq, cross(fq, gM));
}

template <typename F, typename G>
double poisson_bracket(F&& f, G&& g, const PhasePoint& x, const PoissonStructure& P) {
    const auto gf = gradient_t<double>(f, x);
    const auto gg = gradient_t<double>(g, x);
    for (double v : gf)
        if (!std::isfinite(v)) throw evaluation_error("poisson_bracket: non-finite gradient of left argument (f)");
    for (double v : gg)
        if (!std::isfinite(v)) throw evaluation_error("poisson_bracket: non-finite gradient of right argument (g)");
    return poisson_bracket_t<double>(std::forward<F>(f), std::forward<G>(g), x, P);
}

/// The 6x6 antisymmetric structure tensor J^{ij}(x) = {x_i, x_j}.
inline std::array<std::array<double, 6>, 6> structure_matrix(const PhasePoint& x,
                                                             const PoissonStructure& P) {
    std::array<std::array<double, 6>, 6> J{};
    const Vec3 JM = apply_j(x.M, P.signature);
    const Vec3 Jq = apply_j(x.q, P.signature);
    // {M_i, M_j} = eps_ijk (JM)_k, {M_i, q_j} = eps_ijk (Jq)_k
    const int eps[3][3] = {{0, 3, -2}, {-3, 0, 1}, {2, -1, 0}};  // eps[i][j] = +-(k+1)
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const int e = eps[i][j];
            if (e == 0) continue;
            const int k = std::abs(e) - 1;
            const double s = e > 0 ? 1.0 : -1.0;
            J[i][j] = s * JM[k];
            J[i][3 + j] = s * Jq[k];
            J[3 + j][i] = -s * Jq[k];
        }
    return J;
}

/// Magnitude reference for scale-relative bracket tolerances:
/// |grad f| * |J(x)|_F * |grad g|.
template <typename F, typename G>
double bracket_scale(F&& f, G&& g, const PhasePoint& x, const PoissonStructure& P) {
    const auto gf = gradient_t<double>(std::forward<F>(f), x);
    const auto gg = gradient_t<double>(std::forward<G>(g), x);
    double nf = 0, ng = 0, nJ = 0;
    for (int i = 0; i < 6; ++i) {
        nf += gf[i] * gf[i];
        ng += gg[i] * gg[i];
    }
    const auto J = structure_matrix(x, P);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) nJ += J[i][j] * J[i][j];
    return std::sqrt(nf) * std::sqrt(nJ) * std::sqrt(ng);
}

/// Casimirs: C1 = (q, Jq), C2 = (M, Jq). Euclidean J = id gives |q|^2 and (M,q).
template <typename T>
std::pair<T, T> casimirs_t(const PhasePointT<T>& x, const PoissonStructure& P) {
    return {dot_j(x.q, x.q, P.signature), dot_j(x.M, x.q, P.signature)};
}

inline std::pair<double, double> casimirs(const PhasePoint& x, const PoissonStructure& P) {
    return casimirs_t(x, P);
}

template <typename T>
T casimir_c1(const PhasePointT<T>& x, const PoissonStructure& P) {
    return dot_j(x.q, x.q, P.signature);
}
template <typename T>
T casimir_c2(const PhasePointT<T>& x, const PoissonStructure& P) {
    return dot_j(x.M, x.q, P.signature);
}

/// Lie-Poisson flow xdot_i = {x_i, H}:
///   Mdot = H_M x (JM) + H_q x (Jq),   qdot = H_M x (Jq).
template <typename H>
PhasePoint hamiltonian_vector_field(H&& h, const PhasePoint& x, const PoissonStructure& P) {
    const auto gh = gradient(std::forward<H>(h), x);
    const auto [hM, hq] = split_grad(gh);
    const Vec3 JM = apply_j(x.M, P.signature);
    const Vec3 Jq = apply_j(x.q, P.signature);
    PhasePoint xdot;
    xdot.M = cross(hM, JM) + cross(hq, Jq);
    xdot.q = cross(hM, Jq);
    return xdot;
}

}  // namespace twocentre
