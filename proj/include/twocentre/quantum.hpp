#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "twocentre/core.hpp"
#include "twocentre/systems.hpp"

namespace twocentre {

using cdouble = std::complex<double>;

// ---------------------------------------------------------------- Wigner d

namespace qdetail {

inline double lbinom(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// Jacobi polynomial P_k^{(a,b)}(x) by the standard three-term recurrence.
inline double jacobi_poly(int k, int a, int b, double x) {
    if (k == 0) return 1.0;
    double p0 = 1.0;
    double p1 = 0.5 * (a - b) + 0.5 * (a + b + 2) * x;
    for (int n = 2; n <= k; ++n) {
        const double c1 = 2.0 * n * (n + a + b) * (2.0 * n + a + b - 2);
        const double c2 = (2.0 * n + a + b - 1) * (double(a) * a - double(b) * b);
        const double c3 = (2.0 * n + a + b - 1) * (2.0 * n + a + b) * (2.0 * n + a + b - 2);
        const double c4 = 2.0 * (n + a - 1) * (n + b - 1) * (2.0 * n + a + b);
        const double p2 = ((c2 + c3 * x) * p1 - c4 * p0) / c1;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

}  // namespace qdetail

/// Wigner small-d matrix element d^j_{m1,m2}(theta) = <j m1|e^{-i theta Jy}|j m2>.
/// Quantum numbers are passed doubled so half-integers stay exact.
inline double wigner_d(int two_j, int two_m1, int two_m2, double theta) {
    const int kk[4] = {two_j + two_m2, two_j - two_m2, two_j + two_m1, two_j - two_m1};
    const int k2 = *std::min_element(kk, kk + 4);
    if (k2 < 0) throw std::domain_error("wigner_d: |m| > j");
    int a2, lam2;
    if (k2 == kk[0]) {
        a2 = two_m1 - two_m2;
        lam2 = two_m1 - two_m2;
    } else if (k2 == kk[1]) {
        a2 = two_m2 - two_m1;
        lam2 = 0;
    } else if (k2 == kk[2]) {
        a2 = two_m2 - two_m1;
        lam2 = 0;
    } else {
        a2 = two_m1 - two_m2;
        lam2 = two_m1 - two_m2;
    }
    if (k2 % 2 != 0 || a2 % 2 != 0)
        throw std::domain_error("wigner_d: m1, m2 must differ from j by integers");
    const int k = k2 / 2, a = a2 / 2, lam = lam2 / 2;
    const int b = two_j - 2 * k - a;
    const double sign = (lam % 2 == 0) ? 1.0 : -1.0;
    const double pref =
        sign * std::exp(0.5 * (qdetail::lbinom(two_j - k, k + a) - qdetail::lbinom(k + b, b)));
    return pref * std::pow(std::sin(0.5 * theta), a) * std::pow(std::cos(0.5 * theta), b) *
           qdetail::jacobi_poly(k, a, b, std::cos(theta));
}

// ---------------------------------------------------------------- basis

/// Monopole-harmonics basis: sections with charge nu (2 nu integer, the
/// Dirac condition), total angular momentum j = |nu|, |nu|+1, ..., j_max
/// and m = -j..j. Dimension is sum(2j+1).
struct MonopoleBasis {
    int two_nu = 0;
    std::vector<std::pair<int, int>> states;  // (two_j, two_m)
    std::vector<int> level_two_j;

    static MonopoleBasis make(double nu, double j_max) {
        const double tn = 2.0 * nu;
        if (std::abs(tn - std::llround(tn)) > 1e-9)
            throw std::invalid_argument(
                "MonopoleBasis: 2\xce\xbd must be an integer (Dirac quantization)");
        MonopoleBasis b;
        b.two_nu = static_cast<int>(std::llround(tn));
        const int tn_abs = std::abs(b.two_nu);
        if (2.0 * j_max < tn_abs - 1e-9)
            throw std::invalid_argument("MonopoleBasis: j_max must be >= |nu|");
        for (int tj = tn_abs; tj <= static_cast<int>(std::floor(2.0 * j_max + 1e-9)); tj += 2) {
            b.level_two_j.push_back(tj);
            for (int tm = -tj; tm <= tj; tm += 2) b.states.emplace_back(tj, tm);
        }
        return b;
    }

    int dim() const { return static_cast<int>(states.size()); }
    double nu() const { return 0.5 * two_nu; }
    int top_two_j() const { return level_two_j.back(); }
};

// ---------------------------------------------------------------- matrices

/// Dense complex matrix over a MonopoleBasis ordering.
struct OperatorMatrix {
    int n = 0;
    std::vector<cdouble> a;
    bool hermitian = false;

    OperatorMatrix() = default;
    explicit OperatorMatrix(int dim, bool herm = false)
        : n(dim), a(static_cast<std::size_t>(dim) * dim), hermitian(herm) {}

    cdouble& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    const cdouble& at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

    static OperatorMatrix identity(int dim) {
        OperatorMatrix I(dim, true);
        for (int i = 0; i < dim; ++i) I.at(i, i) = 1.0;
        return I;
    }
};

inline OperatorMatrix matmul(const OperatorMatrix& X, const OperatorMatrix& Y) {
    OperatorMatrix Z(X.n);
    for (int i = 0; i < X.n; ++i)
        for (int k = 0; k < X.n; ++k) {
            const cdouble xik = X.at(i, k);
            if (xik == cdouble{}) continue;
            const cdouble* yr = &Y.a[static_cast<std::size_t>(k) * Y.n];
            cdouble* zr = &Z.a[static_cast<std::size_t>(i) * Z.n];
            for (int j = 0; j < X.n; ++j) zr[j] += xik * yr[j];
        }
    return Z;
}

inline OperatorMatrix operator+(const OperatorMatrix& X, const OperatorMatrix& Y) {
    OperatorMatrix Z = X;
    for (std::size_t i = 0; i < Z.a.size(); ++i) Z.a[i] += Y.a[i];
    Z.hermitian = X.hermitian && Y.hermitian;
    return Z;
}
inline OperatorMatrix operator-(const OperatorMatrix& X, const OperatorMatrix& Y) {
    OperatorMatrix Z = X;
    for (std::size_t i = 0; i < Z.a.size(); ++i) Z.a[i] -= Y.a[i];
    Z.hermitian = X.hermitian && Y.hermitian;
    return Z;
}
inline OperatorMatrix operator*(double s, const OperatorMatrix& X) {
    OperatorMatrix Z = X;
    for (auto& v : Z.a) v *= s;
    return Z;
}

inline OperatorMatrix commutator(const OperatorMatrix& X, const OperatorMatrix& Y) {
    return matmul(X, Y) - matmul(Y, X);
}

/// 1/2 (XY + YX); Hermitian when X and Y are.
inline OperatorMatrix sym_product(const OperatorMatrix& X, const OperatorMatrix& Y) {
    OperatorMatrix Z = 0.5 * (matmul(X, Y) + matmul(Y, X));
    Z.hermitian = X.hermitian && Y.hermitian;
    return Z;
}

inline double frobenius_norm(const OperatorMatrix& X) {
    double s = 0;
    for (const auto& v : X.a) s += std::norm(v);
    return std::sqrt(s);
}

inline double max_abs(const OperatorMatrix& X) {
    double s = 0;
    for (const auto& v : X.a) s = std::max(s, std::abs(v));
    return s;
}

inline double hermiticity_residual(const OperatorMatrix& X) {
    double r = 0;
    for (int i = 0; i < X.n; ++i)
        for (int j = i; j < X.n; ++j)
            r = std::max(r, std::abs(X.at(i, j) - std::conj(X.at(j, i))));
    return r;
}

/// Diagonal projector onto j <= j_cut.
inline OperatorMatrix level_projector(const MonopoleBasis& basis, double j_cut) {
    OperatorMatrix P(basis.dim(), true);
    const int tc = static_cast<int>(std::floor(2.0 * j_cut + 1e-9));
    for (int i = 0; i < basis.dim(); ++i)
        if (basis.states[i].first <= tc) P.at(i, i) = 1.0;
    return P;
}

inline OperatorMatrix project(const OperatorMatrix& X, const OperatorMatrix& P) {
    return matmul(P, matmul(X, P));
}

// ---------------------------------------------------------------- quadrature

namespace qdetail {

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on P_n).
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

}  // namespace qdetail

/// Product quadrature on the sphere: Gauss-Legendre in cos(theta), uniform
/// grid in phi with a fixed rotation offset. The offset is an Euler angle
/// about the z-axis; it keeps every node off the q2 = 0 plane, where the
/// potential centres sit, while preserving exactness for Fourier modes
/// |k| < n_phi.
struct SphereQuadrature {
    int n_theta = 128, n_phi = 128;
    double phi_offset = 0.35355339059327373;  // fraction of a phi cell
    std::vector<double> theta, w_theta, phi;
    double w_phi = 0.0;

    static SphereQuadrature make(int n_theta, int n_phi,
                                 double phi_offset = 0.35355339059327373) {
        if (n_theta < 2 || n_phi < 2)
            throw std::invalid_argument("SphereQuadrature: need at least 2 nodes per direction");
        SphereQuadrature q;
        q.n_theta = n_theta;
        q.n_phi = n_phi;
        q.phi_offset = phi_offset;
        std::vector<double> x;
        qdetail::gauss_legendre(n_theta, x, q.w_theta);
        q.theta.resize(n_theta);
        for (int i = 0; i < n_theta; ++i) q.theta[i] = std::acos(x[i]);
        q.phi.resize(n_phi);
        const double two_pi = 6.283185307179586476925287;
        for (int j = 0; j < n_phi; ++j) q.phi[j] = two_pi * (j + phi_offset) / n_phi;
        q.w_phi = two_pi / n_phi;
        return q;
    }
};

// ---------------------------------------------------------------- harmonics

/// Monopole harmonic Y_{nu,j,m}(theta,phi) = sqrt((2j+1)/4pi) d^j_{m,nu}(theta) e^{i m phi}
/// in the gauge with punctures at both poles. Orthonormal under the
/// quadrature inner product.
inline cdouble monopole_harmonic(double nu, double j, double m, double theta, double phi) {
    const auto near_int = [](double v) { return std::abs(v - std::llround(v)) < 1e-9; };
    if (!near_int(2 * nu) || !near_int(2 * j) || !near_int(2 * m) || !near_int(j - std::abs(nu)) ||
        !near_int(j - m) || j < std::abs(nu) - 1e-12 || std::abs(m) > j + 1e-12)
        throw std::domain_error("monopole_harmonic: invalid quantum numbers");
    if (!(theta > 0.0 && theta < 3.14159265358979323846))
        throw std::domain_error("monopole_harmonic: theta must lie in (0, pi)");
    const int tj = static_cast<int>(std::llround(2 * j));
    const int tm = static_cast<int>(std::llround(2 * m));
    const int tn = static_cast<int>(std::llround(2 * nu));
    const double amp = std::sqrt((tj + 1) / (4.0 * 3.14159265358979323846)) *
                       wigner_d(tj, tm, tn, theta);
    return amp * std::exp(cdouble(0.0, 0.5 * tm * phi));
}

namespace qdetail {

/// dtab[a][i] = sqrt((2j_a+1)/4pi) d^{j_a}_{m_a,nu}(theta_i); the phi factor
/// is handled separately so products reduce to Fourier sums.
inline std::vector<std::vector<double>> harmonics_theta_table(const MonopoleBasis& basis,
                                                              const SphereQuadrature& quad) {
    std::vector<std::vector<double>> tab(basis.dim());
    for (int a = 0; a < basis.dim(); ++a) {
        const auto [tj, tm] = basis.states[a];
        tab[a].resize(quad.n_theta);
        const double amp = std::sqrt((tj + 1) / (4.0 * 3.14159265358979323846));
        for (int i = 0; i < quad.n_theta; ++i)
            tab[a][i] = amp * wigner_d(tj, tm, basis.two_nu, quad.theta[i]);
    }
    return tab;
}

}  // namespace qdetail

// ---------------------------------------------------------------- operators

/// Matrix of the multiplication operator by f(theta, phi) over the basis,
/// via quadrature. Hermitian by construction for real f.
inline OperatorMatrix multiplication_matrix(const std::function<double(double, double)>& f,
                                            const MonopoleBasis& basis,
                                            const SphereQuadrature& quad) {
    const int n = basis.dim();
    const int nt = quad.n_theta, np = quad.n_phi;
    // f on the grid
    std::vector<double> fv(static_cast<std::size_t>(nt) * np);
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < np; ++j) {
            const double v = f(quad.theta[i], quad.phi[j]);
            if (!std::isfinite(v))
                throw evaluation_error(
                    "multiplication_matrix: integrand not finite at a quadrature node; "
                    "rotate the grid (phi offset) so nodes avoid the singular set");
            fv[static_cast<std::size_t>(i) * np + j] = v;
        }
    // phi Fourier table: Fhat[i][k+kmax] = sum_j w_phi f(theta_i, phi_j) e^{i k phi_j}
    const int kmax = basis.top_two_j();  // |m_b - m_a| <= 2 j_max, doubled ints /2
    std::vector<cdouble> expk(static_cast<std::size_t>(kmax + 1) * np);
    for (int k = 0; k <= kmax; ++k)
        for (int j = 0; j < np; ++j)
            expk[static_cast<std::size_t>(k) * np + j] = std::exp(cdouble(0.0, k * quad.phi[j]));
    std::vector<cdouble> fhat(static_cast<std::size_t>(nt) * (2 * kmax + 1));
    for (int i = 0; i < nt; ++i)
        for (int k = 0; k <= kmax; ++k) {
            cdouble s{};
            const double* fr = &fv[static_cast<std::size_t>(i) * np];
            const cdouble* er = &expk[static_cast<std::size_t>(k) * np];
            for (int j = 0; j < np; ++j) s += fr[j] * er[j];
            s *= quad.w_phi;
            fhat[static_cast<std::size_t>(i) * (2 * kmax + 1) + (kmax + k)] = s;
            fhat[static_cast<std::size_t>(i) * (2 * kmax + 1) + (kmax - k)] = std::conj(s);
        }
    const auto dtab = qdetail::harmonics_theta_table(basis, quad);
    OperatorMatrix M(n, true);
    for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
            const int k = (basis.states[b].second - basis.states[a].second) / 2;  // m_b - m_a
            if (std::abs(k) > kmax) continue;
            cdouble s{};
            const double* da = dtab[a].data();
            const double* db = dtab[b].data();
            for (int i = 0; i < nt; ++i)
                s += quad.w_theta[i] * da[i] * db[i] *
                     fhat[static_cast<std::size_t>(i) * (2 * kmax + 1) + (kmax + k)];
            M.at(a, b) = s;
            M.at(b, a) = std::conj(s);
        }
    }
    return M;
}

/// Angular momentum matrices: block diagonal in j, M3 = diag(m), ladder
/// coefficients sqrt(j(j+1) - m(m+-1)); [Mk, Mm] = i eps_kmn Mn exactly.
inline std::array<OperatorMatrix, 3> angular_momentum_matrices(const MonopoleBasis& basis) {
    const int n = basis.dim();
    OperatorMatrix M1(n, true), M2(n, true), M3(n, true);
    for (int i = 0; i < n; ++i) {
        const auto [tj, tm] = basis.states[i];
        M3.at(i, i) = 0.5 * tm;
        if (tm + 2 <= tj) {
            const double j = 0.5 * tj, m = 0.5 * tm;
            const double c = std::sqrt(j * (j + 1) - m * (m + 1));
            // raising: |j, m+1><j, m|; state (tj, tm+2) sits at i+1 in the ordering
            M1.at(i + 1, i) += 0.5 * c;
            M1.at(i, i + 1) += 0.5 * c;
            M2.at(i + 1, i) += cdouble(0.0, -0.5) * c;
            M2.at(i, i + 1) += cdouble(0.0, 0.5) * c;
        }
    }
    return {M1, M2, M3};
}

/// Position multiplication operators (q1, q2, q3) over the basis.
inline std::array<OperatorMatrix, 3> position_matrices(const MonopoleBasis& basis,
                                                       const SphereQuadrature& quad) {
    auto q1 = multiplication_matrix(
        [](double t, double p) { return std::sin(t) * std::cos(p); }, basis, quad);
    auto q2 = multiplication_matrix(
        [](double t, double p) { return std::sin(t) * std::sin(p); }, basis, quad);
    auto q3 = multiplication_matrix([](double t, double) { return std::cos(t); }, basis, quad);
    return {q1, q2, q3};
}

namespace qdetail {

inline double R_on_sphere(const SystemParams& p, double theta, double phi) {
    const double q2 = std::sin(theta) * std::sin(phi);
    const double w = std::sqrt(p.A) * std::cos(theta) - std::sqrt(p.B);
    return (p.A - p.B) * q2 * q2 + w * w;
}

}  // namespace qdetail

/// Quantum Hamiltonian: 1/2 sum M_k^2 + multiplication by U = -mu/sqrt(R).
inline OperatorMatrix build_H(const SystemParams& p, const MonopoleBasis& basis,
                              const SphereQuadrature& quad) {
    p.validate();
    if (p.model != Model::Spherical)
        throw std::invalid_argument("build_H: spherical model only");
    const auto M = angular_momentum_matrices(basis);
    OperatorMatrix H = 0.5 * (matmul(M[0], M[0]) + matmul(M[1], M[1]) + matmul(M[2], M[2]));
    H.hermitian = true;
    if (p.mu != 0.0) {
        auto U = multiplication_matrix(
            [&p](double t, double ph) { return -p.mu / std::sqrt(qdetail::R_on_sphere(p, t, ph)); },
            basis, quad);
        H = H + U;
        H.hermitian = true;
    }
    return H;
}

/// Ŝ = (M,q)/|q| as a symmetrized matrix composition. On the truncation
/// interior it acts as the scalar +nu (measured, not assumed).
inline OperatorMatrix build_S(const MonopoleBasis& basis, const SphereQuadrature& quad) {
    const auto M = angular_momentum_matrices(basis);
    const auto Q = position_matrices(basis, quad);
    OperatorMatrix S =
        sym_product(M[0], Q[0]) + sym_product(M[1], Q[1]) + sym_product(M[2], Q[2]);
    S.hermitian = true;
    return S;
}

/// Quantum second integral:
///   F = A M1^2 + B M2^2 + 2 sqrt(AB) sym(S, M3) - 2 mu sqrt(AB) q3/sqrt(R).
inline OperatorMatrix build_F(const SystemParams& p, const MonopoleBasis& basis,
                              const SphereQuadrature& quad) {
    p.validate();
    if (p.model != Model::Spherical)
        throw std::invalid_argument("build_F: spherical model only");
    const auto M = angular_momentum_matrices(basis);
    const OperatorMatrix S = build_S(basis, quad);
    const double s = std::sqrt(p.A * p.B);
    OperatorMatrix F = p.A * matmul(M[0], M[0]) + p.B * matmul(M[1], M[1]) +
                       2.0 * s * sym_product(S, M[2]);
    F.hermitian = true;
    if (p.mu != 0.0) {
        auto W = multiplication_matrix(
            [&p](double t, double ph) {
                return std::cos(t) / std::sqrt(qdetail::R_on_sphere(p, t, ph));
            },
            basis, quad);
        F = F - (2.0 * p.mu * s) * W;
        F.hermitian = true;
    }
    return F;
}

/// Residual of the two orderings of (M,q): || sum M_k q_k - sum q_k M_k ||_max.
/// The paper's "no ordering problem" claim, verified on the truncation.
inline double ordering_residual(const MonopoleBasis& basis, const SphereQuadrature& quad) {
    const auto M = angular_momentum_matrices(basis);
    const auto Q = position_matrices(basis, quad);
    OperatorMatrix D(basis.dim());
    for (int k = 0; k < 3; ++k) D = D + (matmul(M[k], Q[k]) - matmul(Q[k], M[k]));
    return max_abs(D);
}

// ---------------------------------------------------------------- eigensolver

struct Spectrum {
    std::vector<double> eigenvalues;            // ascending
    std::vector<std::vector<cdouble>> vectors;  // vectors[k] is the k-th eigenvector
};

namespace qdetail {

/// Cyclic Jacobi for real symmetric matrices; A is overwritten, V gets the
/// accumulated rotations (columns are eigenvectors).
inline void jacobi_real_symmetric(std::vector<double>& A, std::vector<double>& V, int n) {
    V.assign(static_cast<std::size_t>(n) * n, 0.0);
    auto a = [&](int i, int j) -> double& { return A[static_cast<std::size_t>(i) * n + j]; };
    auto v = [&](int i, int j) -> double& { return V[static_cast<std::size_t>(i) * n + j]; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v(i, j) = (i == j) ? 1.0 : 0.0;
    double off = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) off += 2 * a(i, j) * a(i, j);
    double norm = off;
    for (int i = 0; i < n; ++i) norm += a(i, i) * a(i, i);
    const double tol = 1e-30 * std::max(norm, 1e-300);
    for (int sweep = 0; sweep < 100 && off > tol; ++sweep) {
        for (int pp = 0; pp < n - 1; ++pp)
            for (int qq = pp + 1; qq < n; ++qq) {
                const double apq = a(pp, qq);
                if (apq == 0.0) continue;
                const double app = a(pp, pp), aqq = a(qq, qq);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, pp), akq = a(k, qq);
                    a(k, pp) = c * akp - s * akq;
                    a(k, qq) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(pp, k), aqk = a(qq, k);
                    a(pp, k) = c * apk - s * aqk;
                    a(qq, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, pp), vkq = v(k, qq);
                    v(k, pp) = c * vkp - s * vkq;
                    v(k, qq) = s * vkp + c * vkq;
                }
            }
        off = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += 2 * a(i, j) * a(i, j);
    }
}

}  // namespace qdetail

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations on
/// the 2n x 2n real symmetric embedding [[Re, -Im], [Im, Re]]. Each
/// eigenvalue of the embedding appears twice; one copy of each pair is kept.
inline Spectrum eigen_spectrum(const OperatorMatrix& X, bool want_vectors = false) {
    if (!X.hermitian)
        throw std::invalid_argument("eigen_spectrum: operator is not flagged Hermitian");
    if (hermiticity_residual(X) > 1e-10 * std::max(1.0, max_abs(X)))
        throw std::invalid_argument("eigen_spectrum: matrix violates the Hermitian contract");
    const int n = X.n;
    const int N = 2 * n;
    std::vector<double> A(static_cast<std::size_t>(N) * N, 0.0), V;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cdouble z = X.at(i, j);
            A[static_cast<std::size_t>(i) * N + j] = z.real();
            A[static_cast<std::size_t>(i) * N + (n + j)] = -z.imag();
            A[static_cast<std::size_t>(n + i) * N + j] = z.imag();
            A[static_cast<std::size_t>(n + i) * N + (n + j)] = z.real();
        }
    qdetail::jacobi_real_symmetric(A, V, N);
    std::vector<int> order(N);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        return A[static_cast<std::size_t>(i) * N + i] < A[static_cast<std::size_t>(j) * N + j];
    });
    Spectrum out;
    out.eigenvalues.reserve(n);
    for (int k = 0; k < N; k += 2)
        out.eigenvalues.push_back(A[static_cast<std::size_t>(order[k]) * N + order[k]]);
    if (want_vectors) {
        out.vectors.reserve(n);
        for (int k = 0; k < N; k += 2) {
            const int col = order[k];
            std::vector<cdouble> vec(n);
            double nrm = 0;
            for (int i = 0; i < n; ++i) {
                vec[i] = cdouble(V[static_cast<std::size_t>(i) * N + col],
                                 V[static_cast<std::size_t>(n + i) * N + col]);
                nrm += std::norm(vec[i]);
            }
            nrm = std::sqrt(nrm);
            for (auto& z : vec) z /= nrm;
            out.vectors.push_back(std::move(vec));
        }
    }
    return out;
}

/// Frobenius norm of P [H,F] P over ||PHP|| ||PFP||, P projecting onto j <= j_cut.
inline double commutator_diagnostic(const OperatorMatrix& H, const OperatorMatrix& F,
                                    const MonopoleBasis& basis, double j_cut) {
    // at least two basis levels of headroom above the cut (1.5 covers the
    // half-integer grids, where a requested j_max lands on j_max - 1/2)
    if (2.0 * j_cut > basis.top_two_j() - 3 + 1e-9)
        throw std::invalid_argument("commutator_diagnostic: requires j_cut <= j_max - 2");
    const OperatorMatrix P = level_projector(basis, j_cut);
    const double num = frobenius_norm(project(commutator(H, F), P));
    const double den = frobenius_norm(project(H, P)) * frobenius_norm(project(F, P));
    return num / den;
}

}  // namespace twocentre
