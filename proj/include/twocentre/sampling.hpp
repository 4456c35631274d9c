#pragma once

#include <cmath>
#include <cstdint>

#include "twocentre/core.hpp"

namespace twocentre {

/// splitmix64; tiny, stable across platforms, good enough for test sampling.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// standard normal (Box-Muller, no caching so the stream stays simple)
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }
};

/// Components uniform in [-2, 2].
inline PhasePoint sample_box_point(Rng& rng) {
    PhasePoint x;
    for (int i = 0; i < 3; ++i) x.M[i] = rng.uniform(-2.0, 2.0);
    for (int i = 0; i < 3; ++i) x.q[i] = rng.uniform(-2.0, 2.0);
    return x;
}

/// Point on the leaf (q, Jq) = radius^2 (Euclidean: |q| = radius) with
/// (M, Jq) = nu * radius: q is drawn on the unit sphere and rescaled,
/// then M is shifted along q to hit the prescribed Casimir value.
inline PhasePoint sample_leaf_point(Rng& rng, double radius, double nu,
                                    Signature sig = Signature::Euclidean) {
    PhasePoint x;
    if (sig == Signature::Euclidean) {
        double n2 = 0.0;
        do {
            for (int i = 0; i < 3; ++i) x.q[i] = rng.normal();
            n2 = dot(x.q, x.q);
        } while (n2 < 1e-12);
        x.q = (radius / std::sqrt(n2)) * x.q;
        for (int i = 0; i < 3; ++i) x.M[i] = rng.uniform(-2.0, 2.0);
        const double lam = (nu * radius - dot(x.M, x.q)) / (radius * radius);
        x.M = x.M + lam * x.q;
    } else {
        // upper sheet of (q,Jq) = radius^2: q3 = sqrt(radius^2 + q1^2 + q2^2)
        x.q.x1 = rng.uniform(-2.0, 2.0);
        x.q.x2 = rng.uniform(-2.0, 2.0);
        x.q.x3 = std::sqrt(radius * radius + x.q.x1 * x.q.x1 + x.q.x2 * x.q.x2);
        for (int i = 0; i < 3; ++i) x.M[i] = rng.uniform(-2.0, 2.0);
        const double lam = (nu * radius - dot_j(x.M, x.q, sig)) / (radius * radius);
        x.M = x.M + lam * x.q;
    }
    return x;
}

}  // namespace twocentre
