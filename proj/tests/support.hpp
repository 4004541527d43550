#pragma once

// Helpers shared by the unit tests and the acceptance binary.

#include <cmath>
#include <memory>
#include <vector>

#include "nsrl/envs.hpp"
#include "nsrl/model.hpp"
#include "nsrl/rng.hpp"

namespace nsrl::testing {

inline MdpSnapshot random_snapshot(int H, int S, int A, Rng& rng) {
    MdpSnapshot snap(H, S, A);
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                snap.r(h, s, a) = rng.uniform();
                double total = 0.0;
                for (int k = 0; k < S; ++k) total += (snap.p(h, s, a, k) = rng.uniform() + 1e-3);
                for (int k = 0; k < S; ++k) snap.p(h, s, a, k) /= total;
            }
    snap.normalize_rows();
    return snap;
}

inline TabularPolicy random_policy(const MdpSnapshot& snap, Rng& rng) {
    TabularPolicy pi(snap.H(), snap.S());
    for (int h = 0; h < snap.H(); ++h)
        for (int s = 0; s < snap.S(); ++s) {
            int a = 0;
            do {
                a = static_cast<int>(rng.below(static_cast<std::uint64_t>(snap.A())));
            } while (!snap.valid(h, s, a));
            pi.at(h, s) = a;
        }
    return pi;
}

/// Convex mix (1-w) x + w y of two snapshots with equal shape.
inline MdpSnapshot mix(const MdpSnapshot& x, const MdpSnapshot& y, double w) {
    MdpSnapshot out(x.H(), x.S(), x.A());
    for (int h = 0; h < x.H(); ++h)
        for (int s = 0; s < x.S(); ++s)
            for (int a = 0; a < x.A(); ++a) {
                out.r(h, s, a) = (1.0 - w) * x.r(h, s, a) + w * y.r(h, s, a);
                for (int k = 0; k < x.S(); ++k)
                    out.p(h, s, a, k) = (1.0 - w) * x.p(h, s, a, k) + w * y.p(h, s, a, k);
            }
    out.normalize_rows();
    return out;
}

/// Random non-stationary env: a few anchor snapshots with abrupt jumps at
/// random episodes and slow linear drift toward the next anchor in between.
inline NonstationaryEnv random_drifting_env(int H, int S, int A, int M, int anchors, double drift,
                                            Rng& rng) {
    std::vector<MdpSnapshot> base;
    for (int i = 0; i <= anchors; ++i) base.push_back(random_snapshot(H, S, A, rng));
    std::vector<int> jumps;
    for (int i = 1; i < anchors; ++i) jumps.push_back(1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(M))));
    std::vector<std::shared_ptr<const MdpSnapshot>> snaps;
    for (int m = 1; m <= M; ++m) {
        int seg = 0;
        for (int j : jumps) seg += m >= j ? 1 : 0;
        const double w = drift * static_cast<double>(m - 1) / std::max(1, M - 1);
        snaps.push_back(std::make_shared<const MdpSnapshot>(mix(base[static_cast<std::size_t>(seg)],
                                                                base[static_cast<std::size_t>(seg) + 1], w)));
    }
    return NonstationaryEnv("random-drift", S, A, H, M,
                            [snaps](int m) { return snaps[static_cast<std::size_t>(m - 1)]; },
                            [](int) { return 0; });
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace nsrl::testing
