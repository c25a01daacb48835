#pragma once
#include <limits>

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "hcap/jet.hpp"

namespace hcap::testutil {

using ScalarField = std::function<double(std::span<const double>)>;

/// Central difference operator along axis i applied a[i] times per axis,
/// O(h^2) in each application. Generic over the scalar so oracles can run in
/// long double where fifth-order differences need the extra headroom.
template <class Real, class F>
Real central_diff(const F& f, std::vector<Real> x, MultiIndex a, Real h) {
    int i = 0;
    while (i < 3 && a[i] == 0) ++i;
    if (i == 3) return f(x);
    --a[i];
    std::vector<Real> xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    return (central_diff(f, xp, a, h) - central_diff(f, xm, a, h)) / (Real(2) * h);
}

/// Richardson triangle over a sweep of halved steps (Romberg style). The
/// returned value is the diagonal entry whose predecessor agrees best, which
/// rides the truncation/roundoff tradeoff without a hand-picked step.
template <class Real, class F>
Real fd_partial_t(const F& f, std::span<const Real> x, const MultiIndex& a, Real h0,
                  int sweeps = 6) {
    std::vector<Real> pt(x.begin(), x.end());
    if (mi_degree(a) == 0) return f(pt);
    std::vector<std::vector<Real>> T(sweeps);
    Real h = h0;
    for (int k = 0; k < sweeps; ++k, h /= Real(2)) {
        T[k].resize(k + 1);
        T[k][0] = central_diff(f, pt, a, h);
        Real p4 = 4;
        for (int m = 1; m <= k; ++m, p4 *= Real(4))
            T[k][m] = (p4 * T[k][m - 1] - T[k - 1][m - 1]) / (p4 - Real(1));
    }
    Real best = T[sweeps - 1][sweeps - 1];
    Real best_gap = std::numeric_limits<Real>::infinity();
    for (int k = 1; k < sweeps; ++k) {
        const Real gap = std::abs(T[k][k] - T[k - 1][k - 1]);
        if (gap < best_gap) {
            best_gap = gap;
            best = T[k][k];
        }
    }
    return best;
}

inline double fd_partial(const ScalarField& f, std::span<const double> x, const MultiIndex& a,
                         double h0 = 0.2, int sweeps = 6) {
    return fd_partial_t<double>(f, x, a, h0, sweeps);
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max({std::abs(got), std::abs(want), 1.0});
}

}  // namespace hcap::testutil
