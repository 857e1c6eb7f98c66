// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors
//
// Box-constrained Nelder-Mead. Trial points are projected onto the box, and a
// converged simplex is restarted around its best vertex until a restart no
// longer improves the objective.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace rttloc {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
struct SimplexOptions {
    Vec<N> lower{};
    Vec<N> upper{};
    Vec<N> step{};            // initial edge length per coordinate
    int max_iters = 500;
    double rel_tol = 1e-10;   // relative spread of vertex values
    double abs_tol = 1e-18;
    double x_tol = 1e-9;      // vertex spread in units of `step`
    int max_restarts = 3;
};

template <std::size_t N>
struct SimplexResult {
    Vec<N> point{};
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

namespace detail {

template <std::size_t N>
Vec<N> project(Vec<N> p, const SimplexOptions<N>& opt) {
    for (std::size_t k = 0; k < N; ++k)
        p[k] = std::clamp(p[k], opt.lower[k], opt.upper[k]);
    return p;
}

// Orders by value, then lexicographically by coordinates.
template <std::size_t N>
bool vertex_less(double fa, const Vec<N>& a, double fb, const Vec<N>& b) {
    if (fa != fb)
        return fa < fb;
    return a < b;
}

} // namespace detail

template <std::size_t N, class Objective>
SimplexResult<N> minimize_bounded(Objective&& f, Vec<N> start, const SimplexOptions<N>& opt) {
    using detail::project;
    constexpr std::size_t M = N + 1;

    std::array<Vec<N>, M> v{};
    std::array<double, M> fv{};

    auto build = [&](const Vec<N>& origin, double scale) {
        v[0] = project(origin, opt);
        fv[0] = f(v[0]);
        for (std::size_t k = 0; k < N; ++k) {
            Vec<N> p = v[0];
            const double h = opt.step[k] * scale;
            p[k] = (p[k] + h <= opt.upper[k]) ? p[k] + h : p[k] - h;
            v[k + 1] = project(p, opt);
            fv[k + 1] = f(v[k + 1]);
        }
    };

    auto order = [&] {
        std::array<std::size_t, M> idx{};
        for (std::size_t i = 0; i < M; ++i)
            idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return detail::vertex_less<N>(fv[a], v[a], fv[b], v[b]);
        });
        std::array<Vec<N>, M> v2{};
        std::array<double, M> f2{};
        for (std::size_t i = 0; i < M; ++i) {
            v2[i] = v[idx[i]];
            f2[i] = fv[idx[i]];
        }
        v = v2;
        fv = f2;
    };

    auto small = [&] {
        const double fspread = fv[N] - fv[0];
        if (!(fspread <= opt.rel_tol * std::abs(fv[0]) + opt.abs_tol))
            return false;
        double xs = 0.0;
        for (std::size_t i = 1; i < M; ++i)
            for (std::size_t k = 0; k < N; ++k)
                if (opt.step[k] > 0.0)
                    xs = std::max(xs, std::abs(v[i][k] - v[0][k]) / opt.step[k]);
        return xs <= opt.x_tol;
    };

    SimplexResult<N> result;
    build(start, 1.0);
    int iters = 0;
    int restarts = 0;
    double last_restart_value = 0.0;
    bool have_restart_value = false;

    while (true) {
        order();
        if (iters >= opt.max_iters)
            break;
        if (small()) {
            const bool stalled =
                have_restart_value &&
                last_restart_value - fv[0] <= opt.rel_tol * std::abs(fv[0]) + opt.abs_tol;
            if (stalled || restarts >= opt.max_restarts) {
                result.converged = true;
                break;
            }
            last_restart_value = fv[0];
            have_restart_value = true;
            ++restarts;
            build(v[0], 1.0 / (1 << restarts));
            continue;
        }
        ++iters;

        Vec<N> centroid{};
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t k = 0; k < N; ++k)
                centroid[k] += v[i][k] / static_cast<double>(N);

        auto along = [&](double t) {
            Vec<N> p{};
            for (std::size_t k = 0; k < N; ++k)
                p[k] = centroid[k] + t * (centroid[k] - v[N][k]);
            return project(p, opt);
        };

        const Vec<N> xr = along(1.0);
        const double fr = f(xr);
        if (fr < fv[0]) {
            const Vec<N> xe = along(2.0);
            const double fe = f(xe);
            if (fe < fr) {
                v[N] = xe;
                fv[N] = fe;
            } else {
                v[N] = xr;
                fv[N] = fr;
            }
            continue;
        }
        if (fr < fv[N - 1]) {
            v[N] = xr;
            fv[N] = fr;
            continue;
        }
        const bool outside = fr < fv[N];
        const Vec<N> xc = along(outside ? 0.5 : -0.5);
        const double fc = f(xc);
        if (outside ? fc <= fr : fc < fv[N]) {
            v[N] = xc;
            fv[N] = fc;
            continue;
        }
        for (std::size_t i = 1; i < M; ++i) {
            for (std::size_t k = 0; k < N; ++k)
                v[i][k] = v[0][k] + 0.5 * (v[i][k] - v[0][k]);
            v[i] = project(v[i], opt);
            fv[i] = f(v[i]);
        }
    }

    result.point = v[0];
    result.value = fv[0];
    result.iterations = iters;
    return result;
}

} // namespace rttloc
