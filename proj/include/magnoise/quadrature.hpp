#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

#include "magnoise/errors.hpp"

namespace magnoise {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t panels = 0;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (positive half; node 7 is 0).
inline constexpr double gk_nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double k15_weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
// Gauss-7 weights attach to nodes 1, 3, 5, 7.
inline constexpr double g7_weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelEstimate {
    double value;
    double error;
};

template <class F>
PanelEstimate gk15_panel(F&& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f0 = f(center);
    double k15 = k15_weights[7] * f0;
    double g7 = g7_weights[3] * f0;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * gk_nodes[i];
        const double fi = f(center + dx) + f(center - dx);
        k15 += k15_weights[i] * fi;
        if (i % 2 == 1) g7 += g7_weights[i / 2] * fi;
    }
    k15 *= half;
    g7 *= half;
    return {k15, std::abs(k15 - g7)};
}

} // namespace detail

/// Adaptive Gauss-Kronrod integration over a fixed breakpoint partition.
/// Breakpoints must be sorted; each initial panel is refined by bisection
/// until the summed error estimate meets max(abs_tol, rel_tol * |value|).
/// Throws NumericalError carrying the partial result when the panel budget
/// is exhausted first.
template <class F>
QuadratureResult integrate_adaptive(F&& f, const std::vector<double>& breakpoints,
                                    double rel_tol = 1e-10, double abs_tol = 0.0,
                                    std::size_t max_panels = 400000) {
    struct Panel {
        double a, b, value, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };

    if (breakpoints.size() < 2) return {};
    if (breakpoints.size() - 1 > max_panels)
        throw NumericalError("quadrature: initial partition exceeds panel budget", 0.0, 0.0);

    std::priority_queue<Panel> queue;
    double total = 0.0;
    double total_err = 0.0;
    std::size_t panels = 0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double a = breakpoints[i];
        const double b = breakpoints[i + 1];
        if (!(b > a)) continue;
        auto est = detail::gk15_panel(f, a, b);
        queue.push({a, b, est.value, est.error});
        total += est.value;
        total_err += est.error;
        ++panels;
    }

    while (!queue.empty() && total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (panels + 1 > max_panels)
            throw NumericalError("quadrature: panel budget exhausted before convergence",
                                 total, total_err);
        Panel worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // interval at floating-point resolution; accept as-is
            continue;
        }
        auto left = detail::gk15_panel(f, worst.a, mid);
        auto right = detail::gk15_panel(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        queue.push({worst.a, mid, left.value, left.error});
        queue.push({mid, worst.b, right.value, right.error});
        ++panels;
    }

    return {total, total_err, panels};
}

} // namespace magnoise
