#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "hcfbeam/errors.hpp"

namespace hcfbeam {

/// Uniform grid of n+1 points on [a, b].
struct UniformGrid {
    double a = 0.0;
    double b = 1.0;
    std::size_t n = 1;  // number of cells; n+1 nodes

    double spacing() const { return (b - a) / static_cast<double>(n); }
    double point(std::size_t i) const {
        return a + (b - a) * (static_cast<double>(i) / static_cast<double>(n));
    }
    std::size_t size() const { return n + 1; }
};

inline std::vector<double> linspace(double a, double b, std::size_t n_points) {
    if (n_points < 2) throw GridTooCoarse("linspace needs at least 2 points");
    std::vector<double> xs(n_points);
    for (std::size_t i = 0; i < n_points; ++i)
        xs[i] = a + (b - a) * (static_cast<double>(i) / static_cast<double>(n_points - 1));
    return xs;
}

/// Composite trapezoid of uniformly sampled values with spacing h.
inline double trapz(const std::vector<double>& ys, double h) {
    if (ys.size() < 2) return 0.0;
    double s = 0.5 * (ys.front() + ys.back());
    for (std::size_t i = 1; i + 1 < ys.size(); ++i) s += ys[i];
    return s * h;
}

/// Cumulative trapezoid; out[0] = 0, out[i] = integral up to node i.
inline std::vector<double> cumtrapz(const std::vector<double>& ys, double h) {
    std::vector<double> out(ys.size(), 0.0);
    for (std::size_t i = 1; i < ys.size(); ++i)
        out[i] = out[i - 1] + 0.5 * h * (ys[i - 1] + ys[i]);
    return out;
}

/// Linear interpolation of values tabulated on the uniform grid
/// {a + i*h : 0 <= i < count}. x may exceed the ends by a small
/// rounding slack; anything further is an error.
inline double lerp_uniform(const double* ys, std::size_t count, double a, double h, double x) {
    if (count == 0) throw Error("lerp_uniform: empty table");
    if (count == 1) return ys[0];
    const double last = a + h * static_cast<double>(count - 1);
    const double slack = 1e-9 * (std::abs(h) + std::abs(last - a));
    if (x < a - slack || x > last + slack)
        throw Error("lerp_uniform: query outside table");
    double s = (x - a) / h;
    if (s < 0.0) s = 0.0;
    const double smax = static_cast<double>(count - 1);
    if (s > smax) s = smax;
    auto i = static_cast<std::size_t>(s);
    if (i >= count - 1) i = count - 2;
    const double u = s - static_cast<double>(i);
    return ys[i] * (1.0 - u) + ys[i + 1] * u;
}

inline double lerp_uniform(const std::vector<double>& ys, double a, double h, double x) {
    return lerp_uniform(ys.data(), ys.size(), a, h, x);
}

/// Integrate F over [lo, hi] by a trapezoid rule whose breakpoints are the
/// global lattice {k*dtau} restricted to the interior, plus both endpoints.
/// When lo and hi sit on the lattice this reduces to the plain composite
/// trapezoid with step dtau, so lattice-aligned integrals from different
/// call sites agree to the last bit.
template <class F>
double integrate_snapped(F&& f, double lo, double hi, double dtau) {
    if (dtau <= 0.0) throw NonPositiveParameter("integrate_snapped: dtau must be > 0");
    if (hi < lo) throw DegenerateWindow("integrate_snapped: hi < lo");
    const double eps = 1e-9 * dtau;
    if (hi - lo <= eps) return 0.0;

    auto k0 = static_cast<long long>(std::floor(lo / dtau)) + 1;
    while (static_cast<double>(k0) * dtau <= lo + eps) ++k0;

    double acc = 0.0;
    double x_prev = lo;
    double f_prev = f(lo);
    for (long long k = k0; static_cast<double>(k) * dtau < hi - eps; ++k) {
        const double x = static_cast<double>(k) * dtau;
        const double fx = f(x);
        acc += 0.5 * (x - x_prev) * (f_prev + fx);
        x_prev = x;
        f_prev = fx;
    }
    const double f_hi = f(hi);
    acc += 0.5 * (hi - x_prev) * (f_prev + f_hi);
    return acc;
}

}  // namespace hcfbeam
