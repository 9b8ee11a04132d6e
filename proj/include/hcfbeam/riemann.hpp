#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "hcfbeam/beam_model.hpp"
#include "hcfbeam/errors.hpp"
#include "hcfbeam/grid.hpp"

namespace hcfbeam {

/// Beam variables and their derivatives sampled on the model grid at a fixed
/// time. Clamped end: w(0) = phi(0) = dt_w(0) = dt_phi(0) = 0.
struct PhysicalField {
    std::vector<double> w, phi, dz_w, dz_phi, dt_w, dt_phi;

    std::size_t size() const { return w.size(); }
};

/// Riemann state x(.,t) on the model grid, split into co- and
/// counter-propagating pairs x^- = (xm1, xm2), x^+ = (xp1, xp2).
struct RiemannField {
    std::vector<double> xm1, xm2, xp1, xp2;

    std::size_t size() const { return xm1.size(); }

    static RiemannField zeros(std::size_t n) {
        RiemannField f;
        f.xm1.assign(n, 0.0);
        f.xm2.assign(n, 0.0);
        f.xp1.assign(n, 0.0);
        f.xp2.assign(n, 0.0);
        return f;
    }
};

namespace detail {
inline void require_model_grid(const BeamModel& model, std::size_t n, const char* where) {
    if (n != model.n_grid())
        throw GridMismatch(std::string(where) + ": field size " + std::to_string(n) +
                           " does not match model grid " + std::to_string(model.n_grid()));
}
}  // namespace detail

/// x = H^{-1} V^{-1} (dz_w - phi, dz_phi, dt_w, dt_phi), evaluated pointwise
/// with the analytic inverse V^{-1} = 1/2 [[Lambda, I], [-Lambda, I]].
inline RiemannField to_riemann(const BeamModel& model, const PhysicalField& field) {
    detail::require_model_grid(model, field.size(), "to_riemann");
    const std::size_t n = field.size();
    RiemannField x = RiemannField::zeros(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = model.grid_point(i);
        const double l1 = model.lambda1(z);
        const double l2 = model.lambda2(z);
        const double e1 = std::exp(-model.alpha1(z));
        const double e2 = std::exp(-model.alpha2(z));
        const double strain = field.dz_w[i] - field.phi[i];
        x.xm1[i] = 0.5 * e1 * (l1 * strain + field.dt_w[i]);
        x.xm2[i] = 0.5 * e2 * (l2 * field.dz_phi[i] + field.dt_phi[i]);
        x.xp1[i] = 0.5 * e1 * (-l1 * strain + field.dt_w[i]);
        x.xp2[i] = 0.5 * e2 * (-l2 * field.dz_phi[i] + field.dt_phi[i]);
    }
    return x;
}

/// Inverse of to_riemann: recovers the derivative stack pointwise and then
/// rebuilds w, phi by spatial integration from the clamped end.
inline PhysicalField from_riemann(const BeamModel& model, const RiemannField& x) {
    detail::require_model_grid(model, x.size(), "from_riemann");
    const std::size_t n = x.size();
    const double h = model.grid_spacing();

    std::vector<double> strain(n), dz_phi(n), dt_w(n), dt_phi(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = model.grid_point(i);
        const double e1 = std::exp(model.alpha1(z));
        const double e2 = std::exp(model.alpha2(z));
        strain[i] = e1 * (x.xm1[i] - x.xp1[i]) / model.lambda1(z);
        dz_phi[i] = e2 * (x.xm2[i] - x.xp2[i]) / model.lambda2(z);
        dt_w[i] = e1 * (x.xm1[i] + x.xp1[i]);
        dt_phi[i] = e2 * (x.xm2[i] + x.xp2[i]);
    }

    PhysicalField f;
    f.phi = cumtrapz(dz_phi, h);
    std::vector<double> w_slope(n);
    for (std::size_t i = 0; i < n; ++i) w_slope[i] = strain[i] + f.phi[i];
    f.w = cumtrapz(w_slope, h);
    f.dz_w = std::move(w_slope);
    f.dz_phi = std::move(dz_phi);
    f.dt_w = std::move(dt_w);
    f.dt_phi = std::move(dt_phi);
    return f;
}

/// Displacement and rotation profiles from the Riemann state, integrating
/// from the clamped end: phi(z) = int_0^z dz_phi, w(z) = int_0^z (strain+phi).
inline std::pair<std::vector<double>, std::vector<double>> reconstruct_displacement(
    const BeamModel& model, const RiemannField& x) {
    PhysicalField f = from_riemann(model, x);
    return {std::move(f.w), std::move(f.phi)};
}

}  // namespace hcfbeam
