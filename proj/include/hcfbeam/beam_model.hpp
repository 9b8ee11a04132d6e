#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hcfbeam/errors.hpp"
#include "hcfbeam/grid.hpp"
#include "hcfbeam/linalg.hpp"

namespace hcfbeam {

/// Spatial coefficient on [0, 1]: a constant, a uniformly sampled table with
/// linear interpolation, or a closed-form callable.
class Coefficient {
public:
    Coefficient(double value) : repr_(value) {}  // NOLINT: implicit by design

    static Coefficient from_samples(std::vector<double> ys) {
        if (ys.size() < 2) throw GridTooCoarse("Coefficient table needs at least 2 samples");
        return Coefficient(Table{std::move(ys)});
    }

    template <class F>
        requires std::is_invocable_r_v<double, F, double> &&
                 (!std::is_same_v<std::decay_t<F>, Coefficient>) &&
                 (!std::is_arithmetic_v<std::decay_t<F>>)
    Coefficient(F&& f) : repr_(std::function<double(double)>(std::forward<F>(f))) {}

    double operator()(double z) const {
        if (const double* c = std::get_if<double>(&repr_)) return *c;
        if (const Table* t = std::get_if<Table>(&repr_)) {
            const double h = 1.0 / static_cast<double>(t->ys.size() - 1);
            return lerp_uniform(t->ys, 0.0, h, z);
        }
        return std::get<std::function<double(double)>>(repr_)(z);
    }

    bool is_constant() const { return std::holds_alternative<double>(repr_); }

    double constant_value() const {
        if (!is_constant()) throw Error("Coefficient: not a constant");
        return std::get<double>(repr_);
    }

private:
    struct Table {
        std::vector<double> ys;
    };
    explicit Coefficient(Table t) : repr_(std::move(t)) {}
    std::variant<double, Table, std::function<double(double)>> repr_;
};

/// Physical beam coefficients on the normalized domain [0, 1].
/// E and I are optional; when E is absent the bending speed is computed as
/// sqrt(EI/J), which coincides with sqrt(E/rho) whenever J = rho*I.
struct BeamParameters {
    Coefficient rho;    // linear density
    Coefficient S;      // cross-section area
    Coefficient kappa;  // shear stiffness k_s*G*S
    Coefficient J;      // rotary inertia per unit length
    Coefficient EI;     // bending stiffness
    std::optional<Coefficient> E;  // Young's modulus (optional)
    std::optional<Coefficient> I;  // second moment of area (optional)
};

struct TransportTimes {
    double tau1;
    double tau2;
};

/// Validated parameters plus everything derived from them: transport speeds,
/// characteristic time maps and their inverses, the zero-diagonal coupling
/// matrix A(z), the scaling H(z), and the input matrix B.
class BeamModel {
public:
    bool uniform() const { return uniform_; }
    std::size_t n_grid() const { return n_; }
    double grid_spacing() const { return 1.0 / static_cast<double>(n_ - 1); }
    double grid_point(std::size_t i) const {
        return static_cast<double>(i) / static_cast<double>(n_ - 1);
    }

    double lambda1(double z) const { return uniform_ ? lam1c_ : sample(lam1_, z); }
    double lambda2(double z) const { return uniform_ ? lam2c_ : sample(lam2_, z); }

    /// Travel time of family i from 0 to z.
    double phi1(double z) const { return uniform_ ? z / lam1c_ : sample(phi1_, z); }
    double phi2(double z) const { return uniform_ ? z / lam2c_ : sample(phi2_, z); }

    /// Inverse time maps: psi_i(phi_i(z)) = z.
    double psi1(double s) const { return uniform_ ? s * lam1c_ : inv_sample(phi1_, s); }
    double psi2(double s) const { return uniform_ ? s * lam2c_ : inv_sample(phi2_, s); }

    double tau1() const { return tau1_; }
    double tau2() const { return tau2_; }

    double lambda1_prime(double z) const { return uniform_ ? 0.0 : sample(dlam1_, z); }
    double lambda2_prime(double z) const { return uniform_ ? 0.0 : sample(dlam2_, z); }

    double alpha1(double z) const { return uniform_ ? 0.0 : sample(alpha1_, z); }
    double alpha2(double z) const { return uniform_ ? 0.0 : sample(alpha2_, z); }

    /// Zero-diagonal coupling matrix A(z) = H^{-1}(z) Omega(z) H(z).
    Mat4 A(double z) const {
        const double l1 = lambda1(z);
        const double a1 = uniform_ ? 0.0 : sample(a1_, z);
        const double a2 = uniform_ ? 0.0 : sample(a2_, z);
        const double a3 = uniform_ ? a3c_ : sample(a3_, z);
        Mat4 omega = {{{0.0, -l1, a1, -l1},
                       {a3, 0.0, -a3, a2},
                       {-a1, l1, 0.0, l1},
                       {a3, -a2, -a3, 0.0}}};
        for (auto& row : omega)
            for (double& e : row) e *= 0.5;
        if (uniform_) return omega;
        const double h1 = std::exp(alpha1(z));
        const double h2 = std::exp(alpha2(z));
        const double hd[4] = {h1, h2, h1, h2};
        Mat4 a = omega;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) a[i][j] *= hd[j] / hd[i];
        return a;
    }

    /// Diagonal of H(z).
    Vec4 H_diag(double z) const {
        const double h1 = std::exp(alpha1(z));
        const double h2 = std::exp(alpha2(z));
        return {h1, h2, h1, h2};
    }

    Mat4 V(double z) const {
        const double l1 = lambda1(z);
        const double l2 = lambda2(z);
        return {{{1.0 / l1, 0.0, -1.0 / l1, 0.0},
                 {0.0, 1.0 / l2, 0.0, -1.0 / l2},
                 {1.0, 0.0, 1.0, 0.0},
                 {0.0, 1.0, 0.0, 1.0}}};
    }

    Mat4 Vinv(double z) const {
        const double l1 = lambda1(z);
        const double l2 = lambda2(z);
        return {{{0.5 * l1, 0.0, 0.5, 0.0},
                 {0.0, 0.5 * l2, 0.0, 0.5},
                 {-0.5 * l1, 0.0, 0.5, 0.0},
                 {0.0, -0.5 * l2, 0.0, 0.5}}};
    }

    /// Diagonal of the constant input matrix B and its inverse.
    Vec2 B() const { return {b1_, b2_}; }
    Vec2 Binv() const { return {1.0 / b1_, 1.0 / b2_}; }

    const BeamParameters& parameters() const { return params_; }

    /// Stable identity of the physical content, for cache keying.
    std::uint64_t content_hash() const { return hash_; }

private:
    friend BeamModel build_model(const BeamParameters& params, std::size_t n_grid);

    BeamModel(BeamParameters p, std::size_t n) : params_(std::move(p)), n_(n) {}

    double sample(const std::vector<double>& tab, double z) const {
        return lerp_uniform(tab, 0.0, grid_spacing(), z);
    }

    /// Inverse of a strictly increasing piecewise-linear table over the grid.
    double inv_sample(const std::vector<double>& tab, double s) const {
        const double slack = 1e-9 * tab.back();
        if (s < -slack || s > tab.back() + slack)
            throw Error("BeamModel: inverse time map query outside [0, tau]");
        if (s <= tab.front()) return 0.0;
        if (s >= tab.back()) return 1.0;
        std::size_t lo = 0, hi = tab.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (tab[mid] <= s ? lo : hi) = mid;
        }
        const double u = (s - tab[lo]) / (tab[lo + 1] - tab[lo]);
        return (static_cast<double>(lo) + u) * grid_spacing();
    }

    BeamParameters params_;
    std::size_t n_;
    bool uniform_ = false;
    std::uint64_t hash_ = 0;

    // uniform fast path
    double lam1c_ = 0.0, lam2c_ = 0.0, a3c_ = 0.0;

    // sampled tables (varying coefficients)
    std::vector<double> lam1_, lam2_, dlam1_, dlam2_, a1_, a2_, a3_, alpha1_, alpha2_, phi1_,
        phi2_;

    double tau1_ = 0.0, tau2_ = 0.0;
    double b1_ = 0.0, b2_ = 0.0;
};

namespace detail {

inline void check_positive(const std::vector<double>& ys, double h, const char* name) {
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (!std::isfinite(ys[i]))
            throw Error(std::string("build_model: coefficient ") + name + " not finite at z=" +
                        std::to_string(h * static_cast<double>(i)));
        if (ys[i] <= 0.0)
            throw NonPositiveParameter(std::string("build_model: coefficient ") + name +
                                       " must be strictly positive; violated at z=" +
                                       std::to_string(h * static_cast<double>(i)));
    }
}

/// Central differences inside, one-sided second order at the ends.
inline std::vector<double> fd_derivative(const std::vector<double>& ys, double h) {
    const std::size_t n = ys.size();
    std::vector<double> d(n);
    d[0] = (-3.0 * ys[0] + 4.0 * ys[1] - ys[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (ys[i + 1] - ys[i - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * ys[n - 1] - 4.0 * ys[n - 2] + ys[n - 3]) / (2.0 * h);
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(d[i])) throw Error("build_model: coefficient derivative not finite");
    return d;
}

inline std::uint64_t fnv1a(std::uint64_t seed, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t hash = seed ? seed : 1469598103934665603ULL;
    for (std::size_t i = 0; i < len; ++i) {
        hash ^= p[i];
        hash *= 1099511628211ULL;
    }
    return hash;
}

}  // namespace detail

inline BeamModel build_model(const BeamParameters& params, std::size_t n_grid) {
    if (n_grid < 16) throw GridTooCoarse("build_model: n_grid must be at least 16");

    BeamModel m(params, n_grid);
    const double h = m.grid_spacing();
    const std::size_t n = n_grid;

    auto sample_all = [&](const Coefficient& c) {
        std::vector<double> ys(n);
        for (std::size_t i = 0; i < n; ++i) ys[i] = c(m.grid_point(i));
        return ys;
    };

    const std::vector<double> rho = sample_all(params.rho);
    const std::vector<double> S = sample_all(params.S);
    const std::vector<double> kap = sample_all(params.kappa);
    const std::vector<double> J = sample_all(params.J);
    const std::vector<double> EI = sample_all(params.EI);
    detail::check_positive(rho, h, "rho");
    detail::check_positive(S, h, "S");
    detail::check_positive(kap, h, "kappa");
    detail::check_positive(J, h, "J");
    detail::check_positive(EI, h, "EI");

    const bool has_E = params.E.has_value();
    std::vector<double> Ey;
    if (has_E) {
        Ey = sample_all(*params.E);
        detail::check_positive(Ey, h, "E");
    }

    m.uniform_ = params.rho.is_constant() && params.S.is_constant() &&
                 params.kappa.is_constant() && params.J.is_constant() &&
                 params.EI.is_constant() && (!has_E || params.E->is_constant()) &&
                 (!params.I || params.I->is_constant());

    std::vector<double> lam1(n), lam2(n);
    for (std::size_t i = 0; i < n; ++i) {
        lam1[i] = std::sqrt(kap[i] / (rho[i] * S[i]));
        lam2[i] = has_E ? std::sqrt(Ey[i] / rho[i]) : std::sqrt(EI[i] / J[i]);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!(lam1[i] > lam2[i]))
            throw SpeedOrderingViolation(
                "build_model: shear speed must strictly exceed bending speed; violated at z=" +
                std::to_string(m.grid_point(i)) + " (lambda1=" + std::to_string(lam1[i]) +
                ", lambda2=" + std::to_string(lam2[i]) + ")");
    }

    std::uint64_t hash = 0;
    auto mix = [&](const std::vector<double>& ys) {
        hash = detail::fnv1a(hash, ys.data(), ys.size() * sizeof(double));
    };
    mix(rho);
    mix(S);
    mix(kap);
    mix(J);
    mix(EI);
    mix(lam2);  // captures the E-vs-EI/J choice
    m.hash_ = hash;

    if (m.uniform_) {
        m.lam1c_ = lam1[0];
        m.lam2c_ = lam2[0];
        m.a3c_ = kap[0] / (J[0] * lam1[0]);
        m.tau1_ = 1.0 / lam1[0];
        m.tau2_ = 1.0 / lam2[0];
        m.b1_ = 1.0 / std::sqrt(rho[0] * S[0] * kap[0]);
        m.b2_ = 1.0 / std::sqrt(J[0] * EI[0]);
        return m;
    }

    const std::vector<double> dlam1 = detail::fd_derivative(lam1, h);
    const std::vector<double> dlam2 = detail::fd_derivative(lam2, h);
    const std::vector<double> dkap = detail::fd_derivative(kap, h);
    const std::vector<double> dEI = detail::fd_derivative(EI, h);

    std::vector<double> a1(n), a2(n), a3(n), inv_l1(n), inv_l2(n), g1(n), g2(n);
    for (std::size_t i = 0; i < n; ++i) {
        a1[i] = dlam1[i] - dkap[i] / (lam1[i] * S[i] * rho[i]);
        a2[i] = dlam2[i] - dEI[i] / (lam2[i] * J[i]);
        a3[i] = kap[i] / (J[i] * lam1[i]);
        inv_l1[i] = 1.0 / lam1[i];
        inv_l2[i] = 1.0 / lam2[i];
        g1[i] = a1[i] / (2.0 * lam1[i]);
        g2[i] = a2[i] / (2.0 * lam2[i]);
    }

    m.lam1_ = lam1;
    m.lam2_ = lam2;
    m.dlam1_ = dlam1;
    m.dlam2_ = dlam2;
    m.a1_ = a1;
    m.a2_ = a2;
    m.a3_ = a3;
    m.phi1_ = cumtrapz(inv_l1, h);
    m.phi2_ = cumtrapz(inv_l2, h);
    m.alpha1_ = cumtrapz(g1, h);
    m.alpha2_ = cumtrapz(g2, h);
    m.tau1_ = m.phi1_.back();
    m.tau2_ = m.phi2_.back();
    m.b1_ = std::exp(-m.alpha1_.back()) / std::sqrt(rho.back() * S.back() * kap.back());
    m.b2_ = std::exp(-m.alpha2_.back()) / std::sqrt(J.back() * EI.back());
    return m;
}

inline TransportTimes transport_times(const BeamModel& model) {
    return {model.tau1(), model.tau2()};
}

}  // namespace hcfbeam
