// Shared fixtures for the unit tests and the acceptance runner.
#pragma once

#include <cmath>
#include <filesystem>
#include <random>

#include "gazelab/dynamics.hpp"
#include "gazelab/raster.hpp"

namespace gazelab::testing {

/// Only the elastic retina bound acts. With a zero-size retina, V = k |x|^2
/// on both sides of the origin, i.e. a full harmonic oscillator.
struct ElasticOnly {
    Retina r{};
    PotentialSample sample(Vec2, bool) const { return {}; }
    Retina retina() const { return r; }
    bool has_topdown() const { return false; }
};

/// Smooth closed-form potentials on a 100x80 retina. Every scalar is given
/// together with its exact gradient so tests can differentiate the scalars
/// numerically and compare.
struct AnalyticFields {
    static constexpr double l1 = 100.0, l2 = 80.0;

    static double bump(Vec2 x, Vec2 c, double s) {
        const Vec2 d = x - c;
        return std::exp(-dot(d, d) / (2.0 * s * s));
    }
    static Vec2 bump_grad(Vec2 x, Vec2 c, double s) { return (-bump(x, c, s) / (s * s)) * (x - c); }

    // g_b: a bump plus a gentle ripple, positive everywhere.
    static double gb(Vec2 x) {
        return 0.02 * bump(x, {60, 30}, 15) + 0.01 * (1.0 + std::sin(x.x / 9.0) * std::cos(x.y / 11.0));
    }
    static Vec2 gb_grad(Vec2 x) {
        const Vec2 ripple{std::cos(x.x / 9.0) * std::cos(x.y / 11.0) / 9.0,
                          -std::sin(x.x / 9.0) * std::sin(x.y / 11.0) / 11.0};
        return 0.02 * bump_grad(x, {60, 30}, 15) + 0.01 * ripple;
    }
    static double gp(Vec2 x) { return 0.5 * bump(x, {30, 50}, 25); }
    static Vec2 gp_grad(Vec2 x) { return 0.5 * bump_grad(x, {30, 50}, 25); }
    static double m(Vec2 x) { return bump(x, {70, 60}, 20); }
    static Vec2 m_grad(Vec2 x) { return bump_grad(x, {70, 60}, 20); }

    PotentialSample sample(Vec2 x, bool want_topdown) const {
        PotentialSample s;
        s.grad_sq_local = gb(x);
        s.grad_local = gb_grad(x);
        s.grad_periph = gp_grad(x);
        if (want_topdown) s.grad_topdown = m_grad(x);
        return s;
    }
    Retina retina() const { return {l1, l2}; }
    bool has_topdown() const { return true; }
};

/// Lagrangian whose Euler-Lagrange equations the acceleration law solves:
/// L = m|v|^2/2 - V(x) + eta C(t,x) - 2 lambda g_b(x) |v|^2 + gamma M(x).
inline double lagrangian(Vec2 x, Vec2 v, double t, const EymolParams& p) {
    const double c = std::cos(p.omega * t), s = std::sin(p.omega * t);
    const double C = c * c * AnalyticFields::gb(x) + s * s * AnalyticFields::gp(x);
    return 0.5 * p.mass * dot(v, v) - retina_potential(x, {AnalyticFields::l1, AnalyticFields::l2}, p.elastic) +
           p.eta * C - 2.0 * p.lambda * AnalyticFields::gb(x) * dot(v, v) + p.gamma * AnalyticFields::m(x);
}

/// Five-point central difference of a scalar function of one variable.
template <typename F>
double d5(F&& f, double h) {
    return (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h);
}

/// Euler-Lagrange residual d/dt(dL/dv) - dL/dx at state s with acceleration a,
/// all derivatives taken numerically from `lagrangian`.
inline Vec2 el_residual(const SimState& s, Vec2 a, const EymolParams& p) {
    auto dL_dv = [&](Vec2 x, Vec2 v, double t) {
        const double hv = 1e-2;
        return Vec2{d5([&](double e) { return lagrangian(x, v + Vec2{e, 0}, t, p); }, hv),
                    d5([&](double e) { return lagrangian(x, v + Vec2{0, e}, t, p); }, hv)};
    };
    const double h = 1e-3;
    Vec2 ddt;
    ddt.x = d5([&](double e) { return dL_dv(s.x + e * s.v, s.v + e * a, s.t + e).x; }, h);
    ddt.y = d5([&](double e) { return dL_dv(s.x + e * s.v, s.v + e * a, s.t + e).y; }, h);
    const Vec2 dL_dx{d5([&](double e) { return lagrangian(s.x + Vec2{e, 0}, s.v, s.t, p); }, h),
                     d5([&](double e) { return lagrangian(s.x + Vec2{0, e}, s.v, s.t, p); }, h)};
    return ddt - dL_dx;
}

inline EymolParams analytic_params() {
    EymolParams p;
    p.mass = 1.0;
    p.elastic = 5.0;
    p.eta = 500.0;
    p.lambda = 2.0;
    p.gamma = 300.0;
    p.omega = 2.0 * M_PI;
    return p;
}

/// Off-center Gaussian blob on a dark background, the attraction stimulus.
inline Image blob_image(Dims d, Vec2 center, double sigma) {
    Image img = Image::blank(d.width, d.height, 1);
    for (int y = 0; y < d.height; ++y) {
        for (int x = 0; x < d.width; ++x) {
            img.at(x, y, 0) = 0.1 + 0.8 * AnalyticFields::bump({double(x), double(y)}, center, sigma);
        }
    }
    return img;
}

inline Image noise_image(int w, int h, std::uint64_t seed, int channels = 3) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Image img = Image::blank(w, h, channels);
    for (double& v : img.data) v = u(rng);
    return img;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "gazelab_tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace gazelab::testing
