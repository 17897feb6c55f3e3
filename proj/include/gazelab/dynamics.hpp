#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "gazelab/fields.hpp"
#include "gazelab/raster.hpp"

namespace gazelab {

/// Model constants of the eye-movement laws.
struct EymolParams {
    double mass = 1.0;
    double elastic = 5.0;  // k, retina bound stiffness
    double eta = 0.0;      // curiosity weight
    double lambda = 0.0;   // brightness-invariance weight
    double gamma = 0.0;    // top-down weight
    double omega = 2.0 * std::numbers::pi;  // rad/s
    double dt = 1e-3;        // s
    double duration = 1.0;   // s
    double init_pos_sigma = 5.0;  // px
    double init_vel_sigma = 50.0; // px/s
    int n_runs = 199;
    std::uint64_t seed = 0;

    friend bool operator==(const EymolParams&, const EymolParams&) = default;
};

class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Throws ParameterError unless m > 0, k >= 0, eta, lambda, gamma >= 0,
/// omega > 0, dt > 0, duration >= dt and n_runs >= 1.
void validate(const EymolParams& p);

/// Throws ParameterError when 4 * lambda * max_grad_sq > 0.9 * m, i.e. when
/// the effective mass could fall below a tenth of m.
void check_stability(const EymolParams& p, double max_grad_sq);

/// Largest lambda accepted by check_stability (0 when the image is flat).
double max_stable_lambda(double mass, double max_grad_sq);

/// Per-image normalisation of the force weights. eta and gamma are chosen so
/// that the 99th percentile of |eta grad C| (at t = 0) and |gamma grad M|
/// equal `target_accel`; lambda becomes lambda_frac times its stability limit.
struct AutoScale {
    bool eta = true;
    bool lambda = true;
    bool gamma = true;
    double target_accel = 1e4;  // px/s^2
    double lambda_frac = 0.5;

    friend bool operator==(const AutoScale&, const AutoScale&) = default;
};

EymolParams auto_scale(EymolParams p, const FieldSet& fields, const AutoScale& scale);

/// Retina rectangle [0, l1] x [0, l2], continuous pixel coordinates.
struct Retina {
    double l1 = 0.0;
    double l2 = 0.0;
};

inline Retina retina_of(Dims d) { return {static_cast<double>(d.width), static_cast<double>(d.height)}; }

struct SimState {
    double t = 0.0;
    Vec2 x;
    Vec2 v;

    friend bool operator==(const SimState&, const SimState&) = default;
};

struct Trajectory {
    Dims dims;
    double dt = 0.0;
    std::vector<SimState> samples;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Number of samples of a run: floor(duration / dt) + 1.
std::size_t sample_count(double duration, double dt);

/// V(x) = k * sum_i ((x_i - l_i)^2 [x_i > l_i] + x_i^2 [x_i < 0]).
double retina_potential(Vec2 x, Retina r, double k);

/// -grad V; zero inside the retina.
Vec2 retina_force(Vec2 x, Retina r, double k);

double kinetic_energy(const SimState& s, const EymolParams& p);

// ---------------------------------------------------------------------------
// Force evaluation is generic over the source of potential fields so that
// analytic fields (tests) and bilinearly sampled images share one code path.

/// Field values the force law needs at one position.
struct PotentialSample {
    double grad_sq_local = 0.0;  // g_b
    Vec2 grad_local;             // grad g_b
    Vec2 grad_periph;            // grad g_p
    Vec2 grad_topdown;           // grad M, zero without a map
};

template <typename S>
concept PotentialSource = requires(const S& s, Vec2 x, bool want_topdown) {
    { s.sample(x, want_topdown) } -> std::same_as<PotentialSample>;
    { s.retina() } -> std::same_as<Retina>;
    { s.has_topdown() } -> std::convertible_to<bool>;
};

/// Bilinear view of a FieldSet. Outside the span of pixel centers the
/// fields are flat along the outward normal, so only the retina bound acts
/// in that direction.
class FieldSetSource {
public:
    explicit FieldSetSource(const FieldSet& fields) : fields_(&fields) {}

    PotentialSample sample(Vec2 x, bool want_topdown) const;
    Retina retina() const { return retina_of(fields_->retina()); }
    bool has_topdown() const { return fields_->has_topdown(); }

private:
    const FieldSet* fields_;
};

/// Attraction toward high squared-gradient regions, alternating between the
/// local and the peripheral field: eta * (cos^2(wt) grad g_b + sin^2(wt) grad g_p).
inline Vec2 curiosity_force(const PotentialSample& s, double t, double eta, double omega) {
    const double c = std::cos(omega * t);
    const double sn = std::sin(omega * t);
    return eta * ((c * c) * s.grad_local + (sn * sn) * s.grad_periph);
}

Vec2 curiosity_force(Vec2 x, double t, const FieldSet& fields, double eta, double omega);

/// gamma * grad M, or zero when no map is loaded.
Vec2 topdown_force(Vec2 x, const FieldSet& fields, double gamma);

/// Solves the Euler-Lagrange equations with the upper-bounded brightness
/// term for the acceleration:
///
///   (m - 4 lambda g_b) a = 4 lambda (grad g_b . v) v - 2 lambda |v|^2 grad g_b
///                          - grad V + eta grad C + gamma grad M
///
/// The effective mass on the left is clamped below at 0.05 m. With
/// `TopDown == false` the gamma term is compiled out entirely.
template <bool TopDown = true, PotentialSource Source>
Vec2 acceleration(const SimState& s, const Source& src, const EymolParams& p) {
    const bool use_topdown = TopDown && p.gamma != 0.0 && src.has_topdown();
    const PotentialSample f = src.sample(s.x, use_topdown);

    Vec2 force = retina_force(s.x, src.retina(), p.elastic) + curiosity_force(f, s.t, p.eta, p.omega);
    if constexpr (TopDown) {
        if (use_topdown) force += p.gamma * f.grad_topdown;
    }
    if (p.lambda != 0.0) {
        force += (4.0 * p.lambda * dot(f.grad_local, s.v)) * s.v;
        force += (-2.0 * p.lambda * dot(s.v, s.v)) * f.grad_local;
    }
    const double m_eff = std::max(p.mass - 4.0 * p.lambda * f.grad_sq_local, 0.05 * p.mass);
    return (1.0 / m_eff) * force;
}

Vec2 acceleration(const SimState& s, const FieldSet& fields, const EymolParams& p);

/// Classical RK4 step of size p.dt on (x, v)' = (v, a). Throws
/// IntegrationError if the new state is not finite.
template <bool TopDown = true, PotentialSource Source>
SimState rk4_step(const SimState& s, const Source& src, const EymolParams& p) {
    const double h = p.dt;
    const auto accel = [&](double t, Vec2 x, Vec2 v) { return acceleration<TopDown>(SimState{t, x, v}, src, p); };

    const Vec2 k1x = s.v;
    const Vec2 k1v = accel(s.t, s.x, s.v);
    const Vec2 k2x = s.v + (0.5 * h) * k1v;
    const Vec2 k2v = accel(s.t + 0.5 * h, s.x + (0.5 * h) * k1x, k2x);
    const Vec2 k3x = s.v + (0.5 * h) * k2v;
    const Vec2 k3v = accel(s.t + 0.5 * h, s.x + (0.5 * h) * k2x, k3x);
    const Vec2 k4x = s.v + h * k3v;
    const Vec2 k4v = accel(s.t + h, s.x + h * k3x, k4x);

    SimState out;
    out.t = s.t + h;
    out.x = s.x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    out.v = s.v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (!is_finite(out.x) || !is_finite(out.v)) {
        throw IntegrationError("integration diverged at t=" + std::to_string(s.t) + " from x=(" +
                               std::to_string(s.x.x) + ", " + std::to_string(s.x.y) + ")");
    }
    return out;
}

SimState rk4_step(const SimState& s, const FieldSet& fields, const EymolParams& p);

/// Integrates from `start` for floor(duration/dt) steps. Sample k carries
/// t = start.t + k dt exactly.
template <bool TopDown = true, PotentialSource Source>
Trajectory integrate(SimState start, const Source& src, const EymolParams& p, Dims dims) {
    const std::size_t n = sample_count(p.duration, p.dt);
    Trajectory tr{dims, p.dt, {}};
    tr.samples.reserve(n);
    tr.samples.push_back(start);
    SimState s = start;
    for (std::size_t k = 1; k < n; ++k) {
        s = rk4_step<TopDown>(s, src, p);
        s.t = start.t + static_cast<double>(k) * p.dt;
        tr.samples.push_back(s);
    }
    return tr;
}

/// Seeded initial condition of run `run_index`: position drawn around the
/// image center (clamped into the retina), velocity around zero.
SimState initial_state(const EymolParams& p, Dims dims, int run_index);

/// One seeded run. Runs are independent of each other and of execution order.
template <bool TopDown = true, PotentialSource Source>
Trajectory simulate_run(const Source& src, const EymolParams& p, Dims dims, int run_index) {
    return integrate<TopDown>(initial_state(p, dims, run_index), src, p, dims);
}

Trajectory simulate_run(const FieldSet& fields, const EymolParams& p, int run_index);

/// All p.n_runs runs, in run order, on up to `jobs` threads.
std::vector<Trajectory> simulate_runs(const FieldSet& fields, const EymolParams& p, int jobs);

/// CSV with header `t,x,y,vx,vy`, 9 significant digits.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& tr);
Trajectory read_trajectory_csv(const std::filesystem::path& path, Dims dims);

}  // namespace gazelab
