#include "gazelab/dynamics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "gazelab/parallel.hpp"
#include "gazelab/seeding.hpp"

namespace gazelab {

void validate(const EymolParams& p) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ParameterError(std::string("invalid parameters: ") + what);
    };
    require(p.mass > 0.0, "mass must be positive");
    require(p.elastic >= 0.0, "elastic constant must be non-negative");
    require(p.eta >= 0.0, "eta must be non-negative");
    require(p.lambda >= 0.0, "lambda must be non-negative");
    require(p.gamma >= 0.0, "gamma must be non-negative");
    require(p.omega > 0.0, "omega must be positive");
    require(p.dt > 0.0, "dt must be positive");
    require(p.duration >= p.dt, "duration must be at least dt");
    require(p.init_pos_sigma >= 0.0 && p.init_vel_sigma >= 0.0, "initial spreads must be non-negative");
    require(p.n_runs >= 1, "n_runs must be at least 1");
}

double max_stable_lambda(double mass, double max_grad_sq) {
    if (!(max_grad_sq > 0.0)) return 0.0;
    return 0.9 * mass / (4.0 * max_grad_sq);
}

void check_stability(const EymolParams& p, double max_grad_sq) {
    if (4.0 * p.lambda * max_grad_sq > 0.9 * p.mass) {
        throw ParameterError(fmt::format(
            "lambda={} violates the stability bound 4*lambda*max(g_b) <= 0.9*m (max g_b={}, m={}); use lambda <= {}",
            p.lambda, max_grad_sq, p.mass, max_stable_lambda(p.mass, max_grad_sq)));
    }
}

namespace {

// 99th percentile (nearest rank) of the vector magnitudes; falls back to the
// maximum when the percentile is zero but some gradient is not.
double robust_scale(const VectorField& g) {
    std::vector<double> mags;
    mags.reserve(g.size());
    for (const Vec2& v : g) mags.push_back(norm(v));
    const std::size_t rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(mags.size()))) - 1;
    std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(rank), mags.end());
    const double p99 = mags[rank];
    if (p99 > 0.0) return p99;
    return *std::max_element(mags.begin(), mags.end());
}

}  // namespace

EymolParams auto_scale(EymolParams p, const FieldSet& fields, const AutoScale& scale) {
    if (scale.eta) {
        const double s = robust_scale(fields.grad_local);
        p.eta = s > 0.0 ? scale.target_accel / s : 0.0;
    }
    if (scale.gamma) {
        p.gamma = 0.0;
        if (fields.grad_topdown) {
            const double s = robust_scale(*fields.grad_topdown);
            p.gamma = s > 0.0 ? scale.target_accel / s : 0.0;
        }
    }
    if (scale.lambda) {
        const double gmax = *std::max_element(fields.grad_sq_local.begin(), fields.grad_sq_local.end());
        p.lambda = scale.lambda_frac * max_stable_lambda(p.mass, gmax);
    }
    return p;
}

std::size_t sample_count(double duration, double dt) {
    return static_cast<std::size_t>(std::floor(duration / dt + 1e-9)) + 1;
}

double retina_potential(Vec2 x, Retina r, double k) {
    auto axis = [](double xi, double li) {
        if (xi > li) return (li - xi) * (li - xi);
        if (xi < 0.0) return xi * xi;
        return 0.0;
    };
    return k * (axis(x.x, r.l1) + axis(x.y, r.l2));
}

Vec2 retina_force(Vec2 x, Retina r, double k) {
    auto axis = [k](double xi, double li) {
        if (xi > li) return -2.0 * k * (xi - li);
        if (xi < 0.0) return -2.0 * k * xi;
        return 0.0;
    };
    return {axis(x.x, r.l1), axis(x.y, r.l2)};
}

double kinetic_energy(const SimState& s, const EymolParams& p) { return 0.5 * p.mass * dot(s.v, s.v); }

namespace {

// Beyond the outermost pixel centers the sampled scalars are constant along
// the outward normal, so that component of their gradient is zero there.
Vec2 clamped_gradient(const VectorField& g, Vec2 x) {
    Vec2 v = sample_bilinear(g, x);
    if (!(x.x >= 0.0 && x.x <= g.width() - 1)) v.x = 0.0;
    if (!(x.y >= 0.0 && x.y <= g.height() - 1)) v.y = 0.0;
    return v;
}

}  // namespace

PotentialSample FieldSetSource::sample(Vec2 x, bool want_topdown) const {
    PotentialSample s;
    s.grad_sq_local = sample_bilinear(fields_->grad_sq_local, x);
    s.grad_local = clamped_gradient(fields_->grad_local, x);
    s.grad_periph = clamped_gradient(fields_->grad_periph, x);
    if (want_topdown && fields_->grad_topdown) s.grad_topdown = clamped_gradient(*fields_->grad_topdown, x);
    return s;
}

Vec2 curiosity_force(Vec2 x, double t, const FieldSet& fields, double eta, double omega) {
    return curiosity_force(FieldSetSource(fields).sample(x, false), t, eta, omega);
}

Vec2 topdown_force(Vec2 x, const FieldSet& fields, double gamma) {
    if (!fields.grad_topdown || gamma == 0.0) return {};
    return gamma * FieldSetSource(fields).sample(x, true).grad_topdown;
}

Vec2 acceleration(const SimState& s, const FieldSet& fields, const EymolParams& p) {
    return acceleration(s, FieldSetSource(fields), p);
}

SimState rk4_step(const SimState& s, const FieldSet& fields, const EymolParams& p) {
    return rk4_step(s, FieldSetSource(fields), p);
}

SimState initial_state(const EymolParams& p, Dims dims, int run_index) {
    std::mt19937_64 rng(derive_seed(p.seed, static_cast<std::uint64_t>(run_index)));
    std::normal_distribution<double> unit(0.0, 1.0);
    const double n1 = unit(rng);
    const double n2 = unit(rng);
    const double n3 = unit(rng);
    const double n4 = unit(rng);
    const Retina r = retina_of(dims);
    const Vec2 center{0.5 * (dims.width - 1), 0.5 * (dims.height - 1)};
    SimState s;
    s.x = {std::clamp(center.x + p.init_pos_sigma * n1, 0.0, r.l1),
           std::clamp(center.y + p.init_pos_sigma * n2, 0.0, r.l2)};
    s.v = {p.init_vel_sigma * n3, p.init_vel_sigma * n4};
    return s;
}

Trajectory simulate_run(const FieldSet& fields, const EymolParams& p, int run_index) {
    return simulate_run(FieldSetSource(fields), p, fields.retina(), run_index);
}

std::vector<Trajectory> simulate_runs(const FieldSet& fields, const EymolParams& p, int jobs) {
    std::vector<Trajectory> runs(static_cast<std::size_t>(p.n_runs));
    parallel_for(runs.size(), jobs, [&](std::size_t i) { runs[i] = simulate_run(fields, p, static_cast<int>(i)); });
    return runs;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& tr) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "t,x,y,vx,vy\n";
    for (const SimState& s : tr.samples) {
        out << fmt::format("{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", s.t, s.x.x, s.x.y, s.v.x, s.v.y);
    }
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

Trajectory read_trajectory_csv(const std::filesystem::path& path, Dims dims) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != "t,x,y,vx,vy") {
        throw std::runtime_error(path.string() + ": expected header 't,x,y,vx,vy'");
    }
    Trajectory tr{dims, 0.0, {}};
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        SimState s;
        if (!(ss >> s.t >> s.x.x >> s.x.y >> s.v.x >> s.v.y)) {
            throw std::runtime_error(fmt::format("{}:{}: malformed trajectory row", path.string(), lineno));
        }
        tr.samples.push_back(s);
    }
    if (tr.samples.size() >= 2) tr.dt = tr.samples[1].t - tr.samples[0].t;
    return tr;
}

}  // namespace gazelab
