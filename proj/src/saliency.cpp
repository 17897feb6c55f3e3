#include "gazelab/saliency.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "gazelab/fields.hpp"
#include "gazelab/image_io.hpp"

namespace gazelab {

bool pixel_of(Vec2 p, Dims dims, int& px, int& py) {
    if (!is_finite(p)) return false;
    const double fx = std::floor(p.x + 0.5);
    const double fy = std::floor(p.y + 0.5);
    if (fx < 0.0 || fy < 0.0 || fx >= dims.width || fy >= dims.height) return false;
    px = static_cast<int>(fx);
    py = static_cast<int>(fy);
    return true;
}

std::size_t deposit(const Trajectory& tr, ScalarField& occupancy) {
    std::size_t landed = 0;
    for (const SimState& s : tr.samples) {
        int px = 0;
        int py = 0;
        if (!pixel_of(s.x, occupancy.dims(), px, py)) continue;
        occupancy.at(px, py) += tr.dt;
        ++landed;
    }
    return landed;
}

SaliencyMap normalize(ScalarField raw) {
    const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
    if (!(total > 0.0) || !std::isfinite(total)) throw std::domain_error("saliency map has no mass to normalise");
    for (double& v : raw) v /= total;
    return {std::move(raw)};
}

SaliencyMap accumulate(const std::vector<Trajectory>& trajectories, Dims dims) {
    if (trajectories.empty()) throw std::invalid_argument("accumulate needs at least one trajectory");
    ScalarField occupancy(dims);
    std::size_t landed = 0;
    for (const Trajectory& tr : trajectories) {
        if (tr.dims != dims) throw std::invalid_argument("trajectory dimensions differ from the map");
        landed += deposit(tr, occupancy);
    }
    if (landed == 0) throw std::domain_error("every trajectory sample lies outside the retina");
    return normalize(std::move(occupancy));
}

SaliencyMap accumulate_fixations(const std::vector<Scanpath>& scanpaths, Dims dims) {
    ScalarField counts(dims);
    for (const Scanpath& s : scanpaths) {
        for (const Fixation& f : s.fixations) {
            int px = 0;
            int py = 0;
            if (pixel_of(f.position(), dims, px, py)) counts.at(px, py) += 1.0;
        }
    }
    return normalize(std::move(counts));
}

double default_map_blur_sigma(Dims d) { return d.width / 32.0; }

SaliencyMap blur_map(const SaliencyMap& s, double sigma) { return normalize(gaussian_blur(s.density, sigma)); }

SaliencyMap center_bias(const SaliencyMap& s) {
    const Dims d = s.dims();
    const double cx = 0.5 * (d.width - 1);
    const double cy = 0.5 * (d.height - 1);
    const double sx = d.width / 4.0;
    const double sy = d.height / 4.0;
    ScalarField out(d);
    for (int y = 0; y < d.height; ++y) {
        for (int x = 0; x < d.width; ++x) {
            const double ex = (x - cx) / sx;
            const double ey = (y - cy) / sy;
            out.at(x, y) = s.density.at(x, y) * std::exp(-0.5 * (ex * ex + ey * ey));
        }
    }
    return normalize(std::move(out));
}

SaliencyMap histogram_match(const SaliencyMap& s, const SaliencyMap& target) {
    if (s.dims() != target.dims()) {
        throw std::invalid_argument("histogram_match: maps differ in size (" + to_string(s.dims()) + " vs " +
                                    to_string(target.dims()) + ")");
    }
    const std::size_t n = s.density.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = s.density[a];
        const double vb = s.density[b];
        return va < vb || (va == vb && a < b);
    });
    std::vector<double> sorted_target = target.density.values();
    std::sort(sorted_target.begin(), sorted_target.end());

    ScalarField out(s.dims());
    for (std::size_t begin = 0; begin < n;) {
        std::size_t end = begin + 1;
        while (end < n && s.density[order[end]] == s.density[order[begin]]) ++end;
        double value = sorted_target[begin];
        if (sorted_target[end - 1] != sorted_target[begin]) {
            value = std::accumulate(sorted_target.begin() + static_cast<std::ptrdiff_t>(begin),
                                    sorted_target.begin() + static_cast<std::ptrdiff_t>(end), 0.0) /
                    static_cast<double>(end - begin);
        }
        for (std::size_t r = begin; r < end; ++r) out[order[r]] = value;
        begin = end;
    }
    // The target already sums to one; only rescale when rounding drifted.
    const double total = std::accumulate(out.begin(), out.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) return normalize(std::move(out));
    return {std::move(out)};
}

void write_saliency_map(const std::filesystem::path& path, const SaliencyMap& s) {
    const auto [lo, hi] = std::minmax_element(s.density.begin(), s.density.end());
    const double offset = *lo;
    const double range = *hi - *lo;
    GrayRaster raster{s.width(), s.height(), 65535, {}};
    raster.samples.resize(s.density.size());
    for (std::size_t i = 0; i < s.density.size(); ++i) {
        const double q = range > 0.0 ? (s.density[i] - offset) / range : 0.0;
        raster.samples[i] = static_cast<std::uint16_t>(std::lround(std::clamp(q, 0.0, 1.0) * 65535.0));
    }
    write_pgm16(path, raster);
    std::ofstream side(path.string() + ".scale");
    if (!side) throw std::runtime_error("cannot write sidecar for '" + path.string() + "'");
    side << fmt::format("offset={:.17g}\nrange={:.17g}\n", offset, range);
}

SaliencyMap read_saliency_map(const std::filesystem::path& path) {
    const GrayRaster raster = read_gray16(path);
    std::ifstream side(path.string() + ".scale");
    if (!side) throw std::runtime_error("missing sidecar '" + path.string() + ".scale'");
    double offset = 0.0;
    double range = 0.0;
    bool have_offset = false;
    bool have_range = false;
    std::string line;
    while (std::getline(side, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const double value = std::stod(line.substr(eq + 1));
        if (key == "offset") {
            offset = value;
            have_offset = true;
        } else if (key == "range") {
            range = value;
            have_range = true;
        }
    }
    if (!have_offset || !have_range) throw std::runtime_error("malformed sidecar for '" + path.string() + "'");
    ScalarField d(raster.width, raster.height);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = offset + range * (raster.samples[i] / 65535.0);
    return normalize(std::move(d));
}

SaliencyMap read_density_pgm(const std::filesystem::path& path) {
    const GrayRaster raster = read_gray16(path);
    ScalarField d(raster.width, raster.height);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = raster.samples[i] / 65535.0;
    return normalize(std::move(d));
}

}  // namespace gazelab
