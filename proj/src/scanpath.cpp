#include "gazelab/scanpath.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace gazelab {

void validate(const Scanpath& s) {
    for (std::size_t i = 0; i < s.fixations.size(); ++i) {
        const Fixation& f = s.fixations[i];
        if (!std::isfinite(f.x) || !std::isfinite(f.y) || !std::isfinite(f.t_start) || !std::isfinite(f.duration)) {
            throw std::invalid_argument(fmt::format("fixation {} has a non-finite field", i));
        }
        if (f.duration < 0.0) throw std::invalid_argument(fmt::format("fixation {} has negative duration", i));
        if (i > 0) {
            const Fixation& prev = s.fixations[i - 1];
            if (!(f.t_start > prev.t_start)) {
                throw std::invalid_argument(fmt::format("fixation {} does not start after fixation {}", i, i - 1));
            }
            if (f.t_start < prev.t_start + prev.duration - 1e-9) {
                throw std::invalid_argument(fmt::format("fixation {} overlaps fixation {}", i, i - 1));
            }
        }
    }
}

Scanpath detect_fixations(const std::vector<GazeSample>& samples, const FixationDetectorParams& p, Dims dims) {
    if (samples.size() < 2) throw std::invalid_argument("fixation detection needs at least two samples");
    if (!(p.maxdist > 0.0) || !(p.mindur > 0.0)) {
        throw std::invalid_argument("fixation detector thresholds must be positive");
    }
    Scanpath out{{}, dims};
    const double maxdist2 = p.maxdist * p.maxdist;

    auto emit = [&](std::size_t first, std::size_t last) {
        const double duration = samples[last].t - samples[first].t;
        if (duration < p.mindur) return;
        double sx = 0.0;
        double sy = 0.0;
        for (std::size_t i = first; i <= last; ++i) {
            sx += samples[i].x;
            sy += samples[i].y;
        }
        const double n = static_cast<double>(last - first + 1);
        out.fixations.push_back({samples[first].t, duration, sx / n, sy / n});
    };

    std::size_t anchor = 0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double dx = samples[i].x - samples[anchor].x;
        const double dy = samples[i].y - samples[anchor].y;
        if (dx * dx + dy * dy > maxdist2) {
            emit(anchor, i - 1);
            anchor = i;
        }
    }
    emit(anchor, samples.size() - 1);
    return out;
}

Scanpath scanpath_from_trajectory(const Trajectory& tr, const FixationDetectorParams& p) {
    std::vector<GazeSample> samples;
    samples.reserve(tr.samples.size());
    for (const SimState& s : tr.samples) samples.push_back({s.t, s.x.x, s.x.y});
    return detect_fixations(samples, p, tr.dims);
}

std::string to_string(BaselineKind kind) { return kind == BaselineKind::Random ? "Random" : "Center"; }

Scanpath baseline_scanpath(BaselineKind kind, int n_fix, Dims dims, std::uint64_t seed, double sigma_scale) {
    if (n_fix < 1) throw std::invalid_argument("baseline scanpath needs at least one fixation");
    std::mt19937_64 rng(seed);
    Scanpath s{{}, dims};
    s.fixations.reserve(static_cast<std::size_t>(n_fix));
    const double w = dims.width;
    const double h = dims.height;
    std::uniform_real_distribution<double> ux(0.0, w);
    std::uniform_real_distribution<double> uy(0.0, h);
    std::normal_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < n_fix; ++i) {
        double x = 0.0;
        double y = 0.0;
        if (kind == BaselineKind::Random) {
            x = ux(rng);
            y = uy(rng);
        } else {
            const double zx = unit(rng);
            const double zy = unit(rng);
            x = std::clamp(0.5 * (w - 1) + sigma_scale * w * zx, 0.0, w - 1);
            y = std::clamp(0.5 * (h - 1) + sigma_scale * h * zy, 0.0, h - 1);
        }
        s.fixations.push_back({0.3 * i, 0.25, x, y});
    }
    return s;
}

void write_scanpath_csv(const std::filesystem::path& path, const Scanpath& s, const std::string& observer) {
    if (observer.find_first_of(",\n") != std::string::npos) {
        throw std::invalid_argument("observer id must not contain commas or newlines");
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "observer,t_start,duration,x,y\n";
    for (const Fixation& f : s.fixations) {
        out << fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f}\n", observer, f.t_start, f.duration, f.x, f.y);
    }
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<std::pair<std::string, Scanpath>> read_scanpath_csv(const std::filesystem::path& path, Dims dims) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "observer,t_start,duration,x,y") {
        throw std::runtime_error(path.string() + ": expected header 'observer,t_start,duration,x,y'");
    }
    std::vector<std::pair<std::string, Scanpath>> groups;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error(fmt::format("{}:{}: malformed row", path.string(), lineno));
        }
        std::string observer = line.substr(0, comma);
        std::string rest = line.substr(comma + 1);
        std::replace(rest.begin(), rest.end(), ',', ' ');
        std::istringstream ss(rest);
        Fixation f;
        std::string trailing;
        if (!(ss >> f.t_start >> f.duration >> f.x >> f.y) || (ss >> trailing)) {
            throw std::runtime_error(fmt::format("{}:{}: malformed row", path.string(), lineno));
        }
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == observer; });
        if (it == groups.end()) {
            groups.push_back({observer, Scanpath{{}, dims}});
            it = std::prev(groups.end());
        }
        it->second.fixations.push_back(f);
    }
    return groups;
}

}  // namespace gazelab
