#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gazelab/dynamics.hpp"
#include "gazelab/raster.hpp"

namespace gazelab {

struct Fixation {
    double t_start = 0.0;  // s
    double duration = 0.0; // s
    double x = 0.0;        // px
    double y = 0.0;        // px

    Vec2 position() const { return {x, y}; }
    friend bool operator==(const Fixation&, const Fixation&) = default;
};

struct Scanpath {
    std::vector<Fixation> fixations;
    Dims dims;

    bool empty() const { return fixations.empty(); }
    std::size_t size() const { return fixations.size(); }
    friend bool operator==(const Scanpath&, const Scanpath&) = default;
};

/// Throws std::invalid_argument when start times are not strictly increasing,
/// fixations overlap, or a coordinate is not finite.
void validate(const Scanpath& s);

struct FixationDetectorParams {
    double maxdist = 25.0;  // px
    double mindur = 0.050;  // s

    friend bool operator==(const FixationDetectorParams&, const FixationDetectorParams&) = default;
};

struct GazeSample {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
};

/// Dispersion-from-anchor fixation detection. The first sample of a fixation
/// is its anchor; following samples within `maxdist` of the anchor join it and
/// the first one further away closes it and becomes the next anchor. A
/// fixation lasts from its anchor to its last member; shorter ones than
/// `mindur` are dropped. Positions are member centroids.
Scanpath detect_fixations(const std::vector<GazeSample>& samples, const FixationDetectorParams& p, Dims dims = {});

Scanpath scanpath_from_trajectory(const Trajectory& tr, const FixationDetectorParams& p);

enum class BaselineKind { Random, Center };

/// Synthetic scanpath: uniform over the image (Random) or Gaussian around the
/// center with sigma = sigma_scale * (w, h), clamped to the image (Center).
/// Fixations start every 0.3 s and last 0.25 s.
Scanpath baseline_scanpath(BaselineKind kind, int n_fix, Dims dims, std::uint64_t seed,
                           double sigma_scale = 1.0 / 6.0);

std::string to_string(BaselineKind kind);

/// Scanpath CSV: header `observer,t_start,duration,x,y`, six decimals.
void write_scanpath_csv(const std::filesystem::path& path, const Scanpath& s, const std::string& observer);

/// Reads a scanpath CSV. Rows are grouped by observer, in order of first appearance.
std::vector<std::pair<std::string, Scanpath>> read_scanpath_csv(const std::filesystem::path& path, Dims dims);

}  // namespace gazelab
