#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "gazelab/image_io.hpp"
#include "gazelab/raster.hpp"
#include "gazelab/saliency.hpp"
#include "gazelab/scanpath.hpp"

namespace gazelab {

using Color = std::array<std::uint8_t, 3>;

inline constexpr Color kSimulatedColor{220, 30, 30};
inline constexpr Color kHumanColor{30, 200, 60};

/// Viridis-like perceptual colormap, v in [0,1].
Color colormap(double v);

/// Stimulus with the map alpha-blended on top (opacity grows with density).
Rgb8 heatmap_overlay(const SaliencyMap& s, const Image& img);
void render_heatmap(const SaliencyMap& s, const Image& img, const std::filesystem::path& out);

struct Primitive {
    enum class Kind { StartSquare, FixationDot, Arrow };
    Kind kind;
    Vec2 from;
    Vec2 to;  // arrows only
    Color color;
};

/// Drawing commands for one scanpath: a square on the first fixation, a dot on
/// every later one and an arrow per saccade.
std::vector<Primitive> scanpath_primitives(const Scanpath& s, Color color);

void rasterize(Rgb8& canvas, const std::vector<Primitive>& primitives);

/// Simulated scanpath in red, human in green, over the dimmed stimulus.
Rgb8 scanpath_figure(const Image& img, const Scanpath& simulated, const Scanpath* human);

}  // namespace gazelab
