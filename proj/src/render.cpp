#include "gazelab/render.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gazelab {

Color colormap(double v) {
    static constexpr std::array<Color, 9> kStops{{{68, 1, 84},
                                                  {71, 44, 123},
                                                  {59, 82, 139},
                                                  {44, 113, 142},
                                                  {33, 145, 140},
                                                  {39, 173, 129},
                                                  {92, 200, 99},
                                                  {170, 220, 50},
                                                  {253, 231, 37}}};
    const double pos = std::clamp(v, 0.0, 1.0) * (kStops.size() - 1);
    const std::size_t i = std::min(static_cast<std::size_t>(pos), kStops.size() - 2);
    const double f = pos - static_cast<double>(i);
    Color c{};
    for (std::size_t ch = 0; ch < 3; ++ch) {
        c[ch] = static_cast<std::uint8_t>(std::lround((1.0 - f) * kStops[i][ch] + f * kStops[i + 1][ch]));
    }
    return c;
}

Rgb8 heatmap_overlay(const SaliencyMap& s, const Image& img) {
    if (s.dims() != img.dims()) {
        throw std::invalid_argument("heatmap: map is " + to_string(s.dims()) + " but image is " + to_string(img.dims()));
    }
    Rgb8 out = to_rgb8(img);
    const double peak = *std::max_element(s.density.begin(), s.density.end());
    for (std::size_t i = 0; i < s.density.size(); ++i) {
        const double v = peak > 0.0 ? s.density[i] / peak : 0.0;
        const double alpha = 0.65 * v;
        const Color c = colormap(v);
        for (std::size_t ch = 0; ch < 3; ++ch) {
            std::uint8_t& px = out.pixels[3 * i + ch];
            px = static_cast<std::uint8_t>(std::lround((1.0 - alpha) * px + alpha * c[ch]));
        }
    }
    return out;
}

void render_heatmap(const SaliencyMap& s, const Image& img, const std::filesystem::path& out) {
    write_png(out, heatmap_overlay(s, img));
}

std::vector<Primitive> scanpath_primitives(const Scanpath& s, Color color) {
    std::vector<Primitive> prims;
    for (std::size_t i = 0; i < s.fixations.size(); ++i) {
        const Vec2 p = s.fixations[i].position();
        prims.push_back({i == 0 ? Primitive::Kind::StartSquare : Primitive::Kind::FixationDot, p, p, color});
        if (i > 0) prims.push_back({Primitive::Kind::Arrow, s.fixations[i - 1].position(), p, color});
    }
    return prims;
}

namespace {

void plot(Rgb8& c, int x, int y, Color col) {
    if (x < 0 || y < 0 || x >= c.width || y >= c.height) return;
    const std::size_t i = (static_cast<std::size_t>(y) * c.width + x) * 3;
    c.pixels[i] = col[0];
    c.pixels[i + 1] = col[1];
    c.pixels[i + 2] = col[2];
}

void line(Rgb8& c, Vec2 a, Vec2 b, Color col) {
    const double len = std::max(std::abs(b.x - a.x), std::abs(b.y - a.y));
    const int steps = std::max(1, static_cast<int>(std::ceil(len)));
    for (int i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        plot(c, static_cast<int>(std::lround(a.x + t * (b.x - a.x))), static_cast<int>(std::lround(a.y + t * (b.y - a.y))),
             col);
    }
}

void square(Rgb8& c, Vec2 p, int half, Color col) {
    const int cx = static_cast<int>(std::lround(p.x));
    const int cy = static_cast<int>(std::lround(p.y));
    for (int d = -half; d <= half; ++d) {
        plot(c, cx + d, cy - half, col);
        plot(c, cx + d, cy + half, col);
        plot(c, cx - half, cy + d, col);
        plot(c, cx + half, cy + d, col);
    }
}

void dot(Rgb8& c, Vec2 p, int r, Color col) {
    const int cx = static_cast<int>(std::lround(p.x));
    const int cy = static_cast<int>(std::lround(p.y));
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            if (dx * dx + dy * dy <= r * r) plot(c, cx + dx, cy + dy, col);
        }
    }
}

void arrow(Rgb8& c, Vec2 from, Vec2 to, Color col) {
    line(c, from, to, col);
    const Vec2 d = to - from;
    const double len = norm(d);
    if (len < 1e-9) return;
    const Vec2 u = (1.0 / len) * d;
    // Head sits at the midpoint so it stays visible next to the fixation dots.
    const Vec2 tip = from + 0.5 * d;
    const double head = std::min(6.0, 0.4 * len);
    constexpr double kSpread = 0.45;  // rad
    for (double sign : {-1.0, 1.0}) {
        const double cs = std::cos(sign * kSpread);
        const double sn = std::sin(sign * kSpread);
        const Vec2 back{-(u.x * cs - u.y * sn), -(u.x * sn + u.y * cs)};
        line(c, tip, tip + head * back, col);
    }
}

}  // namespace

void rasterize(Rgb8& canvas, const std::vector<Primitive>& primitives) {
    // Arrows first so markers stay on top.
    for (const Primitive& p : primitives) {
        if (p.kind == Primitive::Kind::Arrow) arrow(canvas, p.from, p.to, p.color);
    }
    for (const Primitive& p : primitives) {
        if (p.kind == Primitive::Kind::StartSquare) square(canvas, p.from, 4, p.color);
        if (p.kind == Primitive::Kind::FixationDot) dot(canvas, p.from, 2, p.color);
    }
}

Rgb8 scanpath_figure(const Image& img, const Scanpath& simulated, const Scanpath* human) {
    Rgb8 canvas = to_rgb8(img);
    for (auto& px : canvas.pixels) px = static_cast<std::uint8_t>(px / 2 + 40);
    if (human) rasterize(canvas, scanpath_primitives(*human, kHumanColor));
    rasterize(canvas, scanpath_primitives(simulated, kSimulatedColor));
    return canvas;
}

}  // namespace gazelab
