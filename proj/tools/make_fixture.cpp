// Writes the small synthetic dataset used by the tests:
//
//   blob   128x96 RGB PNG, bright Gaussian blob right of center, 3 observers,
//          fixmap, and a 16x12 top-down map peaked on the blob
//   bars   96x80 gray PPM grating patch on the left, 2 observers, fixmap
//   rings  80x80 gray PGM, no human data
//
// usage: make_fixture <dataset-dir>

#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "gazelab/fields.hpp"
#include "gazelab/image_io.hpp"
#include "gazelab/scanpath.hpp"

namespace fs = std::filesystem;
using namespace gazelab;

namespace {

double gauss2(double x, double y, double cx, double cy, double s) {
    return std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2.0 * s * s));
}

GrayRaster quantize16(const ScalarField& f) {
    ScalarField g = f;
    minmax_normalize(g);
    GrayRaster r{g.width(), g.height(), 65535, {}};
    for (double v : g) r.samples.push_back(static_cast<std::uint16_t>(std::lround(v * 65535.0)));
    return r;
}

/// Observer scanpath: fixations drawn around `targets` in turn.
Scanpath observer_path(std::mt19937_64& rng, Dims dims, const std::vector<Vec2>& targets, double spread) {
    std::normal_distribution<double> jitter(0.0, spread);
    std::uniform_real_distribution<double> dur(0.18, 0.32);
    Scanpath s{{}, dims};
    double t = 0.0;
    for (const Vec2& c : targets) {
        const double x = std::clamp(c.x + jitter(rng), 0.0, dims.width - 1.0);
        const double y = std::clamp(c.y + jitter(rng), 0.0, dims.height - 1.0);
        // Round like the CSV does so the checked-in files are the source of truth.
        const double d = std::round(dur(rng) * 1e3) / 1e3;
        s.fixations.push_back({t, d, std::round(x * 1e3) / 1e3, std::round(y * 1e3) / 1e3});
        t = std::round((t + d + 0.04) * 1e3) / 1e3;
    }
    return s;
}

ScalarField fixation_density(const std::vector<Scanpath>& paths, Dims dims, double sigma) {
    ScalarField f(dims);
    for (const Scanpath& s : paths) {
        for (const Fixation& fx : s.fixations) {
            const int x = std::clamp(static_cast<int>(std::floor(fx.x + 0.5)), 0, dims.width - 1);
            const int y = std::clamp(static_cast<int>(std::floor(fx.y + 0.5)), 0, dims.height - 1);
            f.at(x, y) += 1.0;
        }
    }
    return gaussian_blur(f, sigma);
}

void write_observers(const fs::path& dir, const std::vector<Scanpath>& paths) {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const std::string name = fmt::format("obs{:02d}", i + 1);
        write_scanpath_csv(dir / (name + ".csv"), paths[i], name);
    }
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_fixture <dataset-dir>\n";
        return 2;
    }
    const fs::path root = argv[1];
    for (const char* sub : {"stimuli", "scanpaths", "fixmaps", "cfmaps"}) fs::create_directories(root / sub);
    std::mt19937_64 rng(20240611);

    // blob
    const Dims bd{128, 96};
    const Vec2 blob_c{94.0, 40.0};
    Image blob = Image::blank(bd.width, bd.height, 3);
    for (int y = 0; y < bd.height; ++y) {
        for (int x = 0; x < bd.width; ++x) {
            const double g = gauss2(x, y, blob_c.x, blob_c.y, 12.0);
            blob.at(x, y, 0) = 0.2 + 0.75 * g;
            blob.at(x, y, 1) = 0.2 + 0.6 * g;
            blob.at(x, y, 2) = 0.25 + 0.3 * g;
        }
    }
    write_png(root / "stimuli" / "blob.png", to_rgb8(blob));
    std::vector<Scanpath> blob_obs;
    blob_obs.push_back(observer_path(rng, bd, {{64, 48}, {90, 42}, {96, 38}, {100, 45}, {70, 50}}, 4.0));
    blob_obs.push_back(observer_path(rng, bd, {{62, 46}, {85, 36}, {95, 41}, {92, 40}}, 4.0));
    blob_obs.push_back(observer_path(rng, bd, {{66, 50}, {78, 44}, {93, 39}, {98, 36}, {94, 44}, {60, 60}}, 4.0));
    write_observers(root / "scanpaths" / "blob", blob_obs);
    write_pgm16(root / "fixmaps" / "blob.pgm", quantize16(fixation_density(blob_obs, bd, 4.0)));
    ScalarField cf(16, 12);
    for (int y = 0; y < 12; ++y) {
        for (int x = 0; x < 16; ++x) cf.at(x, y) = gauss2(x, y, blob_c.x * 15.0 / 127.0, blob_c.y * 11.0 / 95.0, 1.8);
    }
    write_pgm16(root / "cfmaps" / "blob.pgm", quantize16(cf));

    // bars
    const Dims gd{96, 80};
    Image bars = Image::blank(gd.width, gd.height, 3);
    for (int y = 0; y < gd.height; ++y) {
        for (int x = 0; x < gd.width; ++x) {
            const double w = gauss2(x, y, 28.0, 40.0, 14.0);
            const double v = 0.5 + 0.45 * w * std::sin(2.0 * M_PI * x / 8.0);
            for (int c = 0; c < 3; ++c) bars.at(x, y, c) = v;
        }
    }
    write_ppm8(root / "stimuli" / "bars.ppm", bars);
    std::vector<Scanpath> bars_obs;
    bars_obs.push_back(observer_path(rng, gd, {{48, 40}, {30, 38}, {24, 44}, {32, 30}}, 3.0));
    bars_obs.push_back(observer_path(rng, gd, {{46, 42}, {28, 42}, {20, 36}, {34, 48}, {50, 40}}, 3.0));
    write_observers(root / "scanpaths" / "bars", bars_obs);
    write_pgm16(root / "fixmaps" / "bars.pgm", quantize16(fixation_density(bars_obs, gd, 4.0)));

    // rings
    const Dims rd{80, 80};
    Image rings = Image::blank(rd.width, rd.height, 1);
    for (int y = 0; y < rd.height; ++y) {
        for (int x = 0; x < rd.width; ++x) {
            const double r = std::hypot(x - 39.5, y - 39.5);
            rings.at(x, y, 0) = 0.5 + 0.4 * std::cos(r / 3.0) * std::exp(-r / 30.0);
        }
    }
    write_pgm8(root / "stimuli" / "rings.pgm", rings);

    std::ofstream cfg(root / "config.txt");
    cfg << "# Small, fast settings for the synthetic fixture.\n"
           "n_runs = 24\n"
           "duration = 0.6\n"
           "scanpath_runs = 4\n"
           "baseline_runs = 4\n"
           "seed = 7\n"
           "pipeline = blur\n";
    std::cout << "fixture written to " << root.string() << '\n';
    return 0;
}
