#include "gazelab/fields.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gazelab/image_io.hpp"

namespace gazelab {

double default_peripheral_sigma(Dims d) { return std::min(d.width, d.height) / 16.0; }

ScalarField to_brightness(const Image& img) {
    validate(img);
    ScalarField out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (img.channels == 1) {
                out.at(x, y) = img.at(x, y, 0);
            } else {
                const double v = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
                out.at(x, y) = std::clamp(v, 0.0, 1.0);
            }
        }
    }
    return out;
}

namespace {

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        k[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

// One-dimensional derivative along a line of n samples, central inside,
// one-sided at both ends.
template <typename Get>
double line_derivative(Get get, int i, int n) {
    if (n == 1) return 0.0;
    if (i == 0) return get(1) - get(0);
    if (i == n - 1) return get(n - 1) - get(n - 2);
    return 0.5 * (get(i + 1) - get(i - 1));
}

}  // namespace

ScalarField gaussian_blur(const ScalarField& f, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_blur: sigma must be positive");
    const std::vector<double> k = gaussian_kernel(sigma);
    const int radius = static_cast<int>(k.size() / 2);
    const int w = f.width();
    const int h = f.height();

    ScalarField tmp(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                acc += k[static_cast<std::size_t>(i + radius)] * f.at(std::clamp(x + i, 0, w - 1), y);
            }
            tmp.at(x, y) = acc;
        }
    }
    ScalarField out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                acc += k[static_cast<std::size_t>(i + radius)] * tmp.at(x, std::clamp(y + i, 0, h - 1));
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

VectorField field_gradient(const ScalarField& f) {
    const int w = f.width();
    const int h = f.height();
    VectorField g(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double dx = line_derivative([&](int i) { return f.at(i, y); }, x, w);
            const double dy = line_derivative([&](int j) { return f.at(x, j); }, y, h);
            g.at(x, y) = {dx, dy};
        }
    }
    return g;
}

ScalarField squared_gradient_magnitude(const ScalarField& f) {
    const VectorField g = field_gradient(f);
    ScalarField out(f.width(), f.height());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = dot(g[i], g[i]);
    return out;
}

namespace {

struct BilinearTap {
    int x0, y0, x1, y1;
    double fx, fy;
};

BilinearTap bilinear_tap(Dims d, Vec2 p) {
    // Non-finite coordinates would make the index cast undefined; callers
    // detect the bad state themselves, so any in-range tap will do.
    const double px = std::isfinite(p.x) ? std::clamp(p.x, 0.0, static_cast<double>(d.width - 1)) : 0.0;
    const double py = std::isfinite(p.y) ? std::clamp(p.y, 0.0, static_cast<double>(d.height - 1)) : 0.0;
    const int x0 = std::min(static_cast<int>(px), d.width - 1);
    const int y0 = std::min(static_cast<int>(py), d.height - 1);
    return {x0, y0, std::min(x0 + 1, d.width - 1), std::min(y0 + 1, d.height - 1), px - x0, py - y0};
}

template <typename T>
T interpolate(const Grid<T>& f, const BilinearTap& t) {
    const T top = (1.0 - t.fx) * f.at(t.x0, t.y0) + t.fx * f.at(t.x1, t.y0);
    const T bottom = (1.0 - t.fx) * f.at(t.x0, t.y1) + t.fx * f.at(t.x1, t.y1);
    return (1.0 - t.fy) * top + t.fy * bottom;
}

}  // namespace

double sample_bilinear(const ScalarField& f, Vec2 p) { return interpolate(f, bilinear_tap(f.dims(), p)); }

Vec2 sample_bilinear(const VectorField& f, Vec2 p) { return interpolate(f, bilinear_tap(f.dims(), p)); }

namespace {

double catmull_rom(double t) {
    constexpr double a = -0.5;
    t = std::abs(t);
    if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
    return 0.0;
}

// Resamples one axis; `src_len` samples mapped onto `dst_len` with aligned ends.
template <typename Get>
double cubic_at(Get get, int src_len, int dst_len, int i) {
    const double pos = dst_len > 1 ? static_cast<double>(i) * (src_len - 1) / (dst_len - 1) : 0.0;
    const int base = static_cast<int>(std::floor(pos));
    const double frac = pos - base;
    if (frac == 0.0) return get(std::clamp(base, 0, src_len - 1));
    double acc = 0.0;
    for (int k = -1; k <= 2; ++k) {
        acc += catmull_rom(frac - k) * get(std::clamp(base + k, 0, src_len - 1));
    }
    return acc;
}

}  // namespace

ScalarField resize_bicubic(const ScalarField& f, Dims target) {
    if (target.width <= 0 || target.height <= 0) throw std::invalid_argument("resize target must be non-empty");
    if (f.dims() == target) return f;
    const int sw = f.width();
    const int sh = f.height();
    ScalarField rows(target.width, sh);
    for (int y = 0; y < sh; ++y) {
        for (int x = 0; x < target.width; ++x) {
            rows.at(x, y) = cubic_at([&](int i) { return f.at(i, y); }, sw, target.width, x);
        }
    }
    ScalarField out(target);
    for (int y = 0; y < target.height; ++y) {
        for (int x = 0; x < target.width; ++x) {
            out.at(x, y) = cubic_at([&](int j) { return rows.at(x, j); }, sh, target.height, y);
        }
    }
    return out;
}

void minmax_normalize(ScalarField& f) {
    const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
    const double mn = *lo;
    const double range = *hi - mn;
    // Ranges at rounding-error scale (e.g. a resampled constant) count as constant.
    const double scale = std::max(std::abs(*lo), std::abs(*hi));
    if (!(range > 64.0 * std::numeric_limits<double>::epsilon() * scale)) {
        std::fill(f.begin(), f.end(), 0.0);
        return;
    }
    for (double& v : f) v = (v - mn) / range;
}

ScalarField load_topdown_map(const std::filesystem::path& path, Dims target) {
    const GrayRaster raw = read_gray16(path);
    ScalarField m(raw.width, raw.height);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<double>(raw.samples[i]) / raw.maxval;
    ScalarField resized = resize_bicubic(m, target);
    for (double& v : resized) v = std::clamp(v, 0.0, 1.0);
    minmax_normalize(resized);
    return resized;
}

FieldSet build_fieldset(const Image& img, std::optional<ScalarField> topdown, const FieldOptions& options) {
    FieldSet fs;
    fs.brightness = to_brightness(img);
    const double sigma = options.peripheral_sigma.value_or(default_peripheral_sigma(img.dims()));
    fs.peripheral = gaussian_blur(fs.brightness, sigma);
    fs.grad_sq_local = squared_gradient_magnitude(fs.brightness);
    fs.grad_sq_periph = squared_gradient_magnitude(fs.peripheral);
    fs.grad_local = field_gradient(fs.grad_sq_local);
    fs.grad_periph = field_gradient(fs.grad_sq_periph);
    if (topdown) {
        if (topdown->dims() != img.dims()) {
            throw std::invalid_argument("top-down map is " + to_string(topdown->dims()) + " but image is " +
                                        to_string(img.dims()));
        }
        for (double v : *topdown) {
            if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("top-down map values must lie in [0,1]");
        }
        fs.grad_topdown = field_gradient(*topdown);
        fs.topdown = std::move(topdown);
    }
    return fs;
}

FieldSet build_fieldset(const Image& img, const std::optional<std::filesystem::path>& topdown_path,
                        const FieldOptions& options) {
    std::optional<ScalarField> m;
    if (topdown_path) m = load_topdown_map(*topdown_path, img.dims());
    return build_fieldset(img, std::move(m), options);
}

}  // namespace gazelab
