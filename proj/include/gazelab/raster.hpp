#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gazelab {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
    constexpr Vec2& operator+=(Vec2 o) {
        x += o.x;
        y += o.y;
        return *this;
    }
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline bool is_finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

/// Image dimensions in pixels. Pixel (i, j) has its center at continuous
/// coordinate (i, j); x grows to the right, y grows downward.
struct Dims {
    int width = 0;
    int height = 0;

    std::size_t area() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
    friend bool operator==(Dims, Dims) = default;
};

inline std::string to_string(Dims d) { return std::to_string(d.width) + "x" + std::to_string(d.height); }

/// Row-major grid of values, one per pixel center.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, T fill = T{}) : dims_{width, height} {
        if (width <= 0 || height <= 0) {
            throw std::invalid_argument("grid dimensions must be positive, got " + to_string(dims_));
        }
        values_.assign(dims_.area(), fill);
    }
    explicit Grid(Dims d, T fill = T{}) : Grid(d.width, d.height, fill) {}

    int width() const { return dims_.width; }
    int height() const { return dims_.height; }
    Dims dims() const { return dims_; }
    std::size_t size() const { return values_.size(); }

    T& at(int x, int y) { return values_[index(x, y)]; }
    const T& at(int x, int y) const { return values_[index(x, y)]; }
    T& operator[](std::size_t i) { return values_[i]; }
    const T& operator[](std::size_t i) const { return values_[i]; }

    std::vector<T>& values() { return values_; }
    const std::vector<T>& values() const { return values_; }

    auto begin() { return values_.begin(); }
    auto end() { return values_.end(); }
    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(dims_.width) + static_cast<std::size_t>(x);
    }

    Dims dims_{};
    std::vector<T> values_;
};

using ScalarField = Grid<double>;
using VectorField = Grid<Vec2>;

/// Stimulus image with intensities in [0,1], interleaved channels.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<double> data;

    Dims dims() const { return {width, height}; }
    double at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    static Image blank(int width, int height, int channels, double fill = 0.0) {
        Image img{width, height, channels, {}};
        img.data.assign(static_cast<std::size_t>(width) * height * channels, fill);
        return img;
    }
};

/// Throws std::invalid_argument unless the image is at least 8x8, has 1 or 3
/// channels and every intensity lies in [0,1].
void validate(const Image& img);

}  // namespace gazelab
