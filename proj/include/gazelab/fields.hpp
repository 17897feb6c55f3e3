#pragma once

#include <filesystem>
#include <optional>

#include "gazelab/raster.hpp"

namespace gazelab {

/// Precomputed scalar and gradient fields the dynamics samples at continuous
/// positions. Immutable once built; safe to share between concurrent runs.
struct FieldSet {
    ScalarField brightness;       // b
    ScalarField peripheral;       // p, blurred brightness
    ScalarField grad_sq_local;    // g_b = |grad b|^2
    ScalarField grad_sq_periph;   // g_p = |grad p|^2
    VectorField grad_local;       // grad g_b
    VectorField grad_periph;      // grad g_p
    std::optional<ScalarField> topdown;       // M in [0,1]
    std::optional<VectorField> grad_topdown;  // grad M

    /// Retina extent (l1, l2) = (width, height).
    Dims retina() const { return brightness.dims(); }
    bool has_topdown() const { return topdown.has_value(); }
};

struct FieldOptions {
    /// Peripheral blur scale in pixels. Unset means min(width, height) / 16.
    std::optional<double> peripheral_sigma;
};

double default_peripheral_sigma(Dims d);

/// Luma (0.299, 0.587, 0.114) for colour input, identity for gray.
ScalarField to_brightness(const Image& img);

/// Separable Gaussian, radius ceil(3 sigma), borders replicated.
ScalarField gaussian_blur(const ScalarField& f, double sigma);

/// Per-pixel squared central-difference gradient magnitude (one-sided at borders).
ScalarField squared_gradient_magnitude(const ScalarField& f);

/// Central-difference gradient (one-sided at borders).
VectorField field_gradient(const ScalarField& f);

/// Bilinear interpolation between pixel centers. Points outside
/// [0, w-1] x [0, h-1] are clamped to the border first.
double sample_bilinear(const ScalarField& f, Vec2 p);
Vec2 sample_bilinear(const VectorField& f, Vec2 p);

/// Catmull-Rom (a = -0.5) resize with corner-aligned sampling: output corners
/// coincide with input corners.
ScalarField resize_bicubic(const ScalarField& f, Dims target);

/// Loads a 16-bit top-down map, scales it to [0,1], resizes it to `target`
/// with bicubic interpolation, clamps the overshoot and min-max renormalizes.
/// A constant map becomes all zeros. Throws ImageIoError on bad input.
ScalarField load_topdown_map(const std::filesystem::path& path, Dims target);

/// Rescales values to [0,1]; constant input maps to all zeros.
void minmax_normalize(ScalarField& f);

FieldSet build_fieldset(const Image& img, const std::optional<std::filesystem::path>& topdown_path,
                        const FieldOptions& options = {});

/// Same as build_fieldset with an already-loaded top-down map (values in [0,1],
/// dimensions equal to the image).
FieldSet build_fieldset(const Image& img, std::optional<ScalarField> topdown, const FieldOptions& options = {});

}  // namespace gazelab
