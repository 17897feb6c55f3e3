#pragma once

#include <filesystem>
#include <vector>

#include "gazelab/dynamics.hpp"
#include "gazelab/raster.hpp"
#include "gazelab/scanpath.hpp"

namespace gazelab {

/// Nonnegative density over image pixels that sums to one.
struct SaliencyMap {
    ScalarField density;

    Dims dims() const { return density.dims(); }
    int width() const { return density.width(); }
    int height() const { return density.height(); }
};

/// Pixel whose center is nearest to p, or false when p falls off the image.
bool pixel_of(Vec2 p, Dims dims, int& px, int& py);

/// Unnormalised time-weighted occupancy: every sample inside the image adds dt
/// to its pixel. Returns the number of samples that landed.
std::size_t deposit(const Trajectory& tr, ScalarField& occupancy);

/// Divides by the total. Throws std::domain_error when the total is not positive.
SaliencyMap normalize(ScalarField raw);

/// Time-weighted occupancy of all trajectories, normalised. Throws when no
/// sample lies inside the image.
SaliencyMap accumulate(const std::vector<Trajectory>& trajectories, Dims dims);

/// One unit of mass per fixation centroid.
SaliencyMap accumulate_fixations(const std::vector<Scanpath>& scanpaths, Dims dims);

double default_map_blur_sigma(Dims d);

/// Gaussian blur followed by renormalisation.
SaliencyMap blur_map(const SaliencyMap& s, double sigma);

/// Product with an isotropic-per-axis Gaussian prior centred on the image
/// (sigma = w/4, h/4), renormalised.
SaliencyMap center_bias(const SaliencyMap& s);

/// Monotone histogram specification onto `target`'s value distribution. Pixels
/// keep their rank order; a run of tied input values receives the mean of the
/// target values spanning its ranks, so constant input stays constant.
SaliencyMap histogram_match(const SaliencyMap& s, const SaliencyMap& target);

/// 16-bit PGM after min-max scaling plus a `<path>.scale` sidecar holding the
/// offset and range needed to recover the densities.
void write_saliency_map(const std::filesystem::path& path, const SaliencyMap& s);
SaliencyMap read_saliency_map(const std::filesystem::path& path);

/// Reads any 16-bit map (human fixation map, histogram target) as a density.
SaliencyMap read_density_pgm(const std::filesystem::path& path);

}  // namespace gazelab
