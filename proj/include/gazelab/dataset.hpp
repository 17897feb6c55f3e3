#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gazelab/raster.hpp"
#include "gazelab/scanpath.hpp"

namespace gazelab {

/// One stimulus and the files associated with it by stem.
struct Stimulus {
    std::string stem;
    std::filesystem::path image;
    std::optional<std::filesystem::path> fixmap;
    std::optional<std::filesystem::path> cfmap;
    /// `scanpaths/<stem>/*.csv` (one observer each) or `scanpaths/<stem>.csv`.
    std::vector<std::filesystem::path> scanpath_files;
};

/// Normalised dataset directory:
///
///   stimuli/   images (png, jpg, jpeg, pgm, ppm)
///   scanpaths/ per-image, per-observer scanpath CSVs
///   fixmaps/   16-bit human fixation density maps (optional)
///   cfmaps/    16-bit top-down maps (optional)
struct DatasetLayout {
    std::filesystem::path root;
    std::vector<Stimulus> stimuli;  // sorted by stem
    bool has_cfmaps_dir = false;
    /// Entries under scanpaths/, fixmaps/ or cfmaps/ naming no stimulus.
    std::vector<std::string> orphans;
};

/// Throws std::runtime_error when `root/stimuli` is missing.
DatasetLayout scan_dataset(const std::filesystem::path& root);

/// Stimuli whose stem matches the shell glob (all when the glob is empty).
std::vector<const Stimulus*> select_stimuli(const DatasetLayout& d, const std::string& glob);

using ObserverScanpaths = std::vector<std::pair<std::string, Scanpath>>;

/// All observers of one stimulus, in file-name order. Observers taken from a
/// per-observer file are named after the file stem.
ObserverScanpaths load_human_scanpaths(const Stimulus& s, Dims dims);

/// Checks layout invariants plus every scanpath against the Scanpath rules
/// and the stimulus bounds. Returns one message per problem.
std::vector<std::string> validate_dataset(const DatasetLayout& d);

}  // namespace gazelab
