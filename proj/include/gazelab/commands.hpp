#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gazelab/config.hpp"
#include "gazelab/dataset.hpp"
#include "gazelab/dynamics.hpp"
#include "gazelab/fields.hpp"
#include "gazelab/metrics.hpp"
#include "gazelab/saliency.hpp"

namespace gazelab {

struct CommandOptions {
    RunConfig config;
    std::filesystem::path dataset;
    std::string filter;  // shell glob over stimulus stems
    bool json = false;
};

/// Exit codes of the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPartialFailure = 1;
inline constexpr int kExitBadConfig = 2;

/// Output locations below the configured `out` directory.
struct OutputLayout {
    std::filesystem::path root;

    std::filesystem::path trajectory(const std::string& stem, int run) const;
    std::filesystem::path scanpath(const std::string& stem, int run) const;
    std::filesystem::path scanpath_dir(const std::string& stem) const;
    std::filesystem::path params(const std::string& stem) const;
    std::filesystem::path saliency(const std::string& stem) const;
    std::filesystem::path heatmap(const std::string& stem) const;
    std::filesystem::path report(const std::string& ext) const;
    std::filesystem::path render(const std::string& stem, int run, const std::optional<std::string>& observer) const;
    std::filesystem::path effective_config() const;
};

/// Stimulus loaded, fields built and parameters resolved for one image.
struct PreparedImage {
    Image image;
    FieldSet fields;
    EymolParams params;
};

/// Builds the fields (with the top-down map when wanted and available),
/// auto-scales the weights and checks the stability bound.
PreparedImage prepare_image(const Stimulus& s, const RunConfig& cfg, std::ostream& log);

/// Name of the simulated model in reports: CF-EYMOL when top-down maps are in play.
std::string model_name(const RunConfig& cfg, const DatasetLayout& d);

/// Applies the configured map optimisation. `target` is required for histogram matching.
SaliencyMap apply_pipeline(const SaliencyMap& raw, const RunConfig& cfg, const SaliencyMap* target);

/// Loads a 16-bit density map and resamples it to `dims`.
SaliencyMap load_histmatch_target(const std::filesystem::path& path, Dims dims);

/// Raw (pre-pipeline) saliency of one image from its simulated runs.
SaliencyMap raw_saliency(const PreparedImage& img, const RunConfig& cfg, const std::vector<Trajectory>& runs);

/// Scanpath scores of one image: every simulated scanpath against every
/// human observer. Empty scanpaths are skipped.
void score_scanpaths(ImageScores& out, const std::vector<Scanpath>& simulated, const ObserverScanpaths& humans,
                     const RunConfig& cfg, Dims dims);

/// Random and Center baseline scanpaths for one image, sized like the mean
/// human scanpath.
std::vector<Scanpath> baseline_scanpaths(BaselineKind kind, const std::string& stem, const ObserverScanpaths& humans,
                                         const RunConfig& cfg, Dims dims);

int cmd_simulate(const CommandOptions& opt, std::ostream& log);
int cmd_saliency(const CommandOptions& opt, std::ostream& log);
int cmd_evaluate(const CommandOptions& opt, std::ostream& out, std::ostream& log);

struct RenderRequest {
    std::string image;
    int run = 0;
    std::optional<std::string> observer;
};

int cmd_render(const CommandOptions& opt, const RenderRequest& req, std::ostream& log);

/// Checks the dataset layout and every human scanpath.
int cmd_validate(const CommandOptions& opt, std::ostream& out);

}  // namespace gazelab
