#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gazelab/dynamics.hpp"
#include "gazelab/metrics.hpp"
#include "gazelab/scanpath.hpp"

namespace gazelab {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Pipeline { None, Blur, CenterBias, CenterBiasHistmatch };
enum class DepositMode { Occupancy, Fixations };
enum class SaliencySource { Trajectories, TopdownMap };

/// Everything a batch run needs. Parsed from a flat `key = value` file where
/// `#` starts a comment; `eta`, `lambda`, `gamma`, `peripheral_sigma` and
/// `map_blur_sigma` also accept `auto`.
struct RunConfig {
    EymolParams params;
    AutoScale autoscale;
    std::optional<double> peripheral_sigma;

    FixationDetectorParams detector;
    StringEditOptions string_edit;
    TdeVariant tde_variant = TdeVariant::Linear;

    SaliencySource saliency_source = SaliencySource::Trajectories;
    DepositMode deposit = DepositMode::Occupancy;
    Pipeline pipeline = Pipeline::Blur;
    std::optional<double> map_blur_sigma;
    std::string histmatch_target;
    bool heatmaps = false;

    int scanpath_runs = 10;
    int baseline_runs = 10;

    std::string out = "gazelab_out";
    int jobs = 1;

    /// gamma is either automatic or explicitly positive.
    bool wants_topdown() const { return autoscale.gamma || params.gamma > 0.0; }

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Sets one key. Throws ConfigError for unknown keys or unparsable values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::string& path);

/// Every key with its effective value; parse_config(serialize(c)) == c.
std::string serialize(const RunConfig& cfg);

/// Cross-field checks (parameter ranges, histogram-match target present).
void validate(const RunConfig& cfg);

std::string to_string(Pipeline p);

}  // namespace gazelab
