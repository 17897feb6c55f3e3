#include "gazelab/config.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <sstream>

namespace gazelab {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
    throw ConfigError(fmt::format("invalid value '{}' for '{}': expected {}", value, key, expected));
}

double to_double(std::string_view key, std::string_view value) {
    double v = 0.0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc() || ptr != end) bad_value(key, value, "a number");
    return v;
}

template <typename Int>
Int to_integer(std::string_view key, std::string_view value) {
    Int v{};
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc() || ptr != end) bad_value(key, value, "an integer");
    return v;
}

bool to_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    bad_value(key, value, "true or false");
}

// Sets `target` and clears the auto flag, or raises the flag on "auto".
void auto_or_number(std::string_view key, std::string_view value, double& target, bool& is_auto) {
    if (value == "auto") {
        target = 0.0;
        is_auto = true;
        return;
    }
    target = to_double(key, value);
    is_auto = false;
}

void optional_number(std::string_view key, std::string_view value, std::optional<double>& target) {
    if (value == "auto") {
        target.reset();
    } else {
        target = to_double(key, value);
    }
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string auto_or(bool is_auto, double v) { return is_auto ? "auto" : num(v); }

std::string opt_or_auto(const std::optional<double>& v) { return v ? num(*v) : "auto"; }

}  // namespace

std::string to_string(Pipeline p) {
    switch (p) {
        case Pipeline::None: return "none";
        case Pipeline::Blur: return "blur";
        case Pipeline::CenterBias: return "center_bias";
        case Pipeline::CenterBiasHistmatch: return "center_bias+histmatch";
    }
    return "none";
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    auto& p = c.params;
    if (key == "mass") p.mass = to_double(key, value);
    else if (key == "elastic") p.elastic = to_double(key, value);
    else if (key == "eta") auto_or_number(key, value, p.eta, c.autoscale.eta);
    else if (key == "lambda") auto_or_number(key, value, p.lambda, c.autoscale.lambda);
    else if (key == "gamma") auto_or_number(key, value, p.gamma, c.autoscale.gamma);
    else if (key == "omega") p.omega = to_double(key, value);
    else if (key == "dt") p.dt = to_double(key, value);
    else if (key == "duration") p.duration = to_double(key, value);
    else if (key == "init_pos_sigma") p.init_pos_sigma = to_double(key, value);
    else if (key == "init_vel_sigma") p.init_vel_sigma = to_double(key, value);
    else if (key == "n_runs") p.n_runs = to_integer<int>(key, value);
    else if (key == "seed") p.seed = to_integer<std::uint64_t>(key, value);
    else if (key == "target_accel") c.autoscale.target_accel = to_double(key, value);
    else if (key == "lambda_frac") c.autoscale.lambda_frac = to_double(key, value);
    else if (key == "peripheral_sigma") optional_number(key, value, c.peripheral_sigma);
    else if (key == "maxdist") c.detector.maxdist = to_double(key, value);
    else if (key == "mindur") c.detector.mindur = to_double(key, value);
    else if (key == "n_grid") c.string_edit.n_grid = to_integer<int>(key, value);
    else if (key == "collapse_repeats") c.string_edit.collapse_repeats = to_bool(key, value);
    else if (key == "tde_variant") {
        if (value == "linear") c.tde_variant = TdeVariant::Linear;
        else if (value == "exp") c.tde_variant = TdeVariant::Exponential;
        else bad_value(key, value, "linear or exp");
    } else if (key == "saliency_source") {
        if (value == "trajectories") c.saliency_source = SaliencySource::Trajectories;
        else if (value == "cfmap") c.saliency_source = SaliencySource::TopdownMap;
        else bad_value(key, value, "trajectories or cfmap");
    } else if (key == "deposit") {
        if (value == "occupancy") c.deposit = DepositMode::Occupancy;
        else if (value == "fixations") c.deposit = DepositMode::Fixations;
        else bad_value(key, value, "occupancy or fixations");
    } else if (key == "pipeline") {
        if (value == "none") c.pipeline = Pipeline::None;
        else if (value == "blur") c.pipeline = Pipeline::Blur;
        else if (value == "center_bias") c.pipeline = Pipeline::CenterBias;
        else if (value == "center_bias+histmatch") c.pipeline = Pipeline::CenterBiasHistmatch;
        else bad_value(key, value, "none, blur, center_bias or center_bias+histmatch");
    } else if (key == "map_blur_sigma") optional_number(key, value, c.map_blur_sigma);
    else if (key == "histmatch_target") c.histmatch_target = std::string(value);
    else if (key == "heatmaps") c.heatmaps = to_bool(key, value);
    else if (key == "scanpath_runs") c.scanpath_runs = to_integer<int>(key, value);
    else if (key == "baseline_runs") c.baseline_runs = to_integer<int>(key, value);
    else if (key == "out") c.out = std::string(value);
    else if (key == "jobs") c.jobs = to_integer<int>(key, value);
    else throw ConfigError(fmt::format("unknown configuration key '{}'", key));
}

RunConfig parse_config(std::string_view text, RunConfig base) {
    std::size_t lineno = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(fmt::format("line {}: expected key = value", lineno));
        try {
            apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("line {}: {}", lineno, e.what()));
        }
    }
    return base;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string serialize(const RunConfig& c) {
    const auto& p = c.params;
    std::string out;
    auto put = [&](std::string_view k, const std::string& v) { out += fmt::format("{} = {}\n", k, v); };
    put("mass", num(p.mass));
    put("elastic", num(p.elastic));
    put("eta", auto_or(c.autoscale.eta, p.eta));
    put("lambda", auto_or(c.autoscale.lambda, p.lambda));
    put("gamma", auto_or(c.autoscale.gamma, p.gamma));
    put("omega", num(p.omega));
    put("dt", num(p.dt));
    put("duration", num(p.duration));
    put("init_pos_sigma", num(p.init_pos_sigma));
    put("init_vel_sigma", num(p.init_vel_sigma));
    put("n_runs", std::to_string(p.n_runs));
    put("seed", std::to_string(p.seed));
    put("target_accel", num(c.autoscale.target_accel));
    put("lambda_frac", num(c.autoscale.lambda_frac));
    put("peripheral_sigma", opt_or_auto(c.peripheral_sigma));
    put("maxdist", num(c.detector.maxdist));
    put("mindur", num(c.detector.mindur));
    put("n_grid", std::to_string(c.string_edit.n_grid));
    put("collapse_repeats", c.string_edit.collapse_repeats ? "true" : "false");
    put("tde_variant", c.tde_variant == TdeVariant::Linear ? "linear" : "exp");
    put("saliency_source", c.saliency_source == SaliencySource::Trajectories ? "trajectories" : "cfmap");
    put("deposit", c.deposit == DepositMode::Occupancy ? "occupancy" : "fixations");
    put("pipeline", to_string(c.pipeline));
    put("map_blur_sigma", opt_or_auto(c.map_blur_sigma));
    put("histmatch_target", c.histmatch_target);
    put("heatmaps", c.heatmaps ? "true" : "false");
    put("scanpath_runs", std::to_string(c.scanpath_runs));
    put("baseline_runs", std::to_string(c.baseline_runs));
    put("out", c.out);
    put("jobs", std::to_string(c.jobs));
    return out;
}

void validate(const RunConfig& c) {
    try {
        EymolParams p = c.params;
        // Automatic weights are resolved per image; check the rest now.
        if (c.autoscale.eta) p.eta = 0.0;
        if (c.autoscale.lambda) p.lambda = 0.0;
        if (c.autoscale.gamma) p.gamma = 0.0;
        validate(p);
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    if (!(c.autoscale.target_accel > 0.0)) throw ConfigError("target_accel must be positive");
    if (!(c.autoscale.lambda_frac >= 0.0 && c.autoscale.lambda_frac <= 1.0)) {
        throw ConfigError("lambda_frac must lie in [0,1]");
    }
    if (c.peripheral_sigma && !(*c.peripheral_sigma > 0.0)) throw ConfigError("peripheral_sigma must be positive");
    if (c.map_blur_sigma && !(*c.map_blur_sigma > 0.0)) throw ConfigError("map_blur_sigma must be positive");
    if (!(c.detector.maxdist > 0.0) || !(c.detector.mindur > 0.0)) {
        throw ConfigError("maxdist and mindur must be positive");
    }
    if (c.string_edit.n_grid < 2) throw ConfigError("n_grid must be at least 2");
    if (c.pipeline == Pipeline::CenterBiasHistmatch && c.histmatch_target.empty()) {
        throw ConfigError("pipeline center_bias+histmatch needs histmatch_target");
    }
    if (c.scanpath_runs < 1 || c.baseline_runs < 1) throw ConfigError("scanpath_runs and baseline_runs must be >= 1");
    if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
    if (c.out.empty()) throw ConfigError("out must not be empty");
}

}  // namespace gazelab
