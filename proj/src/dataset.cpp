#include "gazelab/dataset.hpp"

#include <fnmatch.h>
#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "gazelab/image_io.hpp"

namespace gazelab {

namespace fs = std::filesystem;

namespace {

bool is_stimulus_ext(std::string ext) {
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".pgm" || ext == ".ppm";
}

std::vector<fs::path> sorted_entries(const fs::path& dir) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

DatasetLayout scan_dataset(const fs::path& root) {
    const fs::path stimuli_dir = root / "stimuli";
    if (!fs::is_directory(stimuli_dir)) throw std::runtime_error("dataset has no stimuli/ directory: " + root.string());

    DatasetLayout d;
    d.root = root;
    std::map<std::string, Stimulus> by_stem;
    for (const fs::path& p : sorted_entries(stimuli_dir)) {
        if (!fs::is_regular_file(p) || !is_stimulus_ext(p.extension().string())) continue;
        const std::string stem = p.stem().string();
        if (by_stem.count(stem)) throw std::runtime_error("duplicate stimulus stem '" + stem + "'");
        by_stem[stem] = Stimulus{stem, p, std::nullopt, std::nullopt, {}};
    }

    for (const fs::path& p : sorted_entries(root / "scanpaths")) {
        const bool dir = fs::is_directory(p);
        const std::string stem = dir ? p.filename().string() : p.stem().string();
        if (!dir && p.extension() != ".csv") continue;
        auto it = by_stem.find(stem);
        if (it == by_stem.end()) {
            d.orphans.push_back("scanpaths/" + p.filename().string());
            continue;
        }
        if (dir) {
            for (const fs::path& f : sorted_entries(p)) {
                if (f.extension() == ".csv") it->second.scanpath_files.push_back(f);
            }
        } else {
            it->second.scanpath_files.push_back(p);
        }
    }

    auto attach = [&](const char* sub, std::optional<fs::path> Stimulus::*member) {
        for (const fs::path& p : sorted_entries(root / sub)) {
            const std::string ext = p.extension().string();
            if (ext != ".pgm" && ext != ".png") continue;
            auto it = by_stem.find(p.stem().string());
            if (it == by_stem.end()) {
                d.orphans.push_back(std::string(sub) + "/" + p.filename().string());
                continue;
            }
            it->second.*member = p;
        }
    };
    attach("fixmaps", &Stimulus::fixmap);
    attach("cfmaps", &Stimulus::cfmap);
    d.has_cfmaps_dir = fs::is_directory(root / "cfmaps");

    for (auto& [stem, s] : by_stem) d.stimuli.push_back(std::move(s));
    return d;
}

std::vector<const Stimulus*> select_stimuli(const DatasetLayout& d, const std::string& glob) {
    std::vector<const Stimulus*> out;
    for (const Stimulus& s : d.stimuli) {
        if (glob.empty() || fnmatch(glob.c_str(), s.stem.c_str(), 0) == 0) out.push_back(&s);
    }
    return out;
}

ObserverScanpaths load_human_scanpaths(const Stimulus& s, Dims dims) {
    ObserverScanpaths out;
    for (const fs::path& f : s.scanpath_files) {
        auto groups = read_scanpath_csv(f, dims);
        const bool per_observer_file = f.parent_path().filename() == s.stem;
        if (per_observer_file && groups.size() == 1) groups.front().first = f.stem().string();
        for (auto& g : groups) out.push_back(std::move(g));
    }
    return out;
}

std::vector<std::string> validate_dataset(const DatasetLayout& d) {
    std::vector<std::string> problems;
    for (const auto& o : d.orphans) problems.push_back(o + ": names no stimulus");
    for (const Stimulus& s : d.stimuli) {
        Dims dims;
        try {
            const Image img = read_image(s.image);
            validate(img);
            dims = img.dims();
        } catch (const std::exception& e) {
            problems.push_back(s.stem + ": " + e.what());
            continue;
        }
        ObserverScanpaths humans;
        try {
            humans = load_human_scanpaths(s, dims);
        } catch (const std::exception& e) {
            problems.push_back(s.stem + ": " + e.what());
            continue;
        }
        for (const auto& [observer, path] : humans) {
            const std::string where = fmt::format("{}/{}", s.stem, observer);
            if (path.empty()) problems.push_back(where + ": empty scanpath");
            try {
                validate(path);
            } catch (const std::exception& e) {
                problems.push_back(where + ": " + e.what());
            }
            for (const Fixation& f : path.fixations) {
                if (f.x < 0.0 || f.y < 0.0 || f.x > dims.width || f.y > dims.height) {
                    problems.push_back(fmt::format("{}: fixation ({}, {}) outside the {} image", where, f.x, f.y,
                                                   to_string(dims)));
                    break;
                }
            }
        }
    }
    return problems;
}

}  // namespace gazelab
