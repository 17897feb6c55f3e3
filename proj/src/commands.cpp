#include "gazelab/commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>

#include "gazelab/image_io.hpp"
#include "gazelab/parallel.hpp"
#include "gazelab/render.hpp"
#include "gazelab/seeding.hpp"

namespace gazelab {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Output layout

fs::path OutputLayout::trajectory(const std::string& stem, int run) const {
    return root / "trajectories" / stem / fmt::format("run_{:03d}.csv", run);
}
fs::path OutputLayout::scanpath_dir(const std::string& stem) const { return root / "scanpaths" / stem; }
fs::path OutputLayout::scanpath(const std::string& stem, int run) const {
    return scanpath_dir(stem) / fmt::format("run_{:03d}.csv", run);
}
fs::path OutputLayout::params(const std::string& stem) const { return root / "params" / (stem + ".txt"); }
fs::path OutputLayout::saliency(const std::string& stem) const { return root / "saliency" / (stem + ".pgm"); }
fs::path OutputLayout::heatmap(const std::string& stem) const { return root / "heatmaps" / (stem + ".png"); }
fs::path OutputLayout::report(const std::string& ext) const { return root / "report" / ("report." + ext); }
fs::path OutputLayout::render(const std::string& stem, int run, const std::optional<std::string>& observer) const {
    std::string name = fmt::format("{}_run_{:03d}", stem, run);
    if (observer) name += "_" + *observer;
    return root / "render" / (name + ".png");
}
fs::path OutputLayout::effective_config() const { return root / "effective_config.txt"; }

namespace {

std::string run_name(int run) { return fmt::format("run_{:03d}", run); }

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

/// Serialises log lines from worker threads.
class Log {
public:
    explicit Log(std::ostream& os) : os_(os) {}
    void line(const std::string& s) {
        std::lock_guard lock(m_);
        os_ << s << '\n';
    }

private:
    std::ostream& os_;
    std::mutex m_;
};

std::string params_text(const EymolParams& p) {
    return fmt::format(
        "mass = {:.17g}\nelastic = {:.17g}\neta = {:.17g}\nlambda = {:.17g}\ngamma = {:.17g}\nomega = {:.17g}\n"
        "dt = {:.17g}\nduration = {:.17g}\ninit_pos_sigma = {:.17g}\ninit_vel_sigma = {:.17g}\nn_runs = {}\n"
        "seed = {}\n",
        p.mass, p.elastic, p.eta, p.lambda, p.gamma, p.omega, p.dt, p.duration, p.init_pos_sigma, p.init_vel_sigma,
        p.n_runs, p.seed);
}

struct Batch {
    DatasetLayout layout;
    std::vector<const Stimulus*> selected;
    OutputLayout out;
};

Batch open_batch(const CommandOptions& opt) {
    validate(opt.config);
    Batch b{scan_dataset(opt.dataset), {}, OutputLayout{opt.config.out}};
    b.selected = select_stimuli(b.layout, opt.filter);
    if (b.selected.empty()) {
        throw std::runtime_error(opt.filter.empty() ? "no stimuli matched: dataset has no stimuli"
                                                    : "no stimuli matched filter '" + opt.filter + "'");
    }
    fs::create_directories(b.out.root);
    write_text(b.out.effective_config(), serialize(opt.config));
    return b;
}

/// Splits the worker budget between images and runs within an image.
std::pair<int, int> split_jobs(int jobs, std::size_t images) {
    const int outer = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(jobs), images));
    return {std::max(outer, 1), std::max(jobs / std::max(outer, 1), 1)};
}

/// Runs `fn` over every selected stimulus, logging and counting failures.
template <typename Fn>
int for_each_image(const Batch& b, int jobs, Log& log, Fn&& fn) {
    const auto [outer, inner] = split_jobs(jobs, b.selected.size());
    std::vector<char> failed(b.selected.size(), 0);
    parallel_for(b.selected.size(), outer, [&](std::size_t i) {
        const Stimulus& s = *b.selected[i];
        try {
            fn(s, inner, i);
        } catch (const std::exception& e) {
            failed[i] = 1;
            log.line(fmt::format("error: {}: {}", s.stem, e.what()));
        }
    });
    const auto n_failed = std::count(failed.begin(), failed.end(), 1);
    if (n_failed > 0) {
        log.line(fmt::format("{} of {} images failed", n_failed, b.selected.size()));
        return kExitPartialFailure;
    }
    return kExitOk;
}

int simulated_count(const RunConfig& cfg) { return std::max(cfg.params.n_runs, cfg.scanpath_runs); }

std::vector<Trajectory> run_all(const PreparedImage& img, const RunConfig& cfg, int jobs) {
    EymolParams p = img.params;
    p.n_runs = simulated_count(cfg);
    return simulate_runs(img.fields, p, jobs);
}

SaliencyMap finished_saliency(const PreparedImage& img, const RunConfig& cfg, const std::vector<Trajectory>& runs) {
    const SaliencyMap raw = raw_saliency(img, cfg, runs);
    if (cfg.pipeline != Pipeline::CenterBiasHistmatch) return apply_pipeline(raw, cfg, nullptr);
    const SaliencyMap target = load_histmatch_target(cfg.histmatch_target, raw.dims());
    return apply_pipeline(raw, cfg, &target);
}

}  // namespace

// ---------------------------------------------------------------------------
// Building blocks

PreparedImage prepare_image(const Stimulus& s, const RunConfig& cfg, std::ostream& log) {
    PreparedImage out;
    out.image = read_image(s.image);
    validate(out.image);

    std::optional<fs::path> topdown;
    if (cfg.wants_topdown()) {
        if (s.cfmap) {
            topdown = s.cfmap;
        } else if (!cfg.autoscale.gamma || cfg.saliency_source == SaliencySource::TopdownMap) {
            log << fmt::format("warning: {}: no top-down map; running without the top-down term\n", s.stem);
        }
    }
    out.fields = build_fieldset(out.image, topdown, FieldOptions{cfg.peripheral_sigma});

    EymolParams p = cfg.params;
    p.seed = derive_seed(cfg.params.seed, stable_hash(s.stem));
    p = auto_scale(p, out.fields, cfg.autoscale);
    if (!out.fields.has_topdown()) p.gamma = 0.0;
    validate(p);
    const double gmax = *std::max_element(out.fields.grad_sq_local.begin(), out.fields.grad_sq_local.end());
    check_stability(p, gmax);
    out.params = p;
    return out;
}

std::string model_name(const RunConfig& cfg, const DatasetLayout& d) {
    return cfg.wants_topdown() && d.has_cfmaps_dir ? "CF-EYMOL" : "EYMOL";
}

SaliencyMap apply_pipeline(const SaliencyMap& raw, const RunConfig& cfg, const SaliencyMap* target) {
    const double sigma = cfg.map_blur_sigma.value_or(default_map_blur_sigma(raw.dims()));
    switch (cfg.pipeline) {
        case Pipeline::None: return raw;
        case Pipeline::Blur: return blur_map(raw, sigma);
        case Pipeline::CenterBias: return center_bias(blur_map(raw, sigma));
        case Pipeline::CenterBiasHistmatch:
            if (!target) throw std::invalid_argument("histogram matching needs a target map");
            return histogram_match(center_bias(blur_map(raw, sigma)), *target);
    }
    return raw;
}

SaliencyMap load_histmatch_target(const fs::path& path, Dims dims) {
    const SaliencyMap t = read_density_pgm(path);
    if (t.dims() == dims) return t;
    ScalarField resized = resize_bicubic(t.density, dims);
    for (double& v : resized) v = std::max(v, 0.0);
    return normalize(std::move(resized));
}

SaliencyMap raw_saliency(const PreparedImage& img, const RunConfig& cfg, const std::vector<Trajectory>& runs) {
    const Dims dims = img.image.dims();
    if (cfg.saliency_source == SaliencySource::TopdownMap) {
        if (!img.fields.topdown) throw std::runtime_error("saliency_source=cfmap but the image has no top-down map");
        return normalize(*img.fields.topdown);
    }
    const std::size_t n = std::min<std::size_t>(runs.size(), static_cast<std::size_t>(img.params.n_runs));
    const std::vector<Trajectory> used(runs.begin(), runs.begin() + static_cast<std::ptrdiff_t>(n));
    if (cfg.deposit == DepositMode::Occupancy) return accumulate(used, dims);
    std::vector<Scanpath> paths;
    for (const Trajectory& tr : used) paths.push_back(scanpath_from_trajectory(tr, cfg.detector));
    return accumulate_fixations(paths, dims);
}

void score_scanpaths(ImageScores& out, const std::vector<Scanpath>& simulated, const ObserverScanpaths& humans,
                     const RunConfig& cfg, Dims dims) {
    for (const Scanpath& sim : simulated) {
        if (sim.empty()) continue;
        for (const auto& [observer, human] : humans) {
            if (human.empty()) continue;
            out.string_edit.push_back(static_cast<double>(string_edit_distance(sim, human, cfg.string_edit)));
            out.tde.push_back(tde_similarity(sim, human, dims, cfg.tde_variant));
        }
    }
}

std::vector<Scanpath> baseline_scanpaths(BaselineKind kind, const std::string& stem, const ObserverScanpaths& humans,
                                         const RunConfig& cfg, Dims dims) {
    double total = 0.0;
    int counted = 0;
    for (const auto& [observer, h] : humans) {
        if (h.empty()) continue;
        total += static_cast<double>(h.size());
        ++counted;
    }
    const int n_fix = counted ? std::max(1, static_cast<int>(std::lround(total / counted))) : 1;
    const std::uint64_t image_seed = derive_seed(cfg.params.seed, stable_hash(stem));
    const std::uint64_t kind_seed = derive_seed(image_seed, kind == BaselineKind::Random ? 1001 : 1002);
    std::vector<Scanpath> out;
    for (int i = 0; i < cfg.baseline_runs; ++i) {
        out.push_back(baseline_scanpath(kind, n_fix, dims, derive_seed(kind_seed, static_cast<std::uint64_t>(i))));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_simulate(const CommandOptions& opt, std::ostream& log_stream) {
    const RunConfig& cfg = opt.config;
    const Batch b = open_batch(opt);
    Log log(log_stream);
    return for_each_image(b, cfg.jobs, log, [&](const Stimulus& s, int inner, std::size_t) {
        std::ostringstream warnings;
        const PreparedImage img = prepare_image(s, cfg, warnings);
        if (!warnings.str().empty()) log.line(warnings.str().substr(0, warnings.str().size() - 1));
        write_text(b.out.params(s.stem), params_text(img.params));
        const std::vector<Trajectory> runs = simulate_runs(img.fields, img.params, inner);
        for (std::size_t r = 0; r < runs.size(); ++r) {
            const int run = static_cast<int>(r);
            const fs::path tp = b.out.trajectory(s.stem, run);
            fs::create_directories(tp.parent_path());
            write_trajectory_csv(tp, runs[r]);
            const fs::path sp = b.out.scanpath(s.stem, run);
            fs::create_directories(sp.parent_path());
            write_scanpath_csv(sp, scanpath_from_trajectory(runs[r], cfg.detector), run_name(run));
        }
        log.line(fmt::format("{}: {} runs", s.stem, runs.size()));
    });
}

int cmd_saliency(const CommandOptions& opt, std::ostream& log_stream) {
    const RunConfig& cfg = opt.config;
    const Batch b = open_batch(opt);
    Log log(log_stream);
    return for_each_image(b, cfg.jobs, log, [&](const Stimulus& s, int inner, std::size_t) {
        std::ostringstream warnings;
        const PreparedImage img = prepare_image(s, cfg, warnings);
        if (!warnings.str().empty()) log.line(warnings.str().substr(0, warnings.str().size() - 1));
        std::vector<Trajectory> runs;
        if (cfg.saliency_source == SaliencySource::Trajectories) runs = simulate_runs(img.fields, img.params, inner);
        const SaliencyMap map = finished_saliency(img, cfg, runs);
        const fs::path path = b.out.saliency(s.stem);
        fs::create_directories(path.parent_path());
        write_saliency_map(path, map);
        if (cfg.heatmaps) {
            fs::create_directories(b.out.heatmap(s.stem).parent_path());
            render_heatmap(map, img.image, b.out.heatmap(s.stem));
        }
        log.line(fmt::format("{}: saliency from {} runs", s.stem, runs.size()));
    });
}

int cmd_evaluate(const CommandOptions& opt, std::ostream& out, std::ostream& log_stream) {
    const RunConfig& cfg = opt.config;
    const Batch b = open_batch(opt);
    Log log(log_stream);

    const std::size_t n = b.selected.size();
    std::vector<std::optional<ImageScores>> model(n), random(n), center(n);
    std::vector<char> excluded(n, 0);

    const int status = for_each_image(b, cfg.jobs, log, [&](const Stimulus& s, int inner, std::size_t i) {
        const Image probe = read_image(s.image);
        validate(probe);
        const Dims dims = probe.dims();
        ObserverScanpaths humans = load_human_scanpaths(s, dims);
        std::erase_if(humans, [](const auto& h) { return h.second.empty(); });
        if (humans.empty()) {
            excluded[i] = 1;
            return;
        }
        std::vector<Scanpath> human_paths;
        for (const auto& h : humans) human_paths.push_back(h.second);
        const FixationSet fixations = pool_fixations(human_paths, dims);

        std::ostringstream warnings;
        const PreparedImage img = prepare_image(s, cfg, warnings);
        if (!warnings.str().empty()) log.line(warnings.str().substr(0, warnings.str().size() - 1));
        const std::vector<Trajectory> runs = run_all(img, cfg, inner);

        ImageScores sim{s.stem, {}, {}, {}, {}};
        const SaliencyMap map = finished_saliency(img, cfg, runs);
        sim.auc = auc_judd(map, fixations);
        sim.nss = nss(map, fixations);
        std::vector<Scanpath> simulated;
        for (int r = 0; r < cfg.scanpath_runs; ++r) {
            simulated.push_back(scanpath_from_trajectory(runs[static_cast<std::size_t>(r)], cfg.detector));
        }
        score_scanpaths(sim, simulated, humans, cfg, dims);

        // Baseline saliency: flat for Random, the center prior for Center.
        ScalarField flat(dims.width, dims.height, 1.0);
        const SaliencyMap uniform = normalize(flat);
        ImageScores rnd{s.stem, auc_judd(uniform, fixations), std::nullopt, {}, {}};
        score_scanpaths(rnd, baseline_scanpaths(BaselineKind::Random, s.stem, humans, cfg, dims), humans, cfg, dims);
        const SaliencyMap prior = center_bias(uniform);
        ImageScores ctr{s.stem, auc_judd(prior, fixations), nss(prior, fixations), {}, {}};
        score_scanpaths(ctr, baseline_scanpaths(BaselineKind::Center, s.stem, humans, cfg, dims), humans, cfg, dims);

        model[i] = std::move(sim);
        random[i] = std::move(rnd);
        center[i] = std::move(ctr);
        log.line(fmt::format("{}: scored against {} observers", s.stem, humans.size()));
    });

    auto collect = [&](const std::vector<std::optional<ImageScores>>& v) {
        std::vector<ImageScores> out;
        for (const auto& s : v) {
            if (s) out.push_back(*s);
        }
        return out;
    };
    MetricReport report;
    report.models.push_back(build_model_report(model_name(cfg, b.layout), collect(model)));
    report.models.push_back(build_model_report(to_string(BaselineKind::Random), collect(random)));
    report.models.push_back(build_model_report(to_string(BaselineKind::Center), collect(center)));
    for (std::size_t i = 0; i < n; ++i) {
        if (excluded[i]) report.excluded.push_back(b.selected[i]->stem);
    }
    for (const auto& stem : report.excluded) log.line(fmt::format("excluded (no human data): {}", stem));

    const std::string json = format_json(report);
    write_text(b.out.report("txt"), format_text(report));
    write_text(b.out.report("csv"), format_csv(report));
    write_text(b.out.report("json"), json);
    if (opt.json) {
        out << json << '\n';
    } else {
        out << format_text(report);
    }
    return status;
}

int cmd_render(const CommandOptions& opt, const RenderRequest& req, std::ostream& log) {
    const DatasetLayout d = scan_dataset(opt.dataset);
    const OutputLayout out{opt.config.out};
    const auto it = std::find_if(d.stimuli.begin(), d.stimuli.end(), [&](const Stimulus& s) { return s.stem == req.image; });
    if (it == d.stimuli.end()) throw std::runtime_error("no stimulus named '" + req.image + "'");
    const Image img = read_image(it->image);
    validate(img);

    const fs::path sim_path = out.scanpath(req.image, req.run);
    if (!fs::exists(sim_path)) {
        throw std::runtime_error("missing simulated scanpath " + sim_path.string() + " (run simulate first)");
    }
    const auto groups = read_scanpath_csv(sim_path, img.dims());
    if (groups.empty()) throw std::runtime_error(sim_path.string() + " holds no scanpath");
    const Scanpath simulated = groups.front().second;

    std::optional<Scanpath> human;
    if (req.observer) {
        for (const auto& [name, path] : load_human_scanpaths(*it, img.dims())) {
            if (name == *req.observer) human = path;
        }
        if (!human) throw std::runtime_error("no observer '" + *req.observer + "' for " + req.image);
    }
    const Rgb8 fig = scanpath_figure(img, simulated, human ? &*human : nullptr);
    const fs::path dst = out.render(req.image, req.run, req.observer);
    fs::create_directories(dst.parent_path());
    write_png(dst, fig);
    log << "wrote " << dst.string() << '\n';
    return kExitOk;
}

int cmd_validate(const CommandOptions& opt, std::ostream& out) {
    const DatasetLayout d = scan_dataset(opt.dataset);
    const auto problems = validate_dataset(d);
    for (const auto& p : problems) out << p << '\n';
    out << fmt::format("{} stimuli, {} problems\n", d.stimuli.size(), problems.size());
    return problems.empty() ? kExitOk : kExitPartialFailure;
}

}  // namespace gazelab
