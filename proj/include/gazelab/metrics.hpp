#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gazelab/raster.hpp"
#include "gazelab/saliency.hpp"
#include "gazelab/scanpath.hpp"

namespace gazelab {

/// Fixation positions pooled over all observers of one image.
struct FixationSet {
    std::vector<Vec2> points;
    Dims dims;
};

FixationSet pool_fixations(const std::vector<Scanpath>& scanpaths, Dims dims);

/// AUC-Judd: fixated pixels are positives, every other pixel a negative.
/// Thresholds sweep the distinct positive values; the ROC curve runs from
/// (0,0) to (1,1) and is integrated with the trapezoid rule.
double auc_judd(const SaliencyMap& s, const FixationSet& f);

/// Mean z-scored saliency (population std) over the pixel of each fixation.
/// Throws std::domain_error on a zero-variance map.
double nss(const SaliencyMap& s, const FixationSet& f);

/// Unit-cost edit distance between two label sequences.
std::size_t levenshtein(const std::vector<int>& a, const std::vector<int>& b);

/// Row-major n x n grid cell of every fixation. With `collapse_repeats`,
/// consecutive equal labels merge into one.
std::vector<int> grid_labels(const Scanpath& s, int n_grid, bool collapse_repeats = false);

struct StringEditOptions {
    int n_grid = 5;
    bool collapse_repeats = false;

    friend bool operator==(const StringEditOptions&, const StringEditOptions&) = default;
};

/// Levenshtein distance between the grid-label strings. Throws
/// std::invalid_argument on an empty scanpath.
std::size_t string_edit_distance(const Scanpath& a, const Scanpath& b, const StringEditOptions& opt = {});

enum class TdeVariant { Linear, Exponential };

/// Scaled time-delay embedding similarity. For every window length k up to
/// the shorter scanpath, each length-k window of one path is matched to its
/// closest window of the other (mean point distance over the image
/// diagonal); these minima are averaged over windows and then over k. The two
/// directions are averaged into D and mapped to 1 - D (Linear, clamped to
/// [0,1]) or exp(-D) (Exponential).
double tde_similarity(const Scanpath& a, const Scanpath& b, Dims dims, TdeVariant variant = TdeVariant::Linear);

/// Mean, standard error and count of one aggregated column.
struct Aggregate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

enum class ScoreSense { LowerIsBetter, HigherIsBetter };

struct AverageAndBest {
    Aggregate average;
    Aggregate best;
};

/// Pools per-image score lists. Average is the mean over every score; Best
/// takes the extremal score of each image and averages over images. Standard
/// errors are sample std / sqrt(images), computed over per-image means for
/// Average and per-image extrema for Best. Images without scores are skipped.
AverageAndBest aggregate_table4(const std::vector<std::vector<double>>& per_image, ScoreSense sense);

/// Sample mean and standard error over finite values.
Aggregate aggregate_values(const std::vector<double>& values);

struct ImageScores {
    std::string image;
    std::optional<double> auc;
    std::optional<double> nss;
    std::vector<double> string_edit;  // one per (run, observer) pair
    std::vector<double> tde;
};

struct ImageRecord {
    std::string image;
    std::optional<double> auc;
    std::optional<double> nss;
    std::optional<double> string_edit_avg;
    std::optional<double> string_edit_best;
    std::optional<double> tde_avg;
    std::optional<double> tde_best;
};

struct ModelReport {
    std::string model;
    std::vector<ImageRecord> images;
    std::optional<Aggregate> auc;
    std::optional<Aggregate> nss;
    std::optional<AverageAndBest> string_edit;
    std::optional<AverageAndBest> tde;
};

struct MetricReport {
    std::vector<ModelReport> models;
    std::vector<std::string> excluded;  // images lacking human data
};

ModelReport build_model_report(const std::string& model, const std::vector<ImageScores>& scores);

/// Aligned text table, one row per model.
std::string format_text(const MetricReport& r);
/// Per-image CSV: one row per (model, image).
std::string format_csv(const MetricReport& r);
std::string format_json(const MetricReport& r);

}  // namespace gazelab
