#include "gazelab/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace gazelab {

FixationSet pool_fixations(const std::vector<Scanpath>& scanpaths, Dims dims) {
    FixationSet f{{}, dims};
    for (const Scanpath& s : scanpaths) {
        for (const Fixation& fx : s.fixations) f.points.push_back(fx.position());
    }
    return f;
}

namespace {

// Pixel holding a fixation; positions on the border half-pixel are clamped in.
std::size_t fixation_pixel(Vec2 p, Dims d) {
    const int x = std::clamp(static_cast<int>(std::floor(p.x + 0.5)), 0, d.width - 1);
    const int y = std::clamp(static_cast<int>(std::floor(p.y + 0.5)), 0, d.height - 1);
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(d.width) + static_cast<std::size_t>(x);
}

void check_inputs(const SaliencyMap& s, const FixationSet& f, const char* metric) {
    if (f.points.empty()) throw std::invalid_argument(std::string(metric) + ": empty fixation set");
    if (f.dims != s.dims()) {
        throw std::invalid_argument(std::string(metric) + ": fixations are for a " + to_string(f.dims) +
                                    " image but the map is " + to_string(s.dims()));
    }
}

}  // namespace

double auc_judd(const SaliencyMap& s, const FixationSet& f) {
    check_inputs(s, f, "auc_judd");
    std::set<std::size_t> fixated;
    for (Vec2 p : f.points) fixated.insert(fixation_pixel(p, s.dims()));

    std::vector<double> positives;
    std::vector<double> negatives;
    positives.reserve(fixated.size());
    negatives.reserve(s.density.size() - fixated.size());
    for (std::size_t i = 0; i < s.density.size(); ++i) {
        (fixated.count(i) ? positives : negatives).push_back(s.density[i]);
    }
    if (negatives.empty()) throw std::domain_error("auc_judd: every pixel is fixated");

    std::sort(positives.begin(), positives.end(), std::greater<>());
    std::sort(negatives.begin(), negatives.end(), std::greater<>());
    const double n_pos = static_cast<double>(positives.size());
    const double n_neg = static_cast<double>(negatives.size());

    double area = 0.0;
    double prev_tp = 0.0;
    double prev_fp = 0.0;
    std::size_t i = 0;
    while (i < positives.size()) {
        const double threshold = positives[i];
        while (i < positives.size() && positives[i] == threshold) ++i;
        // negatives sorted descending: count of values >= threshold
        const auto above = std::upper_bound(negatives.begin(), negatives.end(), threshold, std::greater<>());
        const double tp = static_cast<double>(i) / n_pos;
        const double fp = static_cast<double>(above - negatives.begin()) / n_neg;
        area += 0.5 * (fp - prev_fp) * (tp + prev_tp);
        prev_tp = tp;
        prev_fp = fp;
    }
    area += 0.5 * (1.0 - prev_fp) * (1.0 + prev_tp);
    return area;
}

double nss(const SaliencyMap& s, const FixationSet& f) {
    check_inputs(s, f, "nss");
    const auto& v = s.density.values();
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= n;
    const double sd = std::sqrt(var);
    // Roundoff in the mean gives constant maps a tiny spurious spread.
    const double scale = std::max(std::abs(*std::min_element(v.begin(), v.end())),
                                  std::abs(*std::max_element(v.begin(), v.end())));
    if (!(sd > 64.0 * std::numeric_limits<double>::epsilon() * scale)) throw std::domain_error("nss: saliency map has zero variance");

#ifndef NDEBUG
    {
        double zsum = 0.0;
        double zsq = 0.0;
        for (double x : v) {
            const double z = (x - mean) / sd;
            zsum += z;
            zsq += z * z;
        }
        assert(std::abs(zsum / n) <= 1e-9 && std::abs(std::sqrt(zsq / n) - 1.0) <= 1e-9);
    }
#endif

    double total = 0.0;
    for (Vec2 p : f.points) total += (v[fixation_pixel(p, s.dims())] - mean) / sd;
    return total / static_cast<double>(f.points.size());
}

std::size_t levenshtein(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.empty()) return b.size();
    if (b.empty()) return a.size();
    std::vector<std::size_t> row(b.size() + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            const std::size_t subst = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
            row[j] = std::min({up + 1, row[j - 1] + 1, subst});
            diag = up;
        }
    }
    return row[b.size()];
}

std::vector<int> grid_labels(const Scanpath& s, int n_grid, bool collapse_repeats) {
    if (n_grid < 2) throw std::invalid_argument("n_grid must be at least 2");
    if (s.dims.width <= 0 || s.dims.height <= 0) throw std::invalid_argument("scanpath has no image dimensions");
    std::vector<int> labels;
    labels.reserve(s.fixations.size());
    for (const Fixation& f : s.fixations) {
        const int col = std::clamp(static_cast<int>(std::floor(f.x * n_grid / s.dims.width)), 0, n_grid - 1);
        const int row = std::clamp(static_cast<int>(std::floor(f.y * n_grid / s.dims.height)), 0, n_grid - 1);
        const int label = row * n_grid + col;
        if (collapse_repeats && !labels.empty() && labels.back() == label) continue;
        labels.push_back(label);
    }
    return labels;
}

std::size_t string_edit_distance(const Scanpath& a, const Scanpath& b, const StringEditOptions& opt) {
    if (a.empty() || b.empty()) throw std::invalid_argument("string_edit_distance: empty scanpath");
    return levenshtein(grid_labels(a, opt.n_grid, opt.collapse_repeats),
                       grid_labels(b, opt.n_grid, opt.collapse_repeats));
}

namespace {

double directed_tde(const std::vector<Vec2>& p, const std::vector<Vec2>& q, double diag) {
    const std::size_t kmax = std::min(p.size(), q.size());
    double total = 0.0;
    for (std::size_t k = 1; k <= kmax; ++k) {
        double sum_min = 0.0;
        const std::size_t np = p.size() - k + 1;
        const std::size_t nq = q.size() - k + 1;
        for (std::size_t i = 0; i < np; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < nq; ++j) {
                double d = 0.0;
                for (std::size_t t = 0; t < k; ++t) d += norm(p[i + t] - q[j + t]);
                best = std::min(best, d / static_cast<double>(k));
            }
            sum_min += best / diag;
        }
        total += sum_min / static_cast<double>(np);
    }
    return total / static_cast<double>(kmax);
}

std::vector<Vec2> positions(const Scanpath& s) {
    std::vector<Vec2> out;
    out.reserve(s.fixations.size());
    for (const Fixation& f : s.fixations) out.push_back(f.position());
    return out;
}

}  // namespace

double tde_similarity(const Scanpath& a, const Scanpath& b, Dims dims, TdeVariant variant) {
    if (a.empty() || b.empty()) throw std::invalid_argument("tde_similarity: empty scanpath");
    const double diag = std::hypot(static_cast<double>(dims.width), static_cast<double>(dims.height));
    if (!(diag > 0.0)) throw std::invalid_argument("tde_similarity: image dimensions required");
    const std::vector<Vec2> p = positions(a);
    const std::vector<Vec2> q = positions(b);
    const double d = 0.5 * (directed_tde(p, q, diag) + directed_tde(q, p, diag));
    if (variant == TdeVariant::Exponential) return std::exp(-d);
    return std::clamp(1.0 - d, 0.0, 1.0);
}

Aggregate aggregate_values(const std::vector<double>& values) {
    Aggregate a;
    double sum = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) continue;
        sum += v;
        ++a.n;
    }
    if (a.n == 0) return a;
    a.mean = sum / static_cast<double>(a.n);
    if (a.n > 1) {
        double ss = 0.0;
        for (double v : values) {
            if (std::isfinite(v)) ss += (v - a.mean) * (v - a.mean);
        }
        a.stderr_ = std::sqrt(ss / static_cast<double>(a.n - 1)) / std::sqrt(static_cast<double>(a.n));
    }
    return a;
}

AverageAndBest aggregate_table4(const std::vector<std::vector<double>>& per_image, ScoreSense sense) {
    std::vector<double> image_means;
    std::vector<double> image_best;
    double pooled_sum = 0.0;
    std::size_t pooled_n = 0;
    for (const auto& scores : per_image) {
        if (scores.empty()) continue;
        const double sum = std::accumulate(scores.begin(), scores.end(), 0.0);
        pooled_sum += sum;
        pooled_n += scores.size();
        image_means.push_back(sum / static_cast<double>(scores.size()));
        image_best.push_back(sense == ScoreSense::LowerIsBetter ? *std::min_element(scores.begin(), scores.end())
                                                                 : *std::max_element(scores.begin(), scores.end()));
    }
    AverageAndBest out;
    out.average = aggregate_values(image_means);
    if (pooled_n > 0) out.average.mean = pooled_sum / static_cast<double>(pooled_n);
    out.best = aggregate_values(image_best);
    return out;
}

ModelReport build_model_report(const std::string& model, const std::vector<ImageScores>& scores) {
    ModelReport r;
    r.model = model;
    std::vector<double> aucs;
    std::vector<double> nsss;
    std::vector<std::vector<double>> edits;
    std::vector<std::vector<double>> tdes;
    for (const ImageScores& s : scores) {
        ImageRecord rec;
        rec.image = s.image;
        rec.auc = s.auc;
        rec.nss = s.nss;
        if (s.auc) aucs.push_back(*s.auc);
        if (s.nss) nsss.push_back(*s.nss);
        if (!s.string_edit.empty()) {
            const auto one = aggregate_table4({s.string_edit}, ScoreSense::LowerIsBetter);
            rec.string_edit_avg = one.average.mean;
            rec.string_edit_best = one.best.mean;
        }
        if (!s.tde.empty()) {
            const auto one = aggregate_table4({s.tde}, ScoreSense::HigherIsBetter);
            rec.tde_avg = one.average.mean;
            rec.tde_best = one.best.mean;
        }
        edits.push_back(s.string_edit);
        tdes.push_back(s.tde);
        r.images.push_back(std::move(rec));
    }
    if (!aucs.empty()) r.auc = aggregate_values(aucs);
    if (!nsss.empty()) r.nss = aggregate_values(nsss);
    const auto has_any = [](const auto& lists) {
        return std::any_of(lists.begin(), lists.end(), [](const auto& l) { return !l.empty(); });
    };
    if (has_any(edits)) r.string_edit = aggregate_table4(edits, ScoreSense::LowerIsBetter);
    if (has_any(tdes)) r.tde = aggregate_table4(tdes, ScoreSense::HigherIsBetter);
    return r;
}

namespace {

std::string cell(const std::optional<Aggregate>& a, int digits) {
    if (!a) return "-";
    return fmt::format("{:.{}f} ({:.{}f})", a->mean, digits, a->stderr_, digits);
}

std::string csv_value(const std::optional<double>& v) { return v ? fmt::format("{:.10g}", *v) : std::string(); }

nlohmann::json json_value(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json json_aggregate(const std::optional<Aggregate>& a) {
    if (!a) return nullptr;
    return {{"mean", a->mean}, {"stderr", a->stderr_}, {"n", a->n}};
}

}  // namespace

std::string format_text(const MetricReport& r) {
    std::string out = fmt::format("{:<12} {:>17} {:>17} {:>17} {:>17} {:>17} {:>17}\n", "Model", "AUC", "NSS",
                                  "StringEdit Avg", "StringEdit Best", "TDE Avg", "TDE Best");
    for (const ModelReport& m : r.models) {
        const auto part = [](const std::optional<AverageAndBest>& ab, bool best) -> std::optional<Aggregate> {
            if (!ab) return std::nullopt;
            return best ? ab->best : ab->average;
        };
        out += fmt::format("{:<12} {:>17} {:>17} {:>17} {:>17} {:>17} {:>17}\n", m.model, cell(m.auc, 3),
                           cell(m.nss, 3), cell(part(m.string_edit, false), 2), cell(part(m.string_edit, true), 2),
                           cell(part(m.tde, false), 3), cell(part(m.tde, true), 3));
    }
    if (!r.excluded.empty()) {
        out += "excluded (no human data):";
        for (const auto& e : r.excluded) out += " " + e;
        out += "\n";
    }
    return out;
}

std::string format_csv(const MetricReport& r) {
    std::string out = "model,image,auc,nss,string_edit_avg,string_edit_best,tde_avg,tde_best\n";
    for (const ModelReport& m : r.models) {
        for (const ImageRecord& i : m.images) {
            out += fmt::format("{},{},{},{},{},{},{},{}\n", m.model, i.image, csv_value(i.auc), csv_value(i.nss),
                               csv_value(i.string_edit_avg), csv_value(i.string_edit_best), csv_value(i.tde_avg),
                               csv_value(i.tde_best));
        }
    }
    return out;
}

std::string format_json(const MetricReport& r) {
    nlohmann::json doc;
    doc["models"] = nlohmann::json::array();
    for (const ModelReport& m : r.models) {
        nlohmann::json jm;
        jm["model"] = m.model;
        const auto ab = [](const std::optional<AverageAndBest>& a) -> nlohmann::json {
            if (!a) return nullptr;
            return {{"average", json_aggregate(a->average)}, {"best", json_aggregate(a->best)}};
        };
        jm["aggregates"] = {{"auc", json_aggregate(m.auc)},
                            {"nss", json_aggregate(m.nss)},
                            {"string_edit", ab(m.string_edit)},
                            {"tde", ab(m.tde)}};
        jm["images"] = nlohmann::json::array();
        for (const ImageRecord& i : m.images) {
            jm["images"].push_back({{"image", i.image},
                                    {"auc", json_value(i.auc)},
                                    {"nss", json_value(i.nss)},
                                    {"string_edit_avg", json_value(i.string_edit_avg)},
                                    {"string_edit_best", json_value(i.string_edit_best)},
                                    {"tde_avg", json_value(i.tde_avg)},
                                    {"tde_best", json_value(i.tde_best)}});
        }
        doc["models"].push_back(std::move(jm));
    }
    doc["excluded"] = r.excluded;
    return doc.dump(2) + "\n";
}

}  // namespace gazelab
