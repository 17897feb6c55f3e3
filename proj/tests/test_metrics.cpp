#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "gazelab/metrics.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace gazelab;
using namespace gazelab::testing;

namespace {

SaliencyMap map_of(int w, int h, std::vector<double> v) {
    ScalarField f(w, h);
    f.values() = std::move(v);
    return SaliencyMap{std::move(f)};
}

// Brute force: every distinct value in the map is a candidate threshold; the
// curve keeps only the points at positive values, plus the two ends.
double roc_oracle(const SaliencyMap& s, const std::set<std::size_t>& fixated) {
    std::set<double, std::greater<>> thresholds;
    for (std::size_t i : fixated) thresholds.insert(s.density[i]);
    std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
    const double n_pos = static_cast<double>(fixated.size());
    const double n_neg = static_cast<double>(s.density.size() - fixated.size());
    for (double t : thresholds) {
        double tp = 0, fp = 0;
        for (std::size_t i = 0; i < s.density.size(); ++i) {
            if (s.density[i] < t) continue;
            (fixated.count(i) ? tp : fp) += 1.0;
        }
        pts.push_back({fp / n_neg, tp / n_pos});
    }
    pts.push_back({1.0, 1.0});
    double area = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        area += (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second) / 2.0;
    }
    return area;
}

std::size_t edit_oracle(const std::string& a, const std::string& b) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
        if (i == a.size()) return b.size() - j;
        if (j == b.size()) return a.size() - i;
        const auto key = std::make_pair(i, j);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        const std::size_t r =
            std::min({go(i + 1, j) + 1, go(i, j + 1) + 1, go(i + 1, j + 1) + (a[i] == b[j] ? 0u : 1u)});
        return memo[key] = r;
    };
    return go(0, 0);
}

std::vector<int> codes(const std::string& s) { return {s.begin(), s.end()}; }

std::vector<std::string> all_strings(std::size_t max_len, const std::string& alphabet) {
    std::vector<std::string> out{""};
    for (std::size_t begin = 0; out.back().size() < max_len;) {
        const std::size_t end = out.size();
        for (std::size_t i = begin; i < end; ++i) {
            for (char c : alphabet) out.push_back(out[i] + c);
        }
        begin = end;
    }
    return out;
}

Scanpath path(std::vector<Vec2> pts, Dims d) {
    Scanpath s{{}, d};
    for (std::size_t i = 0; i < pts.size(); ++i) s.fixations.push_back({0.3 * i, 0.25, pts[i].x, pts[i].y});
    return s;
}

}  // namespace

TEST_CASE("auc_judd") {
    const SaliencyMap grid = map_of(3, 3, {9, 8, 7, 6, 5, 4, 3, 2, 1});
    CHECK(auc_judd(grid, {{{0, 0}, {1, 0}}, {3, 3}}) == 1.0);
    const double low = auc_judd(grid, {{{1, 2}, {2, 2}}, {3, 3}});
    CHECK(low == doctest::Approx(roc_oracle(grid, {7, 8})).epsilon(1e-15));
    CHECK(low == 0.25);

    const SaliencyMap constant = map_of(3, 3, std::vector<double>(9, 1.0 / 9.0));
    CHECK(auc_judd(constant, {{{1, 1}}, {3, 3}}) == 0.5);
    CHECK(auc_judd(constant, {{{0, 0}, {2, 1}, {1, 2}}, {3, 3}}) == 0.5);

    std::vector<double> indicator(9, 0.0);
    indicator[4] = indicator[6] = 1.0;
    CHECK(auc_judd(map_of(3, 3, indicator), {{{1, 1}, {0, 2}}, {3, 3}}) == 1.0);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> px(0, 19), level(0, 4);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<double> v(20 * 16);
        // Coarse levels force ties between positives and negatives.
        for (double& x : v) x = trial % 2 ? u(rng) : level(rng) / 4.0;
        const SaliencyMap s = map_of(20, 16, v);
        FixationSet f{{}, {20, 16}};
        std::set<std::size_t> fixated;
        for (int k = 0; k < 12; ++k) {
            const int x = px(rng), y = px(rng) % 16;
            f.points.push_back({double(x), double(y)});
            fixated.insert(static_cast<std::size_t>(y * 20 + x));
        }
        const double a = auc_judd(s, f);
        CHECK(a == doctest::Approx(roc_oracle(s, fixated)).epsilon(1e-12));
        CHECK((a >= 0.0 && a <= 1.0));

        std::vector<double> cubed = v, expo = v;
        for (double& x : cubed) x = x * x * x;
        for (double& x : expo) x = std::exp(x);
        CHECK(std::abs(auc_judd(map_of(20, 16, cubed), f) - a) <= 1e-12);
        CHECK(std::abs(auc_judd(map_of(20, 16, expo), f) - a) <= 1e-12);
    }

    CHECK_THROWS(auc_judd(grid, {{}, {3, 3}}));
    CHECK_THROWS(auc_judd(grid, {{{1, 1}}, {4, 3}}));
}

TEST_CASE("nss") {
    std::vector<double> delta(9, 0.0);
    delta[4] = 1.0;
    const SaliencyMap d = map_of(3, 3, delta);
    CHECK(std::abs(nss(d, {{{1, 1}}, {3, 3}}) - 2.0 * std::sqrt(2.0)) <= 1e-9);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(12 * 10);
    for (double& x : v) x = u(rng);
    const SaliencyMap s = map_of(12, 10, v);
    FixationSet everywhere{{}, {12, 10}};
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x < 12; ++x) everywhere.points.push_back({double(x), double(y)});
    }
    CHECK(std::abs(nss(s, everywhere)) <= 1e-12);

    const FixationSet some{{{3, 4}, {3.4, 4.2}, {11, 0}, {0.2, 9.4}}, {12, 10}};
    std::vector<double> affine = v;
    for (double& x : affine) x = 3.7 * x + 12.0;
    CHECK(std::abs(nss(map_of(12, 10, affine), some) - nss(s, some)) <= 1e-9);

    CHECK_THROWS_AS(nss(map_of(3, 3, std::vector<double>(9, 0.2)), {{{1, 1}}, {3, 3}}), std::domain_error);
}

TEST_CASE("pool_fixations keeps every observer") {
    const Dims d{10, 10};
    const auto f = pool_fixations({path({{1, 1}, {2, 2}}, d), path({{3, 3}}, d)}, d);
    CHECK(f.points.size() == 3);
    CHECK(f.points[2] == Vec2{3, 3});
}

TEST_CASE("levenshtein") {
    const auto strings = all_strings(4, "ABC");
    CHECK(strings.size() == 1 + 3 + 9 + 27 + 81);
    for (const auto& a : strings) {
        for (const auto& b : strings) {
            const std::size_t d = levenshtein(codes(a), codes(b));
            CHECK(d == edit_oracle(a, b));
            CHECK(d <= std::max(a.size(), b.size()));
        }
    }
    CHECK(levenshtein(codes("kitten"), codes("sitting")) == 3);

    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> len(0, 9), sym(0, 3);
    auto random_seq = [&] {
        std::vector<int> s(static_cast<std::size_t>(len(rng)));
        for (int& c : s) c = sym(rng);
        return s;
    };
    for (int trial = 0; trial < 500; ++trial) {
        const auto a = random_seq(), b = random_seq(), c = random_seq();
        CHECK(levenshtein(a, b) == levenshtein(b, a));
        CHECK(levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c));
    }
}

TEST_CASE("grid labels and string edit distance") {
    const Dims d{100, 50};
    const Scanpath s = path({{0, 0}, {99.9, 49.9}, {20, 10}, {19.9, 9.9}, {50, 25}}, d);
    CHECK(grid_labels(s, 5) == std::vector<int>{0, 24, 6, 0, 12});
    CHECK(grid_labels(path({{1, 1}, {2, 2}, {90, 1}, {91, 2}, {3, 3}}, d), 5, true) == std::vector<int>{0, 4, 0});
    // Out-of-image centroids clamp to the border cells.
    CHECK(grid_labels(path({{-3, -3}, {130, 70}}, d), 5) == std::vector<int>{0, 24});
    CHECK_THROWS(grid_labels(s, 1));

    // Cells A, B, C and D on the top row of a 5x5 grid.
    const Scanpath abc = path({{5, 5}, {25, 5}, {45, 5}}, d);
    const Scanpath abd = path({{5, 5}, {25, 5}, {65, 5}}, d);
    CHECK(string_edit_distance(abc, abc) == 0);
    CHECK(string_edit_distance(abc, abd) == 1);
    CHECK(string_edit_distance(abc, path({{5, 5}}, d)) == 2);
    CHECK(string_edit_distance(abc, abd, {2, false}) == 1);
    CHECK(string_edit_distance(abc, path({{45, 5}, {5, 5}, {25, 5}}, d), {2, false}) == 0);
    CHECK_THROWS(string_edit_distance(abc, Scanpath{{}, d}));
}

TEST_CASE("tde_similarity") {
    const Dims d{120, 90};
    const Scanpath a = path({{10, 10}, {60, 40}, {100, 80}, {20, 70}}, d);
    CHECK(tde_similarity(a, a, d) == 1.0);
    CHECK(tde_similarity(path({{0, 0}}, d), path({{120, 90}}, d), d) == 0.0);
    const Scanpath two = path({{0, 0}, {120, 90}}, d);
    const Scanpath one = path({{0, 0}}, d);
    CHECK(std::abs(tde_similarity(two, one, d) - 0.75) <= 1e-9);
    CHECK(std::abs(tde_similarity(two, one, d, TdeVariant::Exponential) - std::exp(-0.25)) <= 1e-12);

    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> ux(10.0, 80.0), uy(10.0, 60.0);
    std::uniform_int_distribution<int> len(1, 8);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Vec2> p(static_cast<std::size_t>(len(rng))), q(static_cast<std::size_t>(len(rng)));
        for (Vec2& v : p) v = {ux(rng), uy(rng)};
        for (Vec2& v : q) v = {ux(rng), uy(rng)};
        const double s = tde_similarity(path(p, d), path(q, d), d);
        CHECK(s == tde_similarity(path(q, d), path(p, d), d));
        CHECK(s < 1.0);
        CHECK(s >= 0.0);
        const Vec2 shift{25.0, 20.0};
        for (Vec2& v : p) v += shift;
        for (Vec2& v : q) v += shift;
        CHECK(std::abs(tde_similarity(path(p, d), path(q, d), d) - s) <= 1e-12);
    }
    CHECK_THROWS(tde_similarity(a, Scanpath{{}, d}, d));
}

TEST_CASE("aggregation") {
    const auto single = aggregate_table4({{0.4}}, ScoreSense::HigherIsBetter);
    CHECK(single.average.mean == 0.4);
    CHECK(single.best.mean == 0.4);

    const auto pair = aggregate_table4({{2, 4}}, ScoreSense::LowerIsBetter);
    CHECK(pair.average.mean == 3.0);
    CHECK(pair.best.mean == 2.0);

    // Two images: pooled mean over all five scores; best per image then averaged.
    const auto two = aggregate_table4({{1, 2, 3}, {10, 20}, {}}, ScoreSense::HigherIsBetter);
    CHECK(two.average.mean == doctest::Approx(36.0 / 5.0));
    CHECK(two.average.n == 2);
    CHECK(two.best.mean == doctest::Approx(11.5));
    CHECK(two.best.stderr_ == doctest::Approx(std::sqrt(2 * 8.5 * 8.5) / std::sqrt(2.0)));

    const Aggregate a = aggregate_values({1, 2, 3, 4, NAN});
    CHECK(a.n == 4);
    CHECK(a.mean == 2.5);
    CHECK(a.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(aggregate_values({}).n == 0);
}

TEST_CASE("reports") {
    std::vector<ImageScores> scores{{"a", 0.8, 1.5, {3, 5}, {0.7, 0.9}}, {"b", 0.6, std::nullopt, {4}, {0.5}}};
    MetricReport r;
    r.models.push_back(build_model_report("EYMOL", scores));
    r.models.push_back(build_model_report("Random", {{"a", 0.5, std::nullopt, {9}, {0.4}}, {"b", 0.5, std::nullopt, {8}, {0.3}}}));
    r.excluded = {"c"};

    const ModelReport& m = r.models[0];
    CHECK(m.auc->mean == doctest::Approx(0.7));
    CHECK(m.nss->n == 1);
    CHECK(m.string_edit->average.mean == 4.0);
    CHECK(m.string_edit->best.mean == 3.5);
    CHECK(m.images[0].tde_best == 0.9);
    CHECK(m.images[0].string_edit_avg == 4.0);
    CHECK_FALSE(r.models[1].nss.has_value());

    const std::string csv = format_csv(r);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 2);
    CHECK(csv.find("EYMOL,b,0.6,,4,4,0.5,0.5\n") != std::string::npos);

    const std::string text = format_text(r);
    CHECK(text.find("Random") != std::string::npos);
    CHECK(text.find("excluded (no human data): c") != std::string::npos);

    const auto j = nlohmann::json::parse(format_json(r));
    CHECK(j["models"].size() == 2);
    CHECK(j["models"][0]["aggregates"]["string_edit"]["best"]["mean"] == 3.5);
    CHECK(j["models"][1]["aggregates"]["nss"].is_null());
    CHECK(j["excluded"][0] == "c");
}
