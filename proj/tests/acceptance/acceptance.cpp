// Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//
// Criteria 9-12 need the ROST corpus: set STYLO_ROST_DIR to its root
// (<author>/<file>.txt). STYLO_ROST_GRID=reduced runs n in {2,3} with two
// split seeds instead of the full grid; STYLO_ROST_OUT keeps the results log
// there so an interrupted run can resume.

#include "stylo/classifiers.hpp"
#include "stylo/detail/training.hpp"
#include "stylo/experiment.hpp"
#include "stylo/features.hpp"
#include "stylo/metrics.hpp"
#include "stylo/parallel.hpp"
#include "stylo/unicode.hpp"
#include "synthetic.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

using namespace stylo;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
    Status status;
    std::string detail;
};

Outcome pass(std::string d = {}) { return {Status::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Status::Fail, std::move(d)}; }
Outcome skip(std::string d) { return {Status::Skip, std::move(d)}; }

Outcome check(bool ok, std::string detail) { return {ok ? Status::Pass : Status::Fail, std::move(detail)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// ---- 1 -------------------------------------------------------------------

Outcome metrics_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    constexpr int C = 10;
    constexpr int N = 1000;
    std::vector<std::string> labels;
    for (int c = 0; c < C; ++c) labels.push_back(fmt::format("c{}", c));
    Rng rng(1);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> t(N);
        std::vector<int> p(N);
        // Mix of accurate and noisy predictors; some trials drop a class.
        const double noise = rng.uniform();
        const int missing = trial % 7 == 0 ? static_cast<int>(rng.below(C)) : -1;
        for (int i = 0; i < N; ++i) {
            do t[i] = static_cast<int>(rng.below(C)); while (t[i] == missing);
            p[i] = rng.uniform() < noise ? static_cast<int>(rng.below(C)) : t[i];
        }
        std::vector<std::string> ts;
        std::vector<std::string> ps;
        for (int i = 0; i < N; ++i) {
            ts.push_back(labels[t[i]]);
            ps.push_back(labels[p[i]]);
        }
        const auto cm = confusion_matrix(ts, ps, labels);
        const auto r = report(cm);

        // Brute force straight from the label vectors.
        int correct = 0;
        double sum_recall = 0.0;
        double sum_precision = 0.0;
        double sum_f1 = 0.0;
        for (int i = 0; i < N; ++i) correct += t[i] == p[i];
        for (int c = 0; c < C; ++c) {
            int tp = 0;
            int fp = 0;
            int fn = 0;
            for (int i = 0; i < N; ++i) {
                tp += t[i] == c && p[i] == c;
                fp += t[i] != c && p[i] == c;
                fn += t[i] == c && p[i] != c;
            }
            const double rec = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
            const double prec = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
            const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
            worst = std::max({worst, std::abs(rec - r.per_class[c].recall), std::abs(prec - r.per_class[c].precision),
                              std::abs(f1 - r.per_class[c].f1)});
            sum_recall += rec;
            sum_precision += prec;
            sum_f1 += f1;
            for (int d = 0; d < C; ++d) {
                std::size_t count = 0;
                for (int i = 0; i < N; ++i) count += t[i] == c && p[i] == d;
                if (cm.counts[c][d] != count) return fail(fmt::format("trial {}: confusion[{}][{}] differs", trial, c, d));
            }
        }
        worst = std::max({worst, std::abs(static_cast<double>(correct) / N - r.accuracy),
                          std::abs(sum_recall / C - r.macro_accuracy), std::abs(sum_precision / C - r.macro_precision),
                          std::abs(sum_f1 / C - r.macro_f1)});
    }
    const double elapsed = seconds_since(t0);
    return check(worst <= 1e-12 && elapsed < 5.0, fmt::format("max abs error {:.3g}, {:.2f} s", worst, elapsed));
}

// ---- 2 -------------------------------------------------------------------

Outcome tfidf_hand_check() {
    const auto docs = [](std::initializer_list<const char*> items) {
        std::vector<EncodedText> out;
        for (const char* s : items) out.push_back({s, Casing::Original});
        return out;
    };
    const double idf_half = std::log(3.0 / 2.0) + 1.0;
    double worst = 0.0;
    const auto expect = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };

    auto m = fit_vectorizer(docs({"ab", "ab"}), 2);
    expect(m.idf().at(0), 1.0);

    m = fit_vectorizer(docs({"ab", "cd"}), 2);
    expect(m.idf().at(0), idf_half);
    expect(m.idf().at(1), idf_half);
    worst = std::max(worst, std::abs(idf_half - 1.405465) > 5e-7 ? 1.0 : 0.0);

    auto x = transform(m, docs({"abab", "abcd", "zz"}));
    expect(x.dense_row(0)[0], 1.0);  // 2 * idf, single nonzero -> 1
    expect(x.dense_row(0)[1], 0.0);
    expect(x.dense_row(1)[0], 1.0 / std::sqrt(2.0));
    expect(x.dense_row(1)[1], 1.0 / std::sqrt(2.0));
    expect(static_cast<double>(x.row(2).cols.size()), 0.0);

    // "abc", "abd": ab has df 2 (idf 1), bc and bd df 1 (idf ln 1.5 + 1).
    const auto [m2, x2] = fit_transform(docs({"abc", "abd"}), NGramRange{2, 2});
    const double norm = std::sqrt(1.0 + idf_half * idf_half);
    expect(x2.dense_row(0)[0], 1.0 / norm);
    expect(x2.dense_row(0)[1], idf_half / norm);
    expect(x2.dense_row(0)[2], 0.0);
    expect(x2.dense_row(1)[2], idf_half / norm);
    return check(worst <= 1e-9, fmt::format("max abs error {:.3g}", worst));
}

// ---- 3 -------------------------------------------------------------------

Outcome ngram_conservation() {
    Rng rng(3);
    const std::u32string pool = U"ab_$@.ăîșțâ𝔸€";
    for (int trial = 0; trial < 1000; ++trial) {
        std::u32string s;
        const auto len = rng.below(30);
        for (std::size_t i = 0; i < len; ++i) s += pool[rng.below(pool.size())];
        const EncodedText text{unicode::encode(s), Casing::Original};
        for (int n = kMinNgram; n <= kMaxNgram; ++n) {
            std::size_t total = 0;
            for (const auto& [g, c] : extract_ngrams(text, n)) total += c;
            const std::size_t want = len >= static_cast<std::size_t>(n) ? len - n + 1 : 0;
            if (total != want) return fail(fmt::format("length {} n {}: {} != {}", len, n, total, want));
        }
    }
    return pass("1000 strings x n in 2..5");
}

// ---- 4 -------------------------------------------------------------------

double relative_error(std::span<const double> a, std::span<const double> b) {
    double diff = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return std::sqrt(diff) / std::max(1e-300, std::sqrt(na) + std::sqrt(nb));
}

Outcome gradient_checks() {
    const auto t0 = std::chrono::steady_clock::now();
    constexpr std::size_t D = 20;
    constexpr std::size_t F = 15;
    constexpr std::size_t C = 4;
    constexpr double h = 1e-6;
    double worst_lr = 0.0;
    double worst_ann = 0.0;
    for (std::uint64_t instance = 0; instance < 5; ++instance) {
        Rng rng(100 + instance);
        const auto X = testing::random_sparse(rng, D, F, 0.5);
        std::vector<int> y(D);
        for (auto& v : y) v = static_cast<int>(rng.below(C));

        std::vector<double> w((F + 1) * C);
        for (auto& v : w) v = rng.uniform(-1.0, 1.0);
        std::vector<double> grad(w.size());
        std::vector<double> scratch(w.size());
        std::vector<double> numeric(w.size());
        detail::logistic_objective(X, y, C, 1.0, w, grad);
        for (std::size_t k = 0; k < w.size(); ++k) {
            auto p = w;
            p[k] += h;
            const double up = detail::logistic_objective(X, y, C, 1.0, p, scratch);
            p[k] -= 2 * h;
            numeric[k] = (up - detail::logistic_objective(X, y, C, 1.0, p, scratch)) / (2 * h);
        }
        worst_lr = std::max(worst_lr, relative_error(grad, numeric));

        detail::Mlp net({F, 100, 50, C}, instance);
        std::vector<std::size_t> rows(D);
        std::iota(rows.begin(), rows.end(), 0);
        std::vector<double> g(net.parameters().size());
        std::vector<double> gs(g.size());
        std::vector<double> gn(g.size());
        net.loss_and_gradient(X, rows, y, 1e-4, g);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double saved = net.parameters()[k];
            net.parameters()[k] = saved + h;
            const double up = net.loss_and_gradient(X, rows, y, 1e-4, gs);
            net.parameters()[k] = saved - h;
            const double down = net.loss_and_gradient(X, rows, y, 1e-4, gs);
            net.parameters()[k] = saved;
            gn[k] = (up - down) / (2 * h);
        }
        worst_ann = std::max(worst_ann, relative_error(g, gn));
    }
    const double elapsed = seconds_since(t0);
    return check(worst_lr < 1e-5 && worst_ann < 1e-4 && elapsed < 30.0,
                 fmt::format("LR {:.2e}, ANN {:.2e}, {:.1f} s", worst_lr, worst_ann, elapsed));
}

// ---- 5 -------------------------------------------------------------------

Outcome knn_oracle() {
    std::size_t compared = 0;
    for (std::uint64_t instance = 0; instance < 100; ++instance) {
        Rng rng(500 + instance);
        const std::size_t n_train = 15 + rng.below(30);
        const std::size_t n_test = 5;
        const std::size_t C = 2 + rng.below(3);
        const auto train = testing::random_sparse(rng, n_train, 12, 0.35);
        const auto test = testing::random_sparse(rng, n_test, 12, 0.35);
        std::vector<std::string> y;
        for (std::size_t i = 0; i < n_train; ++i) y.push_back(fmt::format("c{}", i < C ? i : rng.below(C)));
        for (int k : {3, 5, 7, 9, 11}) {
            ModelConfig config;
            config.algorithm = Algorithm::KNN;
            config.k_neighbors = k;
            const auto model = fit(config, train, y);
            const auto got = predict(model, test);
            for (std::size_t q = 0; q < n_test; ++q) {
                // Exhaustive reference: dense distances, full stable sort.
                const auto qd = test.dense_row(q);
                std::vector<std::pair<double, std::size_t>> dist;
                for (std::size_t i = 0; i < n_train; ++i) {
                    const auto td = train.dense_row(i);
                    double s = 0.0;
                    for (std::size_t f = 0; f < qd.size(); ++f) s += (qd[f] - td[f]) * (qd[f] - td[f]);
                    dist.emplace_back(s, i);
                }
                std::sort(dist.begin(), dist.end());
                std::map<std::string, std::pair<int, double>> votes;
                for (int j = 0; j < std::min<int>(k, static_cast<int>(n_train)); ++j) {
                    auto& v = votes[y[dist[j].second]];
                    ++v.first;
                    v.second += std::sqrt(dist[j].first);
                }
                std::string best;
                std::pair<int, double> best_vote{-1, 0.0};
                for (const auto& [label, v] : votes) {  // map order = class index order
                    if (v.first > best_vote.first || (v.first == best_vote.first && v.second < best_vote.second)) {
                        best = label;
                        best_vote = v;
                    }
                }
                if (got[q] != best) {
                    return fail(fmt::format("instance {} k {} query {}: {} vs reference {}", instance, k, q, got[q], best));
                }
                ++compared;
            }
        }
    }
    return pass(fmt::format("{} predictions identical", compared));
}

// ---- 6 -------------------------------------------------------------------

Outcome tree_purity_and_forest() {
    for (std::uint64_t instance = 0; instance < 20; ++instance) {
        Rng rng(600 + instance);
        const auto X = testing::random_sparse(rng, 40 + rng.below(60), 10 + rng.below(20), 0.3, true, true);
        std::vector<std::string> y;
        for (std::size_t i = 0; i < X.rows(); ++i) y.push_back(fmt::format("c{}", rng.below(4)));
        ModelConfig dt;
        dt.algorithm = Algorithm::DT;
        dt.seed = instance;
        const auto tree_model = fit(dt, X, y);
        if (predict(tree_model, X) != y) return fail(fmt::format("instance {}: DT training accuracy < 1", instance));

        ModelConfig rf = dt;
        rf.algorithm = Algorithm::RF;
        rf.n_trees = 1;
        rf.bootstrap = false;
        rf.max_features = X.n_cols;
        const auto forest_model = fit(rf, X, y);
        const auto& a = std::get<TreeParams>(tree_model.params).tree.nodes;
        const auto& b = std::get<ForestParams>(forest_model.params).trees.at(0).nodes;
        bool same = a.size() == b.size();
        for (std::size_t k = 0; same && k < a.size(); ++k) {
            same = a[k].feature == b[k].feature && a[k].threshold == b[k].threshold && a[k].left == b[k].left &&
                   a[k].right == b[k].right && a[k].class_weights == b[k].class_weights;
        }
        if (!same) return fail(fmt::format("instance {}: single-tree forest differs from DT", instance));
        if (decision_scores(tree_model, X) != decision_scores(forest_model, X)) {
            return fail(fmt::format("instance {}: scores differ", instance));
        }
    }
    return pass("20 random data sets");
}

// ---- 7 -------------------------------------------------------------------

Outcome grid_determinism() {
    testing::SyntheticOptions o;
    o.authors = 3;
    o.docs_per_author = 12;
    o.min_length = 300;
    o.max_length = 500;
    const auto corpus = testing::synthetic_corpus(o);
    ExperimentGrid grid;
    grid.ngram_sizes = {3};
    grid.knn_k = {5};
    grid.model_seeds = {42};
    grid.split_seeds = {42};
    grid.base.n_trees = 20;
    const auto dir = testing::scratch_dir("acceptance-determinism");
    RunOptions first;
    first.log_path = dir / "first.jsonl";
    RunOptions second;
    second.log_path = dir / "second.jsonl";
    second.jobs = 2;
    run_grid(corpus, grid, first);
    run_grid(corpus, grid, second);
    const auto a = slurp(dir / "first.jsonl");
    const auto b = slurp(dir / "second.jsonl");
    const auto lines = std::count(a.begin(), a.end(), '\n');
    return check(!a.empty() && a == b, fmt::format("{} log lines, byte-identical: {}", lines, a == b));
}

// ---- 8 -------------------------------------------------------------------

Outcome synthetic_end_to_end() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto corpus = testing::synthetic_corpus();
    ExperimentGrid grid;
    grid.casings = {Casing::Lower};
    grid.ngram_sizes = {3};
    grid.knn_k = {grid.base.k_neighbors};
    grid.model_seeds = {grid.base.seed};
    grid.split_seeds = {42};
    const auto results = run_grid(corpus, grid);
    const double elapsed = seconds_since(t0);
    bool ok = elapsed < 60.0;
    std::string detail;
    for (const auto& r : results) {
        const double floor = r.coordinate.algorithm == Algorithm::KNN ? 0.80 : 0.90;
        ok = ok && r.report.macro_accuracy >= floor;
        detail += fmt::format("{} {:.3f}, ", to_string(r.coordinate.algorithm), r.report.macro_accuracy);
    }
    return check(ok && results.size() == 6, detail + fmt::format("{:.1f} s", elapsed));
}

// ---- 9-12 ----------------------------------------------------------------

struct RostRun {
    Corpus corpus;
    ExperimentGrid grid;
    std::vector<RunResult> results;
};

const char* rost_dir() { return std::getenv("STYLO_ROST_DIR"); }

const RostRun& rost_run() {
    static const RostRun run = [] {
        RostRun r{load_corpus(rost_dir()), {}, {}};
        if (const char* g = std::getenv("STYLO_ROST_GRID"); g != nullptr && std::string(g) == "reduced") {
            r.grid.ngram_sizes = {2, 3};
            r.grid.split_seeds = {7, 17};
        }
        RunOptions options;
        options.jobs = default_jobs();
        if (const char* out = std::getenv("STYLO_ROST_OUT")) {
            std::filesystem::create_directories(out);
            options.log_path = std::filesystem::path(out) / "results.jsonl";
            options.resume = true;
        }
        r.results = run_grid(r.corpus, r.grid, options);
        return r;
    }();
    return run;
}

Outcome table2_ordering() {
    if (rost_dir() == nullptr) return skip("STYLO_ROST_DIR not set");
    const auto& run = rost_run();
    std::map<Algorithm, double> macc;
    for (const auto& a : aggregate(run.results, {Axis::Algorithm})) macc[*a.algorithm] = a.macc_mean;
    const std::vector<Algorithm> expected{Algorithm::ANN, Algorithm::RF, Algorithm::SVM,
                                          Algorithm::LR,  Algorithm::DT, Algorithm::KNN};
    std::string detail;
    for (Algorithm a : expected) detail += fmt::format("{} {:.3f} ", to_string(a), macc[a]);
    for (std::size_t i = 0; i < expected.size(); ++i) {
        for (std::size_t j = i + 1; j < expected.size(); ++j) {
            const double gap = macc[expected[j]] - macc[expected[i]];
            if (gap > 0.0 && (j != i + 1 || gap >= 0.03)) {
                return fail(detail + fmt::format("- {} above {}", to_string(expected[j]), to_string(expected[i])));
            }
        }
    }
    return pass(detail);
}

Outcome table3_values() {
    if (rost_dir() == nullptr) return skip("STYLO_ROST_DIR not set");
    const auto& run = rost_run();
    std::optional<double> ann5;
    std::optional<double> rf2;
    for (const auto& a : aggregate(run.results, {Axis::Algorithm, Axis::Ngram, Axis::Casing})) {
        if (a.casing != Casing::Lower) continue;
        if (a.algorithm == Algorithm::ANN && a.n == 5) ann5 = a.macc_mean;
        if (a.algorithm == Algorithm::RF && a.n == 2) rf2 = a.macc_mean;
    }
    if (!ann5 || !rf2) return skip("grid lacks lowercase ANN n=5 or RF n=2");
    return check(std::abs(*ann5 - 0.954) <= 0.05 && std::abs(*rf2 - 0.919) <= 0.05,
                 fmt::format("ANN 5-gram {:.3f} (0.954), RF 2-gram {:.3f} (0.919)", *ann5, *rf2));
}

Outcome casing_effect() {
    if (rost_dir() == nullptr) return skip("STYLO_ROST_DIR not set");
    const auto& run = rost_run();
    double worst = 0.0;
    std::string where;
    for (const auto& d : casing_diff(aggregate(run.results, {Axis::Algorithm, Axis::Ngram, Axis::Casing}))) {
        if (std::abs(d.diff) > worst) {
            worst = std::abs(d.diff);
            where = fmt::format("{} n={}", to_string(d.algorithm), d.n);
        }
    }
    return check(worst <= 0.05, fmt::format("max |diff| {:.3f} at {}", worst, where));
}

Outcome seed_stability() {
    if (rost_dir() == nullptr) return skip("STYLO_ROST_DIR not set");
    const auto& run = rost_run();
    auto split = best_split_seed(run.results, Algorithm::ANN, 5);
    if (!split) split = best_split_seed(run.results, Algorithm::ANN, run.grid.ngram_sizes.back());
    const std::vector<Casing> casings{Casing::Lower, Casing::Original};
    const auto study = seed_stability_study(run.corpus, split.value_or(run.grid.split_seeds.front()), casings,
                                            kStabilitySeeds, 5, run.grid.train_fraction, run.grid.base, default_jobs());
    const auto& pooled = study.summary.back();
    return check(pooled.macc_std <= 0.04,
                 fmt::format("std {:.4f} (lower {:.4f}, original {:.4f}), perfect runs {}", pooled.macc_std,
                             study.summary[0].macc_std, study.summary[1].macc_std, pooled.n_perfect));
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"metrics oracle equivalence", metrics_oracle},
        {"tf-idf hand check", tfidf_hand_check},
        {"n-gram count conservation", ngram_conservation},
        {"LR and ANN gradient checks", gradient_checks},
        {"k-NN exhaustive-sort oracle", knn_oracle},
        {"DT purity, single-tree RF equals DT", tree_purity_and_forest},
        {"grid determinism", grid_determinism},
        {"synthetic corpus end to end", synthetic_end_to_end},
        {"model ordering by macro-accuracy", table2_ordering},
        {"lowercase ANN 5-gram and RF 2-gram", table3_values},
        {"casing effect bound", casing_effect},
        {"ANN seed stability", seed_stability},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = fail(std::string("exception: ") + e.what());
        }
        const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
        failures += o.status == Status::Fail;
        fmt::print("{} {:2} {} [{:.2f} s] {}\n", tag, i + 1, criteria[i].first, seconds_since(t0), o.detail);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
