#include "stylo/experiment.hpp"

#include "stylo/errors.hpp"
#include "stylo/features.hpp"
#include "stylo/log.hpp"
#include "stylo/parallel.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <tuple>

namespace fs = std::filesystem;
using nlohmann::json;

namespace stylo {
namespace {

struct PreparedData {
    FeatureMatrix train;
    FeatureMatrix test;
    std::vector<std::string> y_train;
    std::vector<std::string> y_test;
};

PreparedData prepare(const Corpus& corpus, const Split& split, Casing casing, int n) {
    const auto encode_ids = [&](const std::vector<std::string>& ids, std::vector<EncodedText>& docs,
                                std::vector<std::string>& labels) {
        for (const auto& id : ids) {
            const auto& d = corpus.documents()[corpus.index_of(id)];
            docs.push_back(preprocess(d.raw_text, casing));
            labels.push_back(d.author);
        }
    };
    PreparedData data;
    std::vector<EncodedText> train_docs;
    std::vector<EncodedText> test_docs;
    encode_ids(split.train_ids, train_docs, data.y_train);
    encode_ids(split.test_ids, test_docs, data.y_test);
    const auto model = fit_vectorizer(train_docs, n);
    data.train = transform(model, train_docs, split.train_ids);
    data.test = transform(model, test_docs, split.test_ids);
    return data;
}

RunResult evaluate(const PreparedData& data, const ModelConfig& config, const Coordinate& coord,
                   const std::vector<std::string>& labels) {
    const auto start = std::chrono::steady_clock::now();
    const auto model = fit(config, data.train, data.y_train);
    const auto predicted = predict(model, data.test);
    RunResult r;
    r.coordinate = coord;
    r.confusion = confusion_matrix(data.y_test, predicted, labels);
    r.report = report(r.confusion);
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed: " + path.string());
}

void rewrite_log(const fs::path& path, std::span<const RunResult> results) {
    const fs::path tmp = path.string() + ".tmp";
    std::string content;
    for (const auto& r : results) content += to_log_line(r) + "\n";
    write_file(tmp, content);
    fs::rename(tmp, path);
}

std::string opt_or_all(bool has, const std::string& value) { return has ? value : "all"; }

}  // namespace

void ExperimentGrid::validate() const {
    if (casings.empty() || ngram_sizes.empty() || algorithms.empty() || split_seeds.empty()) {
        throw InvalidArgument("experiment grid has an empty axis");
    }
    for (int n : ngram_sizes) {
        if (n < kMinNgram || n > kMaxNgram) throw InvalidArgument(fmt::format("n-gram size {} outside [2,5]", n));
    }
    for (Algorithm a : algorithms) {
        if (variations(a).empty()) {
            throw InvalidArgument(fmt::format("no variation values for {}", to_string(a)));
        }
    }
    for (int k : knn_k) {
        if (k < 1 || k % 2 == 0) throw InvalidArgument(fmt::format("k must be odd and >= 1, got {}", k));
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InvalidArgument("train fraction must lie in (0,1)");
}

std::vector<std::uint64_t> ExperimentGrid::variations(Algorithm algorithm) const {
    switch (algorithm) {
        case Algorithm::SVM:
        case Algorithm::LR: return {0};
        case Algorithm::KNN: return {knn_k.begin(), knn_k.end()};
        case Algorithm::DT:
        case Algorithm::RF:
        case Algorithm::ANN: return model_seeds;
    }
    return {};
}

std::string describe(const Coordinate& c) {
    return fmt::format("casing={} n={} model={} variation={} split_seed={}", to_string(c.casing), c.n,
                       to_string(c.algorithm), c.variation, c.split_seed);
}

std::vector<Coordinate> coordinates(const ExperimentGrid& grid) {
    std::set<Coordinate> out;
    for (Casing casing : grid.casings) {
        for (int n : grid.ngram_sizes) {
            for (Algorithm a : grid.algorithms) {
                for (auto v : grid.variations(a)) {
                    for (auto s : grid.split_seeds) out.insert({casing, n, a, v, s});
                }
            }
        }
    }
    return {out.begin(), out.end()};
}

ModelConfig model_config(const ExperimentGrid& grid, const Coordinate& c) {
    ModelConfig config = grid.base;
    config.algorithm = c.algorithm;
    if (c.algorithm == Algorithm::KNN) config.k_neighbors = static_cast<int>(c.variation);
    if (c.algorithm == Algorithm::DT || c.algorithm == Algorithm::RF || c.algorithm == Algorithm::ANN) {
        config.seed = c.variation;
    }
    return config;
}

std::string to_log_line(const RunResult& r) {
    const auto& c = r.coordinate;
    const json j{{"schema", kResultsSchema},
                 {"casing", std::string(to_string(c.casing))},
                 {"n", c.n},
                 {"algorithm", std::string(to_string(c.algorithm))},
                 {"variation", c.variation},
                 {"split_seed", c.split_seed},
                 {"labels", r.confusion.class_labels},
                 {"confusion", r.confusion.counts},
                 {"accuracy", r.report.accuracy},
                 {"macro_accuracy", r.report.macro_accuracy},
                 {"macro_precision", r.report.macro_precision},
                 {"macro_recall", r.report.macro_recall},
                 {"macro_f1", r.report.macro_f1}};
    return j.dump();
}

RunResult from_log_line(const std::string& line) {
    try {
        const json j = json::parse(line);
        if (j.at("schema").get<int>() != kResultsSchema) throw FormatError("results log schema mismatch");
        RunResult r;
        r.coordinate.casing = parse_casing(j.at("casing").get<std::string>());
        r.coordinate.n = j.at("n").get<int>();
        r.coordinate.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
        r.coordinate.variation = j.at("variation").get<std::uint64_t>();
        r.coordinate.split_seed = j.at("split_seed").get<std::uint64_t>();
        r.confusion.class_labels = j.at("labels").get<std::vector<std::string>>();
        r.confusion.counts = j.at("confusion").get<std::vector<std::vector<std::size_t>>>();
        if (r.confusion.counts.size() != r.confusion.class_labels.size()) throw FormatError("confusion shape");
        for (const auto& row : r.confusion.counts) {
            if (row.size() != r.confusion.class_labels.size()) throw FormatError("confusion shape");
        }
        r.report = report(r.confusion);
        return r;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed results log line: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("invalid results log line: ") + e.what());
    }
}

std::vector<RunResult> read_results_log(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read results log " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    std::vector<RunResult> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        try {
            out.push_back(from_log_line(lines[i]));
        } catch (const FormatError&) {
            // A run killed mid-write leaves a truncated final line.
            if (i + 1 == lines.size()) {
                log().warn("ignoring truncated final line in {}", path.string());
                break;
            }
            throw;
        }
    }
    return out;
}

std::vector<RunResult> run_grid(const Corpus& corpus, const ExperimentGrid& grid, const RunOptions& options) {
    grid.validate();
    const auto coords = coordinates(grid);

    std::map<Coordinate, RunResult> done;
    if (options.log_path) {
        if (options.resume && fs::exists(*options.log_path)) {
            for (auto& r : read_results_log(*options.log_path)) done[r.coordinate] = std::move(r);
            // Drop any partial trailing line before appending.
            std::vector<RunResult> kept;
            for (const auto& [c, r] : done) kept.push_back(r);
            rewrite_log(*options.log_path, kept);
            log().info("resuming: {} runs already logged", done.size());
        } else {
            write_file(*options.log_path, "");
        }
    }
    if (options.timings_path && (!options.resume || !fs::exists(*options.timings_path))) {
        write_file(*options.timings_path, "casing,n,model,variation,split_seed,seconds\n");
    }

    std::map<std::uint64_t, Split> splits;
    for (auto s : grid.split_seeds) splits.emplace(s, stratified_split(corpus, grid.train_fraction, s));

    // Work units share one vectorizer: (split seed, casing, n).
    std::map<std::tuple<std::uint64_t, Casing, int>, std::vector<Coordinate>> groups;
    for (const auto& c : coords) {
        if (!done.contains(c)) groups[{c.split_seed, c.casing, c.n}].push_back(c);
    }
    std::vector<std::pair<std::tuple<std::uint64_t, Casing, int>, std::vector<Coordinate>>> units(groups.begin(),
                                                                                                  groups.end());

    std::mutex mutex;
    std::size_t new_runs = 0;
    std::map<Coordinate, RunResult> fresh;
    parallel_for(units.size(), options.jobs, [&](std::size_t u) {
        const auto& [key, unit_coords] = units[u];
        const auto& [split_seed, casing, n] = key;
        PreparedData data;
        try {
            data = prepare(corpus, splits.at(split_seed), casing, n);
        } catch (const std::exception& e) {
            throw Error(fmt::format("preparing split_seed={} casing={} n={}: {}", split_seed, to_string(casing), n,
                                    e.what()));
        }
        for (const auto& c : unit_coords) {
            {
                std::lock_guard lock(mutex);
                if (options.stop_after && new_runs >= *options.stop_after) throw Interrupted("stopped after limit");
            }
            RunResult r;
            try {
                r = evaluate(data, model_config(grid, c), c, corpus.authors());
            } catch (const std::exception& e) {
                throw Error(fmt::format("run {} failed: {}", describe(c), e.what()));
            }
            std::lock_guard lock(mutex);
            if (options.log_path) {
                std::ofstream out(*options.log_path, std::ios::binary | std::ios::app);
                out << to_log_line(r) << '\n';
                if (!out) throw Error("cannot append to results log " + options.log_path->string());
            }
            if (options.timings_path) {
                std::ofstream out(*options.timings_path, std::ios::binary | std::ios::app);
                out << fmt::format("{},{},{},{},{},{:.6f}\n", to_string(c.casing), c.n, to_string(c.algorithm),
                                   c.variation, c.split_seed, r.wall_time);
            }
            log().info("done {} macc={:.4f} ({:.2f}s)", describe(c), r.report.macro_accuracy, r.wall_time);
            if (options.on_result) options.on_result(r);
            ++new_runs;
            fresh.emplace(c, std::move(r));
        }
    });

    for (auto& [c, r] : fresh) done[c] = std::move(r);
    std::vector<RunResult> all;
    all.reserve(done.size());
    for (auto& [c, r] : done) all.push_back(r);
    if (options.log_path) rewrite_log(*options.log_path, all);

    std::vector<RunResult> out;
    out.reserve(coords.size());
    for (const auto& c : coords) out.push_back(done.at(c));
    return out;
}

std::vector<AggregateResult> aggregate(std::span<const RunResult> results, const std::set<Axis>& group_by) {
    if (results.empty()) throw InvalidArgument("aggregate: no results");
    using Key = std::tuple<std::optional<Algorithm>, std::optional<int>, std::optional<Casing>,
                           std::optional<std::uint64_t>, std::optional<std::uint64_t>>;
    std::map<Key, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& r : results) {
        const auto& c = r.coordinate;
        Key key{group_by.contains(Axis::Algorithm) ? std::optional(c.algorithm) : std::nullopt,
                group_by.contains(Axis::Ngram) ? std::optional(c.n) : std::nullopt,
                group_by.contains(Axis::Casing) ? std::optional(c.casing) : std::nullopt,
                group_by.contains(Axis::Variation) ? std::optional(c.variation) : std::nullopt,
                group_by.contains(Axis::SplitSeed) ? std::optional(c.split_seed) : std::nullopt};
        auto& g = groups[key];
        g.first.push_back(r.report.macro_accuracy);
        g.second.push_back(r.report.accuracy);
    }
    std::vector<AggregateResult> out;
    for (const auto& [key, values] : groups) {
        AggregateResult a;
        std::tie(a.algorithm, a.n, a.casing, a.variation, a.split_seed) = key;
        std::tie(a.macc_mean, a.macc_std) = aggregate_mean_std(values.first);
        std::tie(a.acc_mean, a.acc_std) = aggregate_mean_std(values.second);
        a.n_runs = values.first.size();
        out.push_back(a);
    }
    return out;
}

std::string aggregate_csv(std::span<const AggregateResult> rows) {
    std::string out = "model,n,casing,macc_mean,macc_std,acc_mean,acc_std,n_runs\n";
    for (const auto& a : rows) {
        out += fmt::format("{},{},{},{},{},{},{},{}\n",
                           opt_or_all(a.algorithm.has_value(), a.algorithm ? std::string(to_string(*a.algorithm)) : ""),
                           opt_or_all(a.n.has_value(), a.n ? std::to_string(*a.n) : ""),
                           opt_or_all(a.casing.has_value(), a.casing ? std::string(to_string(*a.casing)) : ""),
                           a.macc_mean, a.macc_std, a.acc_mean, a.acc_std, a.n_runs);
    }
    return out;
}

std::vector<CasingDiff> casing_diff(std::span<const AggregateResult> aggregates) {
    std::map<std::pair<Algorithm, int>, std::pair<std::optional<double>, std::optional<double>>> arms;
    for (const auto& a : aggregates) {
        if (!a.algorithm || !a.n || !a.casing) {
            throw InvalidArgument("casing_diff needs aggregates grouped by algorithm, n and casing");
        }
        auto& arm = arms[{*a.algorithm, *a.n}];
        (*a.casing == Casing::Lower ? arm.first : arm.second) = a.macc_mean;
    }
    std::vector<CasingDiff> out;
    for (const auto& [key, arm] : arms) {
        if (!arm.first || !arm.second) {
            throw InvalidArgument(fmt::format("casing_diff: {} n={} is missing the {} arm", to_string(key.first),
                                              key.second, arm.first ? "original" : "lower"));
        }
        out.push_back({key.first, key.second, *arm.first, *arm.second, *arm.first - *arm.second});
    }
    return out;
}

std::string casing_diff_csv(std::span<const CasingDiff> diffs) {
    std::string out = "model,n,macc_lower,macc_original,diff\n";
    for (const auto& d : diffs) {
        out += fmt::format("{},{},{},{},{}\n", to_string(d.algorithm), d.n, d.macc_lower, d.macc_original, d.diff);
    }
    return out;
}

std::string macc_by_n_csv(std::span<const AggregateResult> aggregates) {
    std::string out = "model,casing,n,macc_mean,macc_std\n";
    for (const auto& a : aggregates) {
        if (!a.algorithm || !a.n || !a.casing) {
            throw InvalidArgument("macc_by_n_csv needs aggregates grouped by algorithm, n and casing");
        }
        out += fmt::format("{},{},{},{},{}\n", to_string(*a.algorithm), to_string(*a.casing), *a.n, a.macc_mean,
                           a.macc_std);
    }
    return out;
}

std::optional<std::uint64_t> best_split_seed(std::span<const RunResult> results, Algorithm algorithm, int n) {
    std::vector<RunResult> selected;
    for (const auto& r : results) {
        if (r.coordinate.algorithm == algorithm && r.coordinate.n == n) selected.push_back(r);
    }
    if (selected.empty()) return std::nullopt;
    std::optional<std::uint64_t> best;
    double best_macc = -1.0;
    for (const auto& a : aggregate(selected, {Axis::SplitSeed})) {
        if (a.macc_mean > best_macc) {
            best_macc = a.macc_mean;
            best = a.split_seed;
        }
    }
    return best;
}

void write_tables(std::span<const RunResult> results, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    write_file(out_dir / "table2.csv", aggregate_csv(aggregate(results, {Axis::Algorithm})));

    const auto by_model_n_casing = aggregate(results, {Axis::Algorithm, Axis::Ngram, Axis::Casing});
    for (auto [casing, name] : {std::pair{Casing::Lower, "table3.csv"}, std::pair{Casing::Original, "table4.csv"}}) {
        std::vector<AggregateResult> rows;
        for (const auto& a : by_model_n_casing) {
            if (a.casing == casing) rows.push_back(a);
        }
        if (!rows.empty()) write_file(out_dir / name, aggregate_csv(rows));
    }

    const bool both = std::ranges::any_of(results, [](const RunResult& r) { return r.coordinate.casing == Casing::Lower; }) &&
                      std::ranges::any_of(results, [](const RunResult& r) { return r.coordinate.casing == Casing::Original; });
    if (both) write_file(out_dir / "fig2_casing_diff.csv", casing_diff_csv(casing_diff(by_model_n_casing)));
    write_file(out_dir / "fig3_macc_by_n.csv", macc_by_n_csv(by_model_n_casing));
}

StabilityStudy seed_stability_study(const Corpus& corpus, std::uint64_t split_seed, std::span<const Casing> casings,
                                    std::span<const std::uint64_t> seeds, int n, double train_fraction,
                                    const ModelConfig& base, unsigned jobs) {
    if (casings.empty() || seeds.empty()) throw InvalidArgument("stability study needs casings and seeds");
    const Split split = stratified_split(corpus, train_fraction, split_seed);
    std::vector<PreparedData> data;
    for (Casing c : casings) data.push_back(prepare(corpus, split, c, n));

    StabilityStudy study;
    study.runs.resize(casings.size() * seeds.size());
    parallel_for(study.runs.size(), jobs, [&](std::size_t k) {
        const std::size_t ci = k / seeds.size();
        const std::uint64_t seed = seeds[k % seeds.size()];
        ModelConfig config = base;
        config.algorithm = Algorithm::ANN;
        config.seed = seed;
        const Coordinate coord{casings[ci], n, Algorithm::ANN, seed, split_seed};
        const auto r = evaluate(data[ci], config, coord, corpus.authors());
        study.runs[k] = {casings[ci], seed, r.report.macro_accuracy, r.report.accuracy};
    });

    auto summarize = [&](std::optional<Casing> casing) {
        std::vector<double> macc;
        StabilitySummary s;
        s.casing = casing;
        for (const auto& r : study.runs) {
            if (casing && r.casing != *casing) continue;
            macc.push_back(r.macc);
            if (r.macc == 1.0) ++s.n_perfect;
        }
        std::tie(s.macc_mean, s.macc_std) = aggregate_mean_std(macc);
        s.n_runs = macc.size();
        return s;
    };
    for (Casing c : casings) study.summary.push_back(summarize(c));
    study.summary.push_back(summarize(std::nullopt));
    return study;
}

std::string stability_csv(const StabilityStudy& study) {
    std::string out = "casing,seed,macc,acc\n";
    for (const auto& r : study.runs) out += fmt::format("{},{},{},{}\n", to_string(r.casing), r.seed, r.macc, r.acc);
    return out;
}

std::string stability_summary_csv(const StabilityStudy& study) {
    std::string out = "casing,macc_mean,macc_std,n_perfect,n_runs\n";
    for (const auto& s : study.summary) {
        out += fmt::format("{},{},{},{},{}\n", s.casing ? std::string(to_string(*s.casing)) : "all", s.macc_mean,
                           s.macc_std, s.n_perfect, s.n_runs);
    }
    return out;
}

}  // namespace stylo
