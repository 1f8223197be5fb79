// stylo-attr: command-line front end for the authorship-attribution pipeline.
//
// Exit codes: 0 success, 2 usage/config/input-format errors, 3 runtime
// failures. Results go to stdout or files; diagnostics go to stderr.

#include "stylo/classifiers.hpp"
#include "stylo/corpus.hpp"
#include "stylo/errors.hpp"
#include "stylo/experiment.hpp"
#include "stylo/features.hpp"
#include "stylo/log.hpp"
#include "stylo/parallel.hpp"
#include "stylo/run_config.hpp"
#include "stylo/unicode.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace fs = std::filesystem;
using namespace stylo;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

/// Errors that map to exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Error("cannot write " + path.string());
}

nlohmann::json read_json(const fs::path& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::vector<Casing> parse_casings(const std::vector<std::string>& names) {
    std::vector<Casing> out;
    for (const auto& n : names) out.push_back(parse_casing(n));
    return out;
}

// ---- stats ------------------------------------------------------------

struct StatsArgs {
    fs::path corpus;
};

void cmd_stats(const StatsArgs& a) { std::cout << stats_csv(corpus_stats(load_corpus(a.corpus))); }

// ---- preprocess -------------------------------------------------------

struct PreprocessArgs {
    std::string casing = "lower";
};

void cmd_preprocess(const PreprocessArgs& a) {
    const std::string input{std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    if (!unicode::is_valid(input)) throw UsageError("standard input is not valid UTF-8");
    std::cout << preprocess(input, parse_casing(a.casing)).text << '\n';
}

// ---- run ----------------------------------------------------------------

struct RunArgs {
    std::optional<fs::path> config;
    std::optional<fs::path> corpus;
    std::optional<fs::path> out;
    std::vector<int> ngram;
    std::vector<std::string> casings;
    std::vector<std::string> models;
    std::vector<std::uint64_t> split_seeds;
    std::optional<unsigned> jobs;
    bool resume = false;
};

void cmd_run(const RunArgs& a) {
    RunConfig config;
    try {
        if (a.config) config = load_run_config(*a.config);
        if (a.corpus) config.corpus_dir = *a.corpus;
        if (a.out) config.output_dir = *a.out;
        if (!a.ngram.empty()) config.grid.ngram_sizes = a.ngram;
        if (!a.casings.empty()) config.grid.casings = parse_casings(a.casings);
        if (!a.models.empty()) {
            config.grid.algorithms.clear();
            for (const auto& m : a.models) config.grid.algorithms.push_back(parse_algorithm(m));
        }
        if (!a.split_seeds.empty()) config.grid.split_seeds = a.split_seeds;
        if (a.jobs) config.jobs = *a.jobs;
        if (!config.corpus_dir) throw UsageError("no corpus given (--corpus or 'corpus' in the config file)");
        if (!config.output_dir) throw UsageError("no output directory given (--out or 'out' in the config file)");
        config.grid.validate();
        fs::create_directories(*config.output_dir);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    } catch (const fs::filesystem_error& e) {
        throw UsageError(e.what());
    }

    const auto corpus = load_corpus(*config.corpus_dir);
    const auto n_coords = coordinates(config.grid).size();
    RunOptions options;
    options.jobs = config.jobs.value_or(default_jobs());
    options.log_path = *config.output_dir / "results.jsonl";
    options.timings_path = *config.output_dir / "timings.csv";
    options.resume = a.resume;
    std::size_t done = 0;
    options.on_result = [&](const RunResult& r) {
        ++done;
        log().info("[{}] {}", done, describe(r.coordinate));
    };
    log().info("{} documents, {} authors, {} runs", corpus.size(), corpus.authors().size(), n_coords);
    const auto results = run_grid(corpus, config.grid, options);
    write_tables(results, *config.output_dir);
    std::cout << aggregate_csv(aggregate(results, {Axis::Algorithm}));
}

// ---- train / predict ------------------------------------------------------

struct TrainArgs {
    fs::path corpus;
    std::string model = "svm";
    int n = 3;
    std::string casing = "lower";
    int k = 5;
    std::uint64_t seed = 42;
    fs::path model_out;
    fs::path vectorizer_out;
};

void cmd_train(const TrainArgs& a) {
    ModelConfig config;
    Casing casing;
    try {
        config.algorithm = parse_algorithm(a.model);
        config.k_neighbors = a.k;
        config.seed = a.seed;
        config.validate();
        casing = parse_casing(a.casing);
        if (a.n < kMinNgram || a.n > kMaxNgram) throw InvalidArgument("--ngram must lie in 2..5");
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    const auto corpus = load_corpus(a.corpus);
    std::vector<EncodedText> docs;
    std::vector<std::string> ids;
    std::vector<std::string> labels;
    for (const auto& d : corpus.documents()) {
        docs.push_back(preprocess(d.raw_text, casing));
        ids.push_back(d.id);
        labels.push_back(d.author);
    }
    const auto [vectorizer, X] = fit_transform(docs, NGramRange{a.n, a.n}, ids);
    const auto model = fit(config, X, labels);
    write_file(a.model_out, to_json(model).dump() + "\n");
    write_file(a.vectorizer_out, to_json(vectorizer).dump() + "\n");
    log().info("trained {} on {} documents, {} features", to_string(config.algorithm), corpus.size(), X.n_cols);
}

struct PredictArgs {
    fs::path model;
    fs::path vectorizer;
    fs::path text;
};

void cmd_predict(const PredictArgs& a) {
    const auto model = model_from_json(read_json(a.model));
    const auto vectorizer = vectorizer_from_json(read_json(a.vectorizer));
    if (vectorizer.n_features() != model.n_features) {
        throw FormatError(fmt::format("vectorizer has {} features but the model expects {}", vectorizer.n_features(),
                                      model.n_features));
    }
    const auto raw = read_file(a.text);
    if (!unicode::is_valid(raw)) throw UsageError(a.text.string() + " is not valid UTF-8");
    const std::vector<EncodedText> docs{preprocess(raw, vectorizer.casing())};
    std::cout << predict(model, transform(vectorizer, docs)).at(0) << '\n';
}

// ---- seeds ----------------------------------------------------------------

struct SeedsArgs {
    fs::path corpus;
    fs::path out;
    std::uint64_t split_seed = 42;
    int n = 5;
    std::vector<std::string> casings{"lower", "original"};
    std::vector<std::uint64_t> seeds{kStabilitySeeds};
    std::optional<unsigned> jobs;
};

void cmd_seeds(const SeedsArgs& a) {
    std::vector<Casing> casings;
    try {
        casings = parse_casings(a.casings);
        if (a.n < kMinNgram || a.n > kMaxNgram) throw InvalidArgument("--ngram must lie in 2..5");
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    const auto corpus = load_corpus(a.corpus);
    const auto study =
        seed_stability_study(corpus, a.split_seed, casings, a.seeds, a.n, 0.8, {}, a.jobs.value_or(default_jobs()));
    fs::create_directories(a.out);
    write_file(a.out / "fig4_seed_stability.csv", stability_csv(study));
    const auto summary = stability_summary_csv(study);
    write_file(a.out / "seed_stability_summary.csv", summary);
    std::cout << summary;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Character n-gram authorship attribution"};
    app.require_subcommand(1);

    StatsArgs stats;
    auto* s = app.add_subcommand("stats", "Per-author document counts and lengths as CSV");
    s->add_option("corpus", stats.corpus, "Corpus root (<author>/<file>.txt)")->required();

    PreprocessArgs pre;
    auto* p = app.add_subcommand("preprocess", "Normalize and encode standard input");
    p->add_option("--case", pre.casing, "original or lower")->capture_default_str();

    RunArgs run;
    auto* r = app.add_subcommand("run", "Run the experiment grid and write results and tables");
    r->add_option("--config", run.config, "key = value configuration file");
    r->add_option("--corpus", run.corpus, "Corpus root");
    r->add_option("--out", run.out, "Output directory");
    r->add_option("--ngram", run.ngram, "n-gram size (repeatable)")->check(CLI::Range(kMinNgram, kMaxNgram));
    r->add_option("--case", run.casings, "original or lower (repeatable)");
    r->add_option("--model", run.models, "svm, lr, knn, dt, rf or ann (repeatable)");
    r->add_option("--split-seeds", run.split_seeds, "Comma-separated split seeds")->delimiter(',');
    r->add_option("--jobs", run.jobs, "Worker threads (default: logical cores)");
    r->add_flag("--resume", run.resume, "Skip runs already in results.jsonl");

    TrainArgs train;
    auto* t = app.add_subcommand("train", "Fit one model on the whole corpus and save it");
    t->add_option("--corpus", train.corpus, "Corpus root")->required();
    t->add_option("--model", train.model, "Algorithm")->capture_default_str();
    t->add_option("--ngram", train.n, "n-gram size")->capture_default_str();
    t->add_option("--case", train.casing, "original or lower")->capture_default_str();
    t->add_option("--k", train.k, "Neighbours for k-NN")->capture_default_str();
    t->add_option("--seed", train.seed, "Seed for DT, RF and ANN")->capture_default_str();
    t->add_option("--model-out", train.model_out, "Model JSON path")->required();
    t->add_option("--vectorizer-out", train.vectorizer_out, "Vectorizer JSON path")->required();

    PredictArgs pred;
    auto* q = app.add_subcommand("predict", "Print the predicted author of a text file");
    q->add_option("--model", pred.model, "Model JSON")->required();
    q->add_option("--vectorizer", pred.vectorizer, "Vectorizer JSON")->required();
    q->add_option("text", pred.text, "UTF-8 text file")->required();

    SeedsArgs seeds;
    auto* e = app.add_subcommand("seeds", "ANN seed-stability study on one split");
    e->add_option("--corpus", seeds.corpus, "Corpus root")->required();
    e->add_option("--out", seeds.out, "Output directory")->required();
    e->add_option("--split-seed", seeds.split_seed, "Split seed")->capture_default_str();
    e->add_option("--ngram", seeds.n, "n-gram size")->capture_default_str();
    e->add_option("--case", seeds.casings, "Casings (repeatable)");
    e->add_option("--seeds", seeds.seeds, "Comma-separated model seeds")->delimiter(',');
    e->add_option("--jobs", seeds.jobs, "Worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*s) cmd_stats(stats);
        if (*p) cmd_preprocess(pre);
        if (*r) cmd_run(run);
        if (*t) cmd_train(train);
        if (*q) cmd_predict(pred);
        if (*e) cmd_seeds(seeds);
    } catch (const UsageError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitUsage;
    } catch (const CorpusError& err) {
        std::cerr << "corpus error: " << err.what() << '\n';
        return kExitUsage;
    } catch (const FormatError& err) {
        std::cerr << "format error: " << err.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
