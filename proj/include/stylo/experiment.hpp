#pragma once

#include "stylo/classifiers.hpp"
#include "stylo/corpus.hpp"
#include "stylo/metrics.hpp"
#include "stylo/preprocess.hpp"

#include <nlohmann/json_fwd.hpp>

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace stylo {

/// Casing x n-gram size x algorithm x variation x split. The variation axis
/// is k for KNN, the model seed for DT/RF/ANN and a single 0 for SVM/LR.
struct ExperimentGrid {
    std::vector<Casing> casings{Casing::Original, Casing::Lower};
    std::vector<int> ngram_sizes{2, 3, 4, 5};
    std::vector<Algorithm> algorithms{std::begin(kAllAlgorithms), std::end(kAllAlgorithms)};
    std::vector<int> knn_k{3, 5, 7, 9, 11};
    std::vector<std::uint64_t> model_seeds{7, 17, 42, 67, 101};
    std::vector<std::uint64_t> split_seeds{7, 17, 42, 67, 101};
    double train_fraction = 0.8;
    /// Hyperparameters shared by every run; per-coordinate fields (algorithm,
    /// k, seed) are overwritten.
    ModelConfig base;

    /// Throws InvalidArgument on an empty axis, n outside [2,5], even k, or a
    /// fraction outside (0,1).
    void validate() const;
    /// Variation values for one algorithm.
    std::vector<std::uint64_t> variations(Algorithm algorithm) const;
};

struct Coordinate {
    Casing casing = Casing::Original;
    int n = 2;
    Algorithm algorithm = Algorithm::SVM;
    std::uint64_t variation = 0;
    std::uint64_t split_seed = 0;

    auto operator<=>(const Coordinate&) const = default;
};

std::string describe(const Coordinate& c);

/// All grid coordinates in sorted order.
std::vector<Coordinate> coordinates(const ExperimentGrid& grid);

/// The concrete model configuration for one coordinate.
ModelConfig model_config(const ExperimentGrid& grid, const Coordinate& c);

struct RunResult {
    Coordinate coordinate;
    ConfusionMatrix confusion;
    ClassificationReport report;
    double wall_time = 0.0;  ///< seconds; not part of the results log
};

inline constexpr int kResultsSchema = 1;

/// One results-log line (no trailing newline). Excludes wall time so that
/// identical runs produce identical logs.
std::string to_log_line(const RunResult& r);
/// Throws FormatError on malformed input or schema mismatch.
RunResult from_log_line(const std::string& line);

struct RunOptions {
    unsigned jobs = 1;
    /// Line-delimited JSON checkpoint; completed runs are appended as they
    /// finish and the file is rewritten in coordinate order at the end.
    std::optional<std::filesystem::path> log_path;
    /// When set, per-run wall times are appended here as CSV.
    std::optional<std::filesystem::path> timings_path;
    /// Skip coordinates already present in log_path.
    bool resume = false;
    /// Stop (throwing Interrupted) after this many new runs; test hook for
    /// resumability.
    std::optional<std::size_t> stop_after;
    std::function<void(const RunResult&)> on_result;
};

class Interrupted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Executes every coordinate: split, preprocess both partitions, fit the
/// vectorizer on train, transform both, fit, evaluate on test. Returns
/// results sorted by coordinate. Errors are rethrown with the coordinate in
/// the message; completed runs stay in the log.
std::vector<RunResult> run_grid(const Corpus& corpus, const ExperimentGrid& grid, const RunOptions& options = {});

/// Reads a results log, ignoring a truncated final line.
std::vector<RunResult> read_results_log(const std::filesystem::path& path);

enum class Axis { Casing, Ngram, Algorithm, Variation, SplitSeed };

struct AggregateResult {
    std::optional<Casing> casing;
    std::optional<int> n;
    std::optional<Algorithm> algorithm;
    std::optional<std::uint64_t> variation;
    std::optional<std::uint64_t> split_seed;
    double macc_mean = 0.0;
    double macc_std = 0.0;
    double acc_mean = 0.0;
    double acc_std = 0.0;
    std::size_t n_runs = 0;
};

/// Mean and population std over every axis not in group_by. Rows are sorted
/// by the grouped key. Throws InvalidArgument on empty input.
std::vector<AggregateResult> aggregate(std::span<const RunResult> results, const std::set<Axis>& group_by);

/// Header model,n,casing,macc_mean,macc_std,acc_mean,acc_std,n_runs;
/// averaged-out axes are written as "all".
std::string aggregate_csv(std::span<const AggregateResult> rows);

struct CasingDiff {
    Algorithm algorithm;
    int n;
    double macc_lower;
    double macc_original;
    double diff;  ///< lower - original
};

/// Expects aggregates grouped by {algorithm, n, casing}. Throws
/// InvalidArgument if an (algorithm, n) pair lacks either casing.
std::vector<CasingDiff> casing_diff(std::span<const AggregateResult> aggregates);
std::string casing_diff_csv(std::span<const CasingDiff> diffs);

/// algorithm,casing,n,macc_mean,macc_std rows from {algorithm, n, casing}
/// aggregates.
std::string macc_by_n_csv(std::span<const AggregateResult> aggregates);

/// Split seed with the highest mean macro-accuracy for (algorithm, n).
std::optional<std::uint64_t> best_split_seed(std::span<const RunResult> results, Algorithm algorithm, int n);

/// Writes table2.csv (by model), table3.csv (lowercase, by model and n),
/// table4.csv (original case), fig2_casing_diff.csv (when both casings ran)
/// and fig3_macc_by_n.csv into out_dir.
void write_tables(std::span<const RunResult> results, const std::filesystem::path& out_dir);

inline const std::vector<std::uint64_t> kStabilitySeeds{7, 17, 29, 31, 37, 41, 42, 43, 47, 53, 59, 67, 83, 101, 137};

struct SeedRun {
    Casing casing;
    std::uint64_t seed;
    double macc;
    double acc;
};

struct StabilitySummary {
    std::optional<Casing> casing;  ///< nullopt: pooled over casings
    double macc_mean = 0.0;
    double macc_std = 0.0;
    std::size_t n_perfect = 0;
    std::size_t n_runs = 0;
};

struct StabilityStudy {
    std::vector<SeedRun> runs;
    std::vector<StabilitySummary> summary;
};

/// ANN on one fixed split, repeated for each seed and casing.
StabilityStudy seed_stability_study(const Corpus& corpus, std::uint64_t split_seed, std::span<const Casing> casings,
                                    std::span<const std::uint64_t> seeds, int n = 5, double train_fraction = 0.8,
                                    const ModelConfig& base = {}, unsigned jobs = 1);

/// casing,seed,macc,acc
std::string stability_csv(const StabilityStudy& study);
/// casing,macc_mean,macc_std,n_perfect,n_runs
std::string stability_summary_csv(const StabilityStudy& study);

}  // namespace stylo
