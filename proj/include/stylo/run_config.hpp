#pragma once

#include "stylo/experiment.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace stylo {

/// Settings for one grid run. Loaded from a `key = value` file where `#`
/// starts a comment and list values are comma separated:
///
///   corpus = data/rost
///   out = results
///   casings = original, lower
///   ngram = 2, 3, 4, 5
///   models = svm, lr, knn, dt, rf, ann
///   knn_k = 3, 5, 7, 9, 11
///   model_seeds = 7, 17, 42, 67, 101
///   split_seeds = 7, 17, 42, 67, 101
///   train_fraction = 0.8
///   jobs = 4
///
/// Model hyperparameters may be overridden with c, svm_tolerance,
/// svm_max_epochs, lr_max_iterations, n_trees, hidden_sizes, alpha,
/// learning_rate, batch_size, max_epochs.
struct RunConfig {
    std::optional<std::filesystem::path> corpus_dir;
    std::optional<std::filesystem::path> output_dir;
    ExperimentGrid grid;
    std::optional<unsigned> jobs;
};

/// Throws InvalidArgument with the line number on unknown keys or bad values.
RunConfig parse_run_config(std::string_view text);
/// Reads and parses a file; throws InvalidArgument if it cannot be read.
RunConfig load_run_config(const std::filesystem::path& path);

/// Applies one `key = value` setting to an existing config.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

}  // namespace stylo
