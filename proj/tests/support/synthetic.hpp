#pragma once
// Test fixtures: a Markov-chain corpus generator and small random-data helpers.

#include "stylo/corpus.hpp"
#include "stylo/features.hpp"
#include "stylo/rng.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace stylo::testing {

struct SyntheticOptions {
    std::size_t authors = 4;
    std::size_t docs_per_author = 50;
    std::size_t min_length = 800;   ///< code points
    std::size_t max_length = 1600;
    /// Larger values make each author's transition rows more peaked.
    double sharpness = 3.0;
    std::uint64_t seed = 2024;
};

/// Each author owns a first-order character transition matrix over a small
/// Romanian-flavoured alphabet (letters with diacritics, space, punctuation,
/// a digit and a line break). Documents are random walks on that chain.
Corpus synthetic_corpus(const SyntheticOptions& options = {});

/// Writes corpus documents as root/<author>/<file>.txt.
void write_corpus(const Corpus& corpus, const std::filesystem::path& root);

/// Random CSR matrix with roughly `density` nonzeros per cell, values in
/// [0, 1), rows L2-normalized when `normalize` is set. With `distinct`, rows
/// that repeat an earlier row are redrawn.
FeatureMatrix random_sparse(Rng& rng, std::size_t rows, std::size_t cols, double density, bool normalize = true,
                            bool distinct = false);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace stylo::testing
