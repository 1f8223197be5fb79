#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace stylo {

struct Document {
    std::string id;      ///< "author/filename"
    std::string author;
    std::string raw_text;
    std::size_t char_count = 0;  ///< Unicode scalar values in raw_text
};

/// Labeled documents in lexicographic id order. Construct through
/// Corpus::from_documents or load_corpus so the invariants hold.
class Corpus {
public:
    /// Validates and sorts. Throws CorpusError on duplicate ids, invalid or
    /// empty text, or fewer than two authors.
    static Corpus from_documents(std::vector<Document> documents);

    const std::vector<Document>& documents() const noexcept { return documents_; }
    /// Sorted, unique.
    const std::vector<std::string>& authors() const noexcept { return authors_; }
    std::size_t size() const noexcept { return documents_.size(); }

    /// Index of the document with this id, or throws InvalidArgument.
    std::size_t index_of(const std::string& id) const;

private:
    std::vector<Document> documents_;
    std::vector<std::string> authors_;
};

/// Reads root_dir/<author>/*.txt. Throws CorpusError on a missing directory,
/// an author directory without .txt files, or a file that is not UTF-8.
Corpus load_corpus(const std::filesystem::path& root_dir);

struct Split {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    std::vector<std::string> train_ids;  ///< corpus order
    std::vector<std::string> test_ids;   ///< corpus order
};

/// Per-author stratified split. Within each author (in label order) the
/// documents are shuffled by one Rng stream seeded with `seed`; the first
/// round_half_up(train_fraction * n) go to train, clamped so both sides get
/// at least one document. Throws InvalidArgument if any author has fewer
/// than two documents or the fraction is outside (0, 1).
Split stratified_split(const Corpus& corpus, double train_fraction, std::uint64_t seed);

struct AuthorStats {
    std::string author;
    std::size_t count = 0;
    std::size_t min_chars = 0;
    double median_chars = 0.0;
    std::size_t max_chars = 0;
};

/// One entry per author in label order.
std::vector<AuthorStats> corpus_stats(const Corpus& corpus);

/// CSV with header author,count,min_chars,median_chars,max_chars.
std::string stats_csv(const std::vector<AuthorStats>& stats);

}  // namespace stylo
