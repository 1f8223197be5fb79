#pragma once

#include "stylo/preprocess.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stylo {

inline constexpr int kMinNgram = 2;
inline constexpr int kMaxNgram = 5;

/// Calls fn(view) for every window of n code points, left to right. Views
/// point into `utf8`. Works for any n >= 1.
void for_each_ngram(std::string_view utf8, int n, const std::function<void(std::string_view)>& fn);

/// Sliding-window counts; total equals max(0, L - n + 1). Throws
/// InvalidArgument unless 2 <= n <= 5.
std::map<std::string, std::size_t> extract_ngrams(const EncodedText& text, int n);

/// Inclusive n-gram size range. Per-size experiments use min == max.
struct NGramRange {
    int min = 3;
    int max = 3;
    friend bool operator==(const NGramRange&, const NGramRange&) = default;
};

/// Fitted vocabulary with terms in byte-lexicographic (= code point) order.
class NGramVocabulary {
public:
    NGramVocabulary() = default;
    NGramVocabulary(NGramRange range, std::vector<std::string> terms, std::vector<std::uint32_t> doc_freq,
                    std::size_t n_train_docs);

    NGramRange range() const noexcept { return range_; }
    std::size_t size() const noexcept { return terms_.size(); }
    const std::vector<std::string>& terms() const noexcept { return terms_; }
    const std::vector<std::uint32_t>& doc_freq() const noexcept { return doc_freq_; }
    std::size_t n_train_docs() const noexcept { return n_train_docs_; }

    std::optional<std::uint32_t> find(std::string_view term) const noexcept;

private:
    NGramRange range_{};
    std::vector<std::string> terms_;
    std::vector<std::uint32_t> doc_freq_;
    std::size_t n_train_docs_ = 0;
};

/// Compressed sparse rows. Row weights are L2-normalized (or all zero).
struct FeatureMatrix {
    struct Row {
        std::span<const std::uint32_t> cols;
        std::span<const double> values;
    };

    std::size_t n_cols = 0;
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::uint32_t> cols;
    std::vector<double> values;
    std::vector<std::string> row_ids;

    std::size_t rows() const noexcept { return row_ptr.size() - 1; }
    std::size_t nnz() const noexcept { return values.size(); }
    Row row(std::size_t i) const noexcept {
        const auto b = row_ptr[i];
        const auto e = row_ptr[i + 1];
        return {std::span(cols).subspan(b, e - b), std::span(values).subspan(b, e - b)};
    }

    /// Appends a row; entries must have strictly increasing column indices.
    void push_row(std::span<const std::pair<std::uint32_t, double>> entries, std::string id = {});

    static FeatureMatrix from_dense(const std::vector<std::vector<double>>& dense);
    std::vector<double> dense_row(std::size_t i) const;
    /// Rows at the given indices, in that order.
    FeatureMatrix select_rows(std::span<const std::size_t> indices) const;
};

class VectorizerModel {
public:
    VectorizerModel() = default;
    VectorizerModel(NGramVocabulary vocabulary, Casing casing);

    const NGramVocabulary& vocabulary() const noexcept { return vocabulary_; }
    const std::vector<double>& idf() const noexcept { return idf_; }
    /// Casing the training texts were encoded with.
    Casing casing() const noexcept { return casing_; }
    std::size_t n_features() const noexcept { return vocabulary_.size(); }

private:
    NGramVocabulary vocabulary_;
    std::vector<double> idf_;
    Casing casing_ = Casing::Original;
};

/// ln((1 + n_docs) / (1 + df)) + 1
double smoothed_idf(std::size_t n_docs, std::size_t df) noexcept;

/// Vocabulary of every n-gram seen in any training document. Throws
/// InvalidArgument on an empty list or when no document yields an n-gram.
VectorizerModel fit_vectorizer(std::span<const EncodedText> train_docs, NGramRange range);
inline VectorizerModel fit_vectorizer(std::span<const EncodedText> train_docs, int n) {
    return fit_vectorizer(train_docs, NGramRange{n, n});
}

/// Raw count x idf, out-of-vocabulary n-grams dropped, rows L2-normalized.
/// `ids` may be empty; otherwise it must match docs in length.
FeatureMatrix transform(const VectorizerModel& model, std::span<const EncodedText> docs,
                        std::span<const std::string> ids = {});

std::pair<VectorizerModel, FeatureMatrix> fit_transform(std::span<const EncodedText> train_docs, NGramRange range,
                                                        std::span<const std::string> ids = {});

/// {"format":"stylo-vectorizer","version":1,"n":..,"ngram_range":[lo,hi],
///  "casing":..,"n_train_docs":..,"terms":[...],"doc_freq":[...]}
nlohmann::json to_json(const VectorizerModel& model);
/// Throws FormatError on a wrong format tag, version or inconsistent arrays.
VectorizerModel vectorizer_from_json(const nlohmann::json& j);

/// Debug export: header row_id,term,weight then one line per nonzero entry.
std::string triplets_csv(const FeatureMatrix& matrix, const VectorizerModel& model);

}  // namespace stylo
