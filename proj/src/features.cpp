#include "stylo/features.hpp"

#include "stylo/errors.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace stylo {
namespace {

constexpr int kVectorizerVersion = 1;

bool is_lead_byte(char c) noexcept { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }

void check_range(NGramRange range) {
    if (range.min < kMinNgram || range.max > kMaxNgram || range.min > range.max) {
        throw InvalidArgument(fmt::format("n-gram range [{}, {}] outside [{}, {}]", range.min, range.max,
                                          kMinNgram, kMaxNgram));
    }
}

}  // namespace

void for_each_ngram(std::string_view utf8, int n, const std::function<void(std::string_view)>& fn) {
    if (n < 1) return;
    std::vector<std::size_t> starts;
    starts.reserve(utf8.size() + 1);
    for (std::size_t i = 0; i < utf8.size(); ++i) {
        if (is_lead_byte(utf8[i])) starts.push_back(i);
    }
    const std::size_t length = starts.size();
    starts.push_back(utf8.size());
    const auto width = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + width <= length; ++i) {
        fn(utf8.substr(starts[i], starts[i + width] - starts[i]));
    }
}

std::map<std::string, std::size_t> extract_ngrams(const EncodedText& text, int n) {
    check_range({n, n});
    std::map<std::string, std::size_t> counts;
    for_each_ngram(text.text, n, [&](std::string_view g) { ++counts[std::string(g)]; });
    return counts;
}

NGramVocabulary::NGramVocabulary(NGramRange range, std::vector<std::string> terms,
                                 std::vector<std::uint32_t> doc_freq, std::size_t n_train_docs)
    : range_(range), terms_(std::move(terms)), doc_freq_(std::move(doc_freq)), n_train_docs_(n_train_docs) {
    if (terms_.size() != doc_freq_.size()) throw InvalidArgument("vocabulary: terms/doc_freq length mismatch");
    if (!std::ranges::is_sorted(terms_) || std::ranges::adjacent_find(terms_) != terms_.end()) {
        throw InvalidArgument("vocabulary: terms must be strictly increasing");
    }
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (doc_freq_[i] < 1 || doc_freq_[i] > n_train_docs_) {
            throw InvalidArgument("vocabulary: document frequency out of range for term " + terms_[i]);
        }
    }
}

std::optional<std::uint32_t> NGramVocabulary::find(std::string_view term) const noexcept {
    const auto it = std::lower_bound(terms_.begin(), terms_.end(), term,
                                     [](const std::string& a, std::string_view b) { return std::string_view(a) < b; });
    if (it == terms_.end() || *it != term) return std::nullopt;
    return static_cast<std::uint32_t>(it - terms_.begin());
}

void FeatureMatrix::push_row(std::span<const std::pair<std::uint32_t, double>> entries, std::string id) {
    for (std::size_t k = 0; k < entries.size(); ++k) {
        if (entries[k].first >= n_cols || (k > 0 && entries[k].first <= entries[k - 1].first)) {
            throw InvalidArgument("push_row: column indices must be increasing and below n_cols");
        }
    }
    for (const auto& [c, v] : entries) {
        cols.push_back(c);
        values.push_back(v);
    }
    row_ptr.push_back(values.size());
    row_ids.push_back(std::move(id));
}

FeatureMatrix FeatureMatrix::from_dense(const std::vector<std::vector<double>>& dense) {
    FeatureMatrix m;
    m.n_cols = dense.empty() ? 0 : dense.front().size();
    std::vector<std::pair<std::uint32_t, double>> entries;
    for (std::size_t r = 0; r < dense.size(); ++r) {
        if (dense[r].size() != m.n_cols) throw InvalidArgument("from_dense: ragged rows");
        entries.clear();
        for (std::size_t c = 0; c < m.n_cols; ++c) {
            if (dense[r][c] != 0.0) entries.emplace_back(static_cast<std::uint32_t>(c), dense[r][c]);
        }
        m.push_row(entries, std::to_string(r));
    }
    return m;
}

std::vector<double> FeatureMatrix::dense_row(std::size_t i) const {
    std::vector<double> out(n_cols, 0.0);
    const auto r = row(i);
    for (std::size_t k = 0; k < r.cols.size(); ++k) out[r.cols[k]] = r.values[k];
    return out;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
    FeatureMatrix out;
    out.n_cols = n_cols;
    for (std::size_t i : indices) {
        const auto r = row(i);
        out.cols.insert(out.cols.end(), r.cols.begin(), r.cols.end());
        out.values.insert(out.values.end(), r.values.begin(), r.values.end());
        out.row_ptr.push_back(out.values.size());
        out.row_ids.push_back(i < row_ids.size() ? row_ids[i] : std::string{});
    }
    return out;
}

double smoothed_idf(std::size_t n_docs, std::size_t df) noexcept {
    return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(df))) + 1.0;
}

VectorizerModel::VectorizerModel(NGramVocabulary vocabulary, Casing casing)
    : vocabulary_(std::move(vocabulary)), casing_(casing) {
    idf_.reserve(vocabulary_.size());
    for (auto df : vocabulary_.doc_freq()) idf_.push_back(smoothed_idf(vocabulary_.n_train_docs(), df));
}

VectorizerModel fit_vectorizer(std::span<const EncodedText> train_docs, NGramRange range) {
    check_range(range);
    if (train_docs.empty()) throw InvalidArgument("fit_vectorizer: no training documents");

    std::unordered_map<std::string, std::uint32_t> df;
    std::unordered_set<std::string_view> seen;
    for (const auto& doc : train_docs) {
        seen.clear();
        for (int n = range.min; n <= range.max; ++n) {
            for_each_ngram(doc.text, n, [&](std::string_view g) { seen.insert(g); });
        }
        for (auto g : seen) ++df[std::string(g)];
    }
    if (df.empty()) {
        throw InvalidArgument(
            fmt::format("fit_vectorizer: no training document is long enough for {}-grams", range.min));
    }

    std::vector<std::pair<std::string, std::uint32_t>> entries(std::make_move_iterator(df.begin()),
                                                               std::make_move_iterator(df.end()));
    std::ranges::sort(entries, {}, &std::pair<std::string, std::uint32_t>::first);
    std::vector<std::string> terms;
    std::vector<std::uint32_t> freqs;
    terms.reserve(entries.size());
    freqs.reserve(entries.size());
    for (auto& [t, f] : entries) {
        terms.push_back(std::move(t));
        freqs.push_back(f);
    }
    return VectorizerModel(NGramVocabulary(range, std::move(terms), std::move(freqs), train_docs.size()),
                           train_docs.front().casing);
}

FeatureMatrix transform(const VectorizerModel& model, std::span<const EncodedText> docs,
                        std::span<const std::string> ids) {
    if (!ids.empty() && ids.size() != docs.size()) throw InvalidArgument("transform: ids/docs length mismatch");
    const auto& vocab = model.vocabulary();
    const auto& idf = model.idf();

    FeatureMatrix m;
    m.n_cols = vocab.size();
    std::unordered_map<std::string_view, std::size_t> counts;
    std::vector<std::pair<std::uint32_t, double>> entries;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        counts.clear();
        for (int n = vocab.range().min; n <= vocab.range().max; ++n) {
            for_each_ngram(docs[d].text, n, [&](std::string_view g) { ++counts[g]; });
        }
        entries.clear();
        for (const auto& [g, c] : counts) {
            if (auto col = vocab.find(g)) entries.emplace_back(*col, static_cast<double>(c) * idf[*col]);
        }
        std::ranges::sort(entries, {}, &std::pair<std::uint32_t, double>::first);
        double norm2 = 0.0;
        for (const auto& e : entries) norm2 += e.second * e.second;
        if (norm2 > 0.0) {
            const double inv = 1.0 / std::sqrt(norm2);
            for (auto& e : entries) e.second *= inv;
        }
        m.push_row(entries, ids.empty() ? std::string{} : ids[d]);
    }
    return m;
}

std::pair<VectorizerModel, FeatureMatrix> fit_transform(std::span<const EncodedText> train_docs, NGramRange range,
                                                        std::span<const std::string> ids) {
    auto model = fit_vectorizer(train_docs, range);
    auto matrix = transform(model, train_docs, ids);
    return {std::move(model), std::move(matrix)};
}

nlohmann::json to_json(const VectorizerModel& model) {
    const auto& v = model.vocabulary();
    nlohmann::json j;
    j["format"] = "stylo-vectorizer";
    j["version"] = kVectorizerVersion;
    if (v.range().min == v.range().max) j["n"] = v.range().min;
    j["ngram_range"] = {v.range().min, v.range().max};
    j["casing"] = to_string(model.casing());
    j["n_train_docs"] = v.n_train_docs();
    j["terms"] = v.terms();
    j["doc_freq"] = v.doc_freq();
    return j;
}

VectorizerModel vectorizer_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != "stylo-vectorizer") throw FormatError("not a vectorizer file");
        const int version = j.at("version").get<int>();
        if (version != kVectorizerVersion) {
            throw FormatError(fmt::format("unsupported vectorizer version {} (expected {})", version,
                                          kVectorizerVersion));
        }
        const auto range_arr = j.at("ngram_range").get<std::vector<int>>();
        if (range_arr.size() != 2) throw FormatError("ngram_range must have two entries");
        const NGramRange range{range_arr[0], range_arr[1]};
        check_range(range);
        NGramVocabulary vocab(range, j.at("terms").get<std::vector<std::string>>(),
                              j.at("doc_freq").get<std::vector<std::uint32_t>>(),
                              j.at("n_train_docs").get<std::size_t>());
        return VectorizerModel(std::move(vocab), parse_casing(j.at("casing").get<std::string>()));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed vectorizer JSON: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("invalid vectorizer: ") + e.what());
    }
}

std::string triplets_csv(const FeatureMatrix& matrix, const VectorizerModel& model) {
    std::string out = "row_id,term,weight\n";
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        const auto row = matrix.row(r);
        for (std::size_t k = 0; k < row.cols.size(); ++k) {
            std::string term = model.vocabulary().terms().at(row.cols[k]);
            if (term.find_first_of(",\"") != std::string::npos) {
                std::string quoted = "\"";
                for (char c : term) {
                    if (c == '"') quoted += '"';
                    quoted += c;
                }
                term = quoted + "\"";
            }
            out += fmt::format("{},{},{}\n", matrix.row_ids[r], term, row.values[k]);
        }
    }
    return out;
}

}  // namespace stylo
