#include "stylo/errors.hpp"
#include "stylo/features.hpp"
#include "stylo/rng.hpp"
#include "stylo/unicode.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>

using namespace stylo;

namespace {

std::vector<EncodedText> texts(std::initializer_list<const char*> items) {
    std::vector<EncodedText> out;
    for (const char* s : items) out.push_back({s, Casing::Original});
    return out;
}

double row_norm(const FeatureMatrix& m, std::size_t i) {
    double s = 0.0;
    for (double v : m.row(i).values) s += v * v;
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("extract_ngrams") {
    using Counts = std::map<std::string, std::size_t>;
    CHECK(extract_ngrams({"ab_c"}, 2) == Counts{{"ab", 1}, {"b_", 1}, {"_c", 1}});
    CHECK(extract_ngrams({"aaaa"}, 3) == Counts{{"aaa", 2}});
    CHECK(extract_ngrams({"ab"}, 5).empty());
    CHECK(extract_ngrams({"țară"}, 2) == Counts{{"ța", 1}, {"ar", 1}, {"ră", 1}});
    CHECK_THROWS_AS(extract_ngrams({"abc"}, 1), InvalidArgument);
    CHECK_THROWS_AS(extract_ngrams({"abc"}, 6), InvalidArgument);
}

TEST_CASE("fit_vectorizer idf values") {
    auto model = fit_vectorizer(texts({"ab", "ab"}), 2);
    REQUIRE(model.n_features() == 1);
    CHECK(model.vocabulary().doc_freq()[0] == 2);
    CHECK(model.idf()[0] == doctest::Approx(1.0).epsilon(1e-12));

    model = fit_vectorizer(texts({"ab", "cd"}), 2);
    REQUIRE(model.vocabulary().terms() == std::vector<std::string>{"ab", "cd"});
    CHECK(std::abs(model.idf()[0] - (std::log(1.5) + 1.0)) < 1e-12);
    CHECK(std::abs(model.idf()[0] - 1.405465) < 1e-6);

    CHECK_THROWS_AS(fit_vectorizer(texts({"a"}), 2), InvalidArgument);
    CHECK_THROWS_AS(fit_vectorizer(std::vector<EncodedText>{}, 2), InvalidArgument);
}

TEST_CASE("transform") {
    const auto model = fit_vectorizer(texts({"ab", "cd"}), 2);
    const auto m = transform(model, texts({"abab", "zz", "ab"}));
    CHECK(m.rows() == 3);
    CHECK(m.n_cols == 2);
    REQUIRE(m.row(0).cols.size() == 1);
    CHECK(m.row(0).cols[0] == 0);
    CHECK(m.row(0).values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.row(1).cols.empty());
    CHECK(row_norm(m, 2) == doctest::Approx(1.0));
}

TEST_CASE("fit_transform on two disjoint documents") {
    const auto [model, m] = fit_transform(texts({"ab", "cd"}), NGramRange{2, 2});
    REQUIRE(m.rows() == 2);
    CHECK(m.dense_row(0) == std::vector<double>{1.0, 0.0});
    CHECK(m.dense_row(1) == std::vector<double>{0.0, 1.0});
}

TEST_CASE("empty training document contributes nothing") {
    const auto with_empty = fit_vectorizer(texts({"abc", "", "bcd"}), 2);
    const auto without = fit_vectorizer(texts({"abc", "bcd"}), 2);
    CHECK(with_empty.vocabulary().terms() == without.vocabulary().terms());
    CHECK(with_empty.vocabulary().doc_freq() == without.vocabulary().doc_freq());
    CHECK(with_empty.vocabulary().n_train_docs() == 3);
    const auto m = transform(with_empty, texts({"abc", "", "bcd"}));
    CHECK(m.row(1).cols.empty());
}

TEST_CASE("fit_transform equals fit then transform") {
    const auto docs = texts({"ana_are_mere", "mere_are_ana$", "ana@@"});
    const auto [model, m] = fit_transform(docs, NGramRange{3, 3});
    const auto m2 = transform(fit_vectorizer(docs, 3), docs);
    CHECK(m.row_ptr == m2.row_ptr);
    CHECK(m.cols == m2.cols);
    CHECK(m.values == m2.values);
}

TEST_CASE("vocabulary invariants on random texts") {
    Rng rng(3);
    const std::u32string alphabet = U"abcăîș_$@";
    std::vector<EncodedText> docs;
    for (int d = 0; d < 20; ++d) {
        std::u32string t;
        for (std::size_t i = 0, n = rng.below(40); i < n; ++i) t += alphabet[rng.below(alphabet.size())];
        docs.push_back({unicode::encode(t), Casing::Original});
    }
    for (int n = kMinNgram; n <= kMaxNgram; ++n) {
        const auto model = fit_vectorizer(docs, n);
        const auto& terms = model.vocabulary().terms();
        CHECK(std::is_sorted(terms.begin(), terms.end()));
        CHECK(std::adjacent_find(terms.begin(), terms.end()) == terms.end());
        for (std::size_t t = 0; t < terms.size(); ++t) {
            CHECK(unicode::length(terms[t]) == static_cast<std::size_t>(n));
            CHECK(model.vocabulary().doc_freq()[t] >= 1);
            CHECK(model.vocabulary().doc_freq()[t] <= docs.size());
            CHECK(model.idf()[t] > 0.0);
            CHECK(model.vocabulary().find(terms[t]) == t);
        }
        const auto m = transform(model, docs);
        for (std::size_t r = 0; r < m.rows(); ++r) {
            const auto row = m.row(r);
            CHECK(std::is_sorted(row.cols.begin(), row.cols.end()));
            CHECK(std::adjacent_find(row.cols.begin(), row.cols.end()) == row.cols.end());
            if (!row.cols.empty()) CHECK(row_norm(m, r) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("vectorizer JSON round-trip") {
    const auto model = fit_vectorizer(texts({"ana_are", "mere$"}), NGramRange{2, 3});
    const auto back = vectorizer_from_json(nlohmann::json::parse(to_json(model).dump()));
    CHECK(back.vocabulary().terms() == model.vocabulary().terms());
    CHECK(back.idf() == model.idf());
    CHECK(back.vocabulary().range() == model.vocabulary().range());

    auto j = to_json(model);
    j["version"] = 99;
    CHECK_THROWS_AS(vectorizer_from_json(j), FormatError);
    j = to_json(model);
    j["doc_freq"].erase(0);
    CHECK_THROWS_AS(vectorizer_from_json(j), FormatError);
}

TEST_CASE("combined n-gram range") {
    const auto model = fit_vectorizer(texts({"abc"}), NGramRange{2, 3});
    CHECK(model.vocabulary().terms() == std::vector<std::string>{"ab", "abc", "bc"});
}

TEST_CASE("feature matrix helpers") {
    const auto m = FeatureMatrix::from_dense({{0.0, 2.0, 0.0}, {1.0, 0.0, 3.0}});
    CHECK(m.nnz() == 3);
    CHECK(m.dense_row(1) == std::vector<double>{1.0, 0.0, 3.0});
    const std::vector<std::size_t> order{1, 0, 1};
    const auto s = m.select_rows(order);
    CHECK(s.rows() == 3);
    CHECK(s.dense_row(0) == m.dense_row(1));
    CHECK(s.dense_row(1) == m.dense_row(0));
    FeatureMatrix bad;
    bad.n_cols = 3;
    const std::vector<std::pair<std::uint32_t, double>> unsorted{{2, 1.0}, {1, 1.0}};
    CHECK_THROWS_AS(bad.push_row(unsorted), InvalidArgument);
}

TEST_CASE("triplets export") {
    const auto model = fit_vectorizer(texts({"ab", "cd"}), 2);
    const std::vector<std::string> ids{"d1", "d2"};
    const auto m = transform(model, texts({"ab", "cd"}), ids);
    CHECK(triplets_csv(m, model) == "row_id,term,weight\nd1,ab,1\nd2,cd,1\n");
}
