#include "stylo/corpus.hpp"

#include "stylo/errors.hpp"
#include "stylo/rng.hpp"
#include "stylo/unicode.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace stylo {

Corpus Corpus::from_documents(std::vector<Document> documents) {
    Corpus c;
    std::ranges::sort(documents, {}, &Document::id);
    std::set<std::string> authors;
    for (std::size_t i = 0; i < documents.size(); ++i) {
        auto& d = documents[i];
        if (i > 0 && documents[i - 1].id == d.id) throw CorpusError("duplicate document id: " + d.id);
        if (d.raw_text.empty()) throw CorpusError("empty document: " + d.id);
        if (!unicode::is_valid(d.raw_text)) throw CorpusError("document is not valid UTF-8: " + d.id);
        d.char_count = unicode::length(d.raw_text);
        authors.insert(d.author);
    }
    if (authors.size() < 2) {
        throw CorpusError(fmt::format("corpus needs at least 2 authors, found {}", authors.size()));
    }
    c.documents_ = std::move(documents);
    c.authors_.assign(authors.begin(), authors.end());
    return c;
}

std::size_t Corpus::index_of(const std::string& id) const {
    const auto it = std::ranges::lower_bound(documents_, id, {}, &Document::id);
    if (it == documents_.end() || it->id != id) throw InvalidArgument("unknown document id: " + id);
    return static_cast<std::size_t>(it - documents_.begin());
}

Corpus load_corpus(const fs::path& root_dir) {
    std::error_code ec;
    if (!fs::is_directory(root_dir, ec)) throw CorpusError("corpus directory not found: " + root_dir.string());

    std::vector<fs::path> author_dirs;
    for (const auto& entry : fs::directory_iterator(root_dir)) {
        if (entry.is_directory()) author_dirs.push_back(entry.path());
    }
    std::ranges::sort(author_dirs);

    std::vector<Document> docs;
    for (const auto& dir : author_dirs) {
        const std::string author = dir.filename().string();
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
        }
        if (files.empty()) throw CorpusError("author directory has no .txt files: " + dir.string());
        std::ranges::sort(files);
        for (const auto& file : files) {
            std::ifstream in(file, std::ios::binary);
            if (!in) throw CorpusError("cannot read file: " + file.string());
            std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
            if (!unicode::is_valid(text)) throw CorpusError("file is not valid UTF-8: " + file.string());
            if (text.empty()) throw CorpusError("empty file: " + file.string());
            docs.push_back(Document{author + "/" + file.filename().string(), author, std::move(text), 0});
        }
    }
    return Corpus::from_documents(std::move(docs));
}

Split stratified_split(const Corpus& corpus, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw InvalidArgument(fmt::format("train fraction must lie in (0,1), got {}", train_fraction));
    }
    Split split;
    split.train_fraction = train_fraction;
    split.seed = seed;

    Rng rng(seed);
    std::vector<char> is_train(corpus.size(), 0);
    for (const auto& author : corpus.authors()) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            if (corpus.documents()[i].author == author) members.push_back(i);
        }
        const std::size_t n = members.size();
        if (n < 2) throw InvalidArgument("author '" + author + "' has fewer than 2 documents; cannot split");
        rng.shuffle(std::span(members));
        auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n) + 0.5));
        n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
        for (std::size_t k = 0; k < n_train; ++k) is_train[members[k]] = 1;
    }
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        (is_train[i] ? split.train_ids : split.test_ids).push_back(corpus.documents()[i].id);
    }
    return split;
}

std::vector<AuthorStats> corpus_stats(const Corpus& corpus) {
    std::vector<AuthorStats> out;
    for (const auto& author : corpus.authors()) {
        std::vector<std::size_t> lengths;
        for (const auto& d : corpus.documents()) {
            if (d.author == author) lengths.push_back(d.char_count);
        }
        std::ranges::sort(lengths);
        AuthorStats s;
        s.author = author;
        s.count = lengths.size();
        s.min_chars = lengths.front();
        s.max_chars = lengths.back();
        const std::size_t mid = lengths.size() / 2;
        s.median_chars = lengths.size() % 2 == 1
                             ? static_cast<double>(lengths[mid])
                             : 0.5 * static_cast<double>(lengths[mid - 1] + lengths[mid]);
        out.push_back(std::move(s));
    }
    return out;
}

std::string stats_csv(const std::vector<AuthorStats>& stats) {
    std::string out = "author,count,min_chars,median_chars,max_chars\n";
    for (const auto& s : stats) {
        out += fmt::format("{},{},{},{},{}\n", s.author, s.count, s.min_chars, s.median_chars, s.max_chars);
    }
    return out;
}

}  // namespace stylo
