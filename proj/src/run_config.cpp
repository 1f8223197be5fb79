#include "stylo/run_config.hpp"

#include "stylo/errors.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <sstream>

namespace stylo {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view value) {
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = value.find(',');
        const auto item = trim(value.substr(0, comma));
        if (item.empty()) throw InvalidArgument("empty list element");
        out.push_back(item);
        if (comma == std::string_view::npos) break;
        value.remove_prefix(comma + 1);
    }
    return out;
}

template <class T>
T parse_number(std::string_view s) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw InvalidArgument(fmt::format("not a valid number: '{}'", s));
    }
    return v;
}

template <class T>
std::vector<T> parse_numbers(std::string_view value) {
    std::vector<T> out;
    for (auto item : split_list(value)) out.push_back(parse_number<T>(item));
    return out;
}

}  // namespace

void apply_setting(RunConfig& config, std::string_view key, std::string_view value) {
    auto& grid = config.grid;
    auto& base = grid.base;
    if (value.empty()) throw InvalidArgument(fmt::format("missing value for '{}'", key));
    if (key == "corpus") {
        config.corpus_dir = std::filesystem::path(value);
    } else if (key == "out") {
        config.output_dir = std::filesystem::path(value);
    } else if (key == "casings") {
        grid.casings.clear();
        for (auto item : split_list(value)) grid.casings.push_back(parse_casing(item));
    } else if (key == "ngram") {
        grid.ngram_sizes = parse_numbers<int>(value);
    } else if (key == "models") {
        grid.algorithms.clear();
        for (auto item : split_list(value)) grid.algorithms.push_back(parse_algorithm(item));
    } else if (key == "knn_k") {
        grid.knn_k = parse_numbers<int>(value);
    } else if (key == "model_seeds") {
        grid.model_seeds = parse_numbers<std::uint64_t>(value);
    } else if (key == "split_seeds") {
        grid.split_seeds = parse_numbers<std::uint64_t>(value);
    } else if (key == "train_fraction") {
        grid.train_fraction = parse_number<double>(value);
    } else if (key == "jobs") {
        config.jobs = parse_number<unsigned>(value);
    } else if (key == "c") {
        base.regularization_c = parse_number<double>(value);
    } else if (key == "svm_tolerance") {
        base.svm_tolerance = parse_number<double>(value);
    } else if (key == "svm_max_epochs") {
        base.svm_max_epochs = parse_number<int>(value);
    } else if (key == "lr_max_iterations") {
        base.lr_max_iterations = parse_number<int>(value);
    } else if (key == "n_trees") {
        base.n_trees = parse_number<int>(value);
    } else if (key == "hidden_sizes") {
        base.hidden_sizes = parse_numbers<int>(value);
    } else if (key == "alpha") {
        base.alpha = parse_number<double>(value);
    } else if (key == "learning_rate") {
        base.learning_rate = parse_number<double>(value);
    } else if (key == "batch_size") {
        base.batch_size = parse_number<std::size_t>(value);
    } else if (key == "max_epochs") {
        base.max_epochs = parse_number<int>(value);
    } else {
        throw InvalidArgument(fmt::format("unknown key '{}'", key));
    }
}

RunConfig parse_run_config(std::string_view text) {
    RunConfig config;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw InvalidArgument(fmt::format("line {}: expected key = value", line_no));
        try {
            apply_setting(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const InvalidArgument& e) {
            throw InvalidArgument(fmt::format("line {}: {}", line_no, e.what()));
        }
    }
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_run_config(buffer.str());
}

}  // namespace stylo
