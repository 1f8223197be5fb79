#include "stylo/detail/training.hpp"
#include "stylo/parallel.hpp"
#include "stylo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace stylo::detail {
namespace {

constexpr std::uint64_t kSamplingStream = 0x5E1EC7;
constexpr std::uint64_t kBootstrapStream = 0xB0075;

struct Entry {
    std::uint32_t feature;
    double value;
    std::uint32_t sample;
};

struct SplitCandidate {
    bool found = false;
    std::uint32_t feature = 0;
    std::uint64_t rank = 0;
    double threshold = 0.0;
    double proxy = -std::numeric_limits<double>::infinity();
};

double gini(std::span<const double> counts, double total) noexcept {
    if (total <= 0.0) return 0.0;
    double sq = 0.0;
    for (double c : counts) sq += (c / total) * (c / total);
    return 1.0 - sq;
}

class TreeBuilder {
public:
    TreeBuilder(const FeatureMatrix& X, std::span<const int> y, std::size_t n_classes,
                std::span<const double> weight, const TreeOptions& options)
        : X_(X),
          y_(y),
          C_(n_classes),
          weight_(weight),
          options_(options),
          rng_(derive_seed(options.seed, kSamplingStream)),
          stamp_(X.n_cols, 0),
          selected_(X.n_cols, 0),
          value_of_(X.rows(), 0.0) {}

    Tree build() {
        std::vector<std::uint32_t> samples;
        for (std::size_t i = 0; i < X_.rows(); ++i) {
            if (weight_[i] > 0.0) samples.push_back(static_cast<std::uint32_t>(i));
        }
        Tree tree;
        tree.nodes.emplace_back();
        struct Pending {
            std::int32_t node;
            std::size_t begin;
            std::size_t end;
        };
        std::vector<Pending> stack{{0, 0, samples.size()}};
        while (!stack.empty()) {
            const Pending p = stack.back();
            stack.pop_back();
            const std::span<std::uint32_t> node_samples(samples.data() + p.begin, p.end - p.begin);

            std::vector<double> counts(C_, 0.0);
            for (auto s : node_samples) counts[static_cast<std::size_t>(y_[s])] += weight_[s];
            const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
            {
                TreeNode& node = tree.nodes[static_cast<std::size_t>(p.node)];
                node.weighted_samples = total;
                node.impurity = gini(counts, total);
                node.class_weights = counts;
            }
            const auto occupied = std::ranges::count_if(counts, [](double c) { return c > 0.0; });
            if (occupied <= 1) continue;

            const SplitCandidate best = find_split(node_samples, counts, total);
            if (!best.found) continue;

            // Route samples; value_of_ holds the split feature's values for this node.
            fill_values(node_samples, best.feature);
            const auto mid = std::stable_partition(node_samples.begin(), node_samples.end(), [&](std::uint32_t s) {
                return value_of_[s] <= best.threshold;
            });
            const std::size_t n_left = static_cast<std::size_t>(mid - node_samples.begin());

            const auto left = static_cast<std::int32_t>(tree.nodes.size());
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            TreeNode& node = tree.nodes[static_cast<std::size_t>(p.node)];
            node.feature = static_cast<std::int32_t>(best.feature);
            node.threshold = best.threshold;
            node.left = left;
            node.right = left + 1;
            stack.push_back({left + 1, p.begin + n_left, p.end});
            stack.push_back({left, p.begin, p.begin + n_left});
        }
        return tree;
    }

private:
    std::uint64_t rank(std::uint32_t feature) const noexcept { return derive_seed(options_.seed, feature); }

    void fill_values(std::span<const std::uint32_t> node_samples, std::uint32_t feature) {
        for (auto s : node_samples) {
            const auto row = X_.row(s);
            const auto it = std::lower_bound(row.cols.begin(), row.cols.end(), feature);
            value_of_[s] = (it != row.cols.end() && *it == feature)
                               ? row.values[static_cast<std::size_t>(it - row.cols.begin())]
                               : 0.0;
        }
    }

    SplitCandidate find_split(std::span<const std::uint32_t> node_samples, std::span<const double> counts,
                              double total) {
        ++epoch_;
        std::vector<std::uint32_t> present;
        for (auto s : node_samples) {
            for (auto f : X_.row(s).cols) {
                if (stamp_[f] != epoch_) {
                    stamp_[f] = epoch_;
                    present.push_back(f);
                }
            }
        }
        std::ranges::sort(present);

        SplitCandidate best;
        if (!options_.max_features || *options_.max_features >= present.size()) {
            for (auto f : present) selected_[f] = epoch_;
            evaluate_selected(node_samples, counts, total, best);
            return best;
        }

        // Draw features without replacement until max_features non-constant
        // ones have been evaluated or the node's features are exhausted.
        const std::size_t wanted = *options_.max_features;
        std::size_t drawn = 0;
        std::size_t non_constant = 0;
        while (non_constant < wanted && drawn < present.size()) {
            const std::size_t batch = std::min(wanted - non_constant, present.size() - drawn);
            ++epoch_;
            for (std::size_t b = 0; b < batch; ++b, ++drawn) {
                const std::size_t j = drawn + static_cast<std::size_t>(rng_.below(present.size() - drawn));
                std::swap(present[drawn], present[j]);
                selected_[present[drawn]] = epoch_;
            }
            non_constant += evaluate_selected(node_samples, counts, total, best);
        }
        return best;
    }

    // Evaluates every feature flagged in selected_ for the current epoch and
    // returns how many of them were non-constant in the node.
    std::size_t evaluate_selected(std::span<const std::uint32_t> node_samples, std::span<const double> counts,
                                  double total, SplitCandidate& best) {
        entries_.clear();
        for (auto s : node_samples) {
            const auto row = X_.row(s);
            for (std::size_t k = 0; k < row.cols.size(); ++k) {
                if (selected_[row.cols[k]] == epoch_) entries_.push_back({row.cols[k], row.values[k], s});
            }
        }
        std::ranges::sort(entries_, [](const Entry& a, const Entry& b) {
            if (a.feature != b.feature) return a.feature < b.feature;
            if (a.value != b.value) return a.value < b.value;
            return a.sample < b.sample;
        });

        std::size_t non_constant = 0;
        for (std::size_t b = 0; b < entries_.size();) {
            std::size_t e = b;
            while (e < entries_.size() && entries_[e].feature == entries_[b].feature) ++e;
            if (evaluate_feature(std::span(entries_).subspan(b, e - b), counts, total, best)) ++non_constant;
            b = e;
        }
        return non_constant;
    }

    // Scans thresholds of one feature; entries are its nonzero values in the
    // node sorted ascending, implicit zeros fill the rest. Returns false if
    // the feature is constant in the node.
    bool evaluate_feature(std::span<const Entry> entries, std::span<const double> counts, double total,
                          SplitCandidate& best) {
        const std::uint32_t feature = entries.front().feature;
        zero_counts_.assign(counts.begin(), counts.end());
        double zero_weight = total;
        for (const auto& en : entries) {
            if (en.value == 0.0) continue;
            const double w = weight_[en.sample];
            zero_counts_[static_cast<std::size_t>(y_[en.sample])] -= w;
            zero_weight -= w;
        }

        left_.assign(C_, 0.0);
        double left_weight = 0.0;
        bool have_prev = false;
        double prev_value = 0.0;
        bool constant = true;

        auto add_value = [&](double value, auto&& accumulate) {
            if (have_prev && value != prev_value) {
                constant = false;
                consider(feature, prev_value, value, counts, total, left_weight, best);
            }
            accumulate();
            prev_value = value;
            have_prev = true;
        };

        std::size_t k = 0;
        for (; k < entries.size() && entries[k].value < 0.0; ++k) {
            const auto& en = entries[k];
            add_value(en.value, [&] {
                left_[static_cast<std::size_t>(y_[en.sample])] += weight_[en.sample];
                left_weight += weight_[en.sample];
            });
        }
        while (k < entries.size() && entries[k].value == 0.0) ++k;
        if (zero_weight > 0.0) {
            add_value(0.0, [&] {
                for (std::size_t c = 0; c < C_; ++c) left_[c] += zero_counts_[c];
                left_weight += zero_weight;
            });
        }
        for (; k < entries.size(); ++k) {
            const auto& en = entries[k];
            add_value(en.value, [&] {
                left_[static_cast<std::size_t>(y_[en.sample])] += weight_[en.sample];
                left_weight += weight_[en.sample];
            });
        }
        return !constant;
    }

    void consider(std::uint32_t feature, double lo, double hi, std::span<const double> counts, double total,
                  double left_weight, SplitCandidate& best) {
        const double right_weight = total - left_weight;
        double proxy = 0.0;
        for (std::size_t c = 0; c < C_; ++c) {
            const double r = counts[c] - left_[c];
            proxy += left_[c] * left_[c] / left_weight + r * r / right_weight;
        }
        const std::uint64_t r = rank(feature);
        const bool better = !best.found || proxy > best.proxy ||
                            (proxy == best.proxy && feature != best.feature && r < best.rank);
        if (!better) return;
        double threshold = lo / 2.0 + hi / 2.0;
        if (threshold == hi || !std::isfinite(threshold)) threshold = lo;
        best = {true, feature, r, threshold, proxy};
    }

    const FeatureMatrix& X_;
    std::span<const int> y_;
    std::size_t C_;
    std::span<const double> weight_;
    TreeOptions options_;
    Rng rng_;
    std::uint32_t epoch_ = 0;
    std::vector<std::uint32_t> stamp_;
    std::vector<std::uint32_t> selected_;
    std::vector<double> value_of_;
    std::vector<Entry> entries_;
    std::vector<double> zero_counts_;
    std::vector<double> left_;
};

}  // namespace

std::uint64_t tree_seed(std::uint64_t seed, std::size_t index) noexcept { return derive_seed(seed, index); }

Tree grow_tree(const FeatureMatrix& X, std::span<const int> y, std::size_t n_classes,
               std::span<const double> sample_weight, const TreeOptions& options) {
    return TreeBuilder(X, y, n_classes, sample_weight, options).build();
}

const TreeNode& tree_leaf(const Tree& tree, const FeatureMatrix::Row& row) noexcept {
    const TreeNode* node = &tree.nodes.front();
    while (node->feature >= 0) {
        const auto f = static_cast<std::uint32_t>(node->feature);
        const auto it = std::lower_bound(row.cols.begin(), row.cols.end(), f);
        const double v =
            (it != row.cols.end() && *it == f) ? row.values[static_cast<std::size_t>(it - row.cols.begin())] : 0.0;
        node = &tree.nodes[static_cast<std::size_t>(v <= node->threshold ? node->left : node->right)];
    }
    return *node;
}

std::vector<double> tree_importance(const Tree& tree, std::size_t n_features) {
    std::vector<double> importance(n_features, 0.0);
    if (tree.nodes.empty()) return importance;
    const double root = tree.nodes.front().weighted_samples;
    for (const auto& node : tree.nodes) {
        if (node.feature < 0) continue;
        const auto& l = tree.nodes[static_cast<std::size_t>(node.left)];
        const auto& r = tree.nodes[static_cast<std::size_t>(node.right)];
        const double decrease = node.weighted_samples * node.impurity - l.weighted_samples * l.impurity -
                                r.weighted_samples * r.impurity;
        importance[static_cast<std::size_t>(node.feature)] += decrease / root;
    }
    return importance;
}

ForestParams train_forest(const FeatureMatrix& X, std::span<const int> y, std::size_t n_classes,
                          const ModelConfig& config) {
    const std::size_t n = X.rows();
    std::optional<std::size_t> max_features = config.max_features;
    if (!max_features) {
        max_features = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(X.n_cols))));
    }

    ForestParams forest;
    forest.trees.resize(static_cast<std::size_t>(config.n_trees));
    parallel_for(forest.trees.size(), config.jobs, [&](std::size_t t) {
        const std::uint64_t seed = tree_seed(config.seed, t);
        std::vector<double> weight(n, 1.0);
        if (config.bootstrap) {
            std::fill(weight.begin(), weight.end(), 0.0);
            Rng rng(derive_seed(seed, kBootstrapStream));
            for (std::size_t i = 0; i < n; ++i) weight[rng.below(n)] += 1.0;
        }
        forest.trees[t] = grow_tree(X, y, n_classes, weight, TreeOptions{seed, max_features});
    });
    return forest;
}

}  // namespace stylo::detail
