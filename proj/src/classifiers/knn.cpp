#include "stylo/detail/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace stylo::detail {

double sparse_squared_distance(const FeatureMatrix::Row& a, const FeatureMatrix::Row& b) noexcept {
    double sum = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.cols.size() && j < b.cols.size()) {
        if (a.cols[i] == b.cols[j]) {
            const double d = a.values[i++] - b.values[j++];
            sum += d * d;
        } else if (a.cols[i] < b.cols[j]) {
            sum += a.values[i] * a.values[i];
            ++i;
        } else {
            sum += b.values[j] * b.values[j];
            ++j;
        }
    }
    for (; i < a.cols.size(); ++i) sum += a.values[i] * a.values[i];
    for (; j < b.cols.size(); ++j) sum += b.values[j] * b.values[j];
    return sum;
}

KnnVote knn_vote(const KnnParams& params, std::size_t n_classes, const FeatureMatrix::Row& query) {
    const std::size_t n_train = params.train.rows();
    std::vector<std::pair<double, std::size_t>> dist(n_train);
    for (std::size_t t = 0; t < n_train; ++t) dist[t] = {sparse_squared_distance(query, params.train.row(t)), t};

    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(params.k), n_train);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());

    std::vector<int> votes(n_classes, 0);
    std::vector<double> summed(n_classes, 0.0);
    for (std::size_t r = 0; r < k; ++r) {
        const auto cls = static_cast<std::size_t>(params.labels[dist[r].second]);
        ++votes[cls];
        summed[cls] += std::sqrt(dist[r].first);
    }

    KnnVote out;
    out.vote_fraction.resize(n_classes);
    std::size_t best = 0;
    for (std::size_t c = 0; c < n_classes; ++c) {
        out.vote_fraction[c] = static_cast<double>(votes[c]) / static_cast<double>(k);
        if (votes[c] > votes[best] || (votes[c] == votes[best] && summed[c] < summed[best])) best = c;
    }
    out.label = static_cast<int>(best);
    return out;
}

}  // namespace stylo::detail
