#include "stylo/classifiers.hpp"
#include "stylo/detail/training.hpp"
#include "synthetic.hpp"

#include <doctest.h>

#include <cmath>

using namespace stylo;

TEST_CASE("sparse distance equals dense distance") {
    Rng rng(12);
    const auto X = testing::random_sparse(rng, 20, 25, 0.3);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t j = 0; j < X.rows(); ++j) {
            const auto a = X.dense_row(i);
            const auto b = X.dense_row(j);
            double d = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k) d += (a[k] - b[k]) * (a[k] - b[k]);
            CHECK(detail::sparse_squared_distance(X.row(i), X.row(j)) == doctest::Approx(d).epsilon(1e-12));
        }
    }
}

TEST_CASE("k=1 on a training point returns its own label") {
    Rng rng(13);
    const auto X = testing::random_sparse(rng, 15, 10, 0.5);
    std::vector<std::string> y;
    for (int i = 0; i < 15; ++i) y.push_back("c" + std::to_string(i % 4));
    ModelConfig config;
    config.algorithm = Algorithm::KNN;
    config.k_neighbors = 1;
    const auto model = fit(config, X, y);
    CHECK(predict(model, X) == y);
    const auto& p = std::get<KnnParams>(model.params);
    CHECK(p.train.values == X.values);
}

TEST_CASE("vote ties resolve by summed distance, then class index") {
    // Query at the origin; neighbours of class 0 at distance 2, class 1 at 1.
    KnnParams p;
    p.k = 2;
    p.train = FeatureMatrix::from_dense({{2.0, 0.0}, {0.0, 1.0}});
    p.labels = {0, 1};
    const auto q = FeatureMatrix::from_dense({{0.0, 0.0}});
    auto vote = detail::knn_vote(p, 2, q.row(0));
    CHECK(vote.label == 1);
    CHECK(vote.vote_fraction == std::vector<double>{0.5, 0.5});

    p.train = FeatureMatrix::from_dense({{1.0, 0.0}, {0.0, 1.0}});
    vote = detail::knn_vote(p, 2, q.row(0));
    CHECK(vote.label == 0);
}

TEST_CASE("k larger than the training set uses every row") {
    KnnParams p;
    p.k = 11;
    p.train = FeatureMatrix::from_dense({{1.0}, {2.0}, {3.0}});
    p.labels = {1, 1, 0};
    const auto q = FeatureMatrix::from_dense({{3.0}});
    const auto vote = detail::knn_vote(p, 2, q.row(0));
    CHECK(vote.label == 1);
    CHECK(vote.vote_fraction[1] == doctest::Approx(2.0 / 3.0));
}
