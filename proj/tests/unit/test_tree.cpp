#include "stylo/classifiers.hpp"
#include "stylo/detail/training.hpp"
#include "synthetic.hpp"

#include <doctest.h>

#include <numeric>

using namespace stylo;

TEST_CASE("DT shatters XOR") {
    const auto X = FeatureMatrix::from_dense({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    const std::vector<std::string> y{"A", "B", "B", "A"};
    ModelConfig config;
    config.algorithm = Algorithm::DT;
    config.seed = 42;
    const auto model = fit(config, X, y);
    CHECK(predict(model, X) == y);
}

TEST_CASE("DT reaches purity on distinct rows") {
    Rng rng(31);
    const auto X = testing::random_sparse(rng, 60, 20, 0.3, true, true);
    std::vector<std::string> y;
    for (int i = 0; i < 60; ++i) y.push_back("c" + std::to_string(rng.below(5)));
    ModelConfig config;
    config.algorithm = Algorithm::DT;
    const auto model = fit(config, X, y);
    CHECK(predict(model, X) == y);
    for (const auto& n : std::get<TreeParams>(model.params).tree.nodes) {
        if (n.feature < 0) CHECK(n.impurity == 0.0);
        CHECK(n.impurity >= 0.0);
    }
}

TEST_CASE("single-tree RF without bootstrap equals DT") {
    Rng rng(32);
    const auto X = testing::random_sparse(rng, 50, 15, 0.4);
    std::vector<std::string> y;
    for (int i = 0; i < 50; ++i) y.push_back("c" + std::to_string(rng.below(3)));
    ModelConfig dt;
    dt.algorithm = Algorithm::DT;
    dt.seed = 9;
    ModelConfig rf = dt;
    rf.algorithm = Algorithm::RF;
    rf.n_trees = 1;
    rf.bootstrap = false;
    rf.max_features = X.n_cols;
    const auto a = std::get<TreeParams>(fit(dt, X, y).params).tree;
    const auto b = std::get<ForestParams>(fit(rf, X, y).params).trees.at(0);
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t k = 0; k < a.nodes.size(); ++k) {
        CHECK(a.nodes[k].feature == b.nodes[k].feature);
        CHECK(a.nodes[k].threshold == b.nodes[k].threshold);
        CHECK(a.nodes[k].left == b.nodes[k].left);
        CHECK(a.nodes[k].class_weights == b.nodes[k].class_weights);
    }
}

TEST_CASE("RF fits separable data and is thread-count invariant") {
    Rng rng(33);
    const auto X = testing::random_sparse(rng, 80, 12, 0.5);
    std::vector<std::string> y;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const auto row = X.dense_row(i);
        y.push_back(row[0] + row[1] > row[2] + row[3] ? "pos" : "neg");
    }
    ModelConfig config;
    config.algorithm = Algorithm::RF;
    const auto model = fit(config, X, y);
    const auto pred = predict(model, X);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < y.size(); ++i) correct += pred[i] == y[i];
    CHECK(static_cast<double>(correct) / static_cast<double>(y.size()) >= 0.99);

    for (const auto& row : decision_scores(model, X)) {
        CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    }

    config.jobs = 3;
    const auto threaded = fit(config, X, y);
    CHECK(decision_scores(threaded, X) == decision_scores(model, X));
}

TEST_CASE("feature importance") {
    // Only feature 3 carries information.
    std::vector<std::vector<double>> dense;
    std::vector<std::string> y;
    for (int i = 0; i < 40; ++i) {
        std::vector<double> row(6, 0.0);
        row[3] = i % 2 ? 1.0 : 0.0;
        dense.push_back(row);
        y.push_back(i % 2 ? "odd" : "even");
    }
    ModelConfig config;
    config.algorithm = Algorithm::RF;
    config.n_trees = 10;
    const auto imp = feature_importance(fit(config, FeatureMatrix::from_dense(dense), y));
    CHECK(imp[3] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::accumulate(imp.begin(), imp.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));

    // One planted discriminative column among noise.
    Rng rng(34);
    auto X = testing::random_sparse(rng, 100, 10, 0.5, false);
    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        auto r = X.dense_row(i);
        const bool cls = rng.below(2) == 1;
        r[7] = cls ? 1.0 + r[7] : r[7] * 0.5;
        rows.push_back(r);
        labels.push_back(cls ? "a" : "b");
    }
    config.n_trees = 50;
    const auto imp2 = feature_importance(fit(config, FeatureMatrix::from_dense(rows), labels));
    for (std::size_t f = 0; f < imp2.size(); ++f) {
        if (f != 7) CHECK(imp2[f] < imp2[7]);
    }
    CHECK(std::accumulate(imp2.begin(), imp2.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));

    ModelConfig svm;
    CHECK_THROWS(feature_importance(fit(svm, FeatureMatrix::from_dense(dense), y)));
}
