#include "stylo/metrics.hpp"

#include "stylo/errors.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace stylo {

std::size_t ConfusionMatrix::total() const noexcept {
    std::size_t t = 0;
    for (const auto& row : counts) {
        for (auto c : row) t += c;
    }
    return t;
}

ConfusionMatrix confusion_matrix(std::span<const std::string> y_true, std::span<const std::string> y_pred,
                                 std::span<const std::string> class_labels) {
    if (y_true.size() != y_pred.size()) {
        throw InvalidArgument(fmt::format("confusion_matrix: {} true labels vs {} predictions", y_true.size(),
                                          y_pred.size()));
    }
    if (y_true.empty()) throw InvalidArgument("confusion_matrix: no samples");
    std::map<std::string, std::size_t, std::less<>> index;
    for (std::size_t i = 0; i < class_labels.size(); ++i) index.emplace(class_labels[i], i);
    const auto lookup = [&](const std::string& label) {
        const auto it = index.find(label);
        if (it == index.end()) throw InvalidArgument("confusion_matrix: unknown label '" + label + "'");
        return it->second;
    };

    ConfusionMatrix cm;
    cm.class_labels.assign(class_labels.begin(), class_labels.end());
    cm.counts.assign(class_labels.size(), std::vector<std::size_t>(class_labels.size(), 0));
    for (std::size_t t = 0; t < y_true.size(); ++t) ++cm.counts[lookup(y_true[t])][lookup(y_pred[t])];
    return cm;
}

ClassificationReport report(const ConfusionMatrix& cm) {
    const std::size_t C = cm.class_labels.size();
    const std::size_t total = cm.total();
    if (total == 0) throw InvalidArgument("report: confusion matrix is empty");

    ClassificationReport r;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < C; ++i) {
        std::size_t support = 0;
        std::size_t predicted = 0;
        for (std::size_t j = 0; j < C; ++j) {
            support += cm.counts[i][j];
            predicted += cm.counts[j][i];
        }
        const std::size_t tp = cm.counts[i][i];
        correct += tp;

        ClassMetrics m;
        m.label = cm.class_labels[i];
        m.support = support;
        if (support > 0) {
            m.recall = static_cast<double>(tp) / static_cast<double>(support);
        } else {
            r.zero_division = true;
        }
        if (predicted > 0) {
            m.precision = static_cast<double>(tp) / static_cast<double>(predicted);
        } else {
            r.zero_division = true;
        }
        m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        r.macro_precision += m.precision;
        r.macro_recall += m.recall;
        r.macro_f1 += m.f1;
        r.per_class.push_back(std::move(m));
    }
    const auto c = static_cast<double>(C);
    r.accuracy = static_cast<double>(correct) / static_cast<double>(total);
    r.macro_precision /= c;
    r.macro_recall /= c;
    r.macro_f1 /= c;
    r.macro_accuracy = r.macro_recall;
    return r;
}

std::pair<double, double> aggregate_mean_std(std::span<const double> values) {
    if (values.empty()) throw InvalidArgument("aggregate_mean_std: empty input");
    const auto n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    return {mean, std::sqrt(sq / n)};
}

std::string report_csv(const ClassificationReport& r) {
    std::string out = "label,precision,recall,f1,support\n";
    std::size_t total = 0;
    for (const auto& m : r.per_class) {
        out += fmt::format("{},{},{},{},{}\n", m.label, m.precision, m.recall, m.f1, m.support);
        total += m.support;
    }
    out += fmt::format("accuracy,,,{},{}\n", r.accuracy, total);
    out += fmt::format("macro_accuracy,,,{},{}\n", r.macro_accuracy, total);
    out += fmt::format("macro avg,{},{},{},{}\n", r.macro_precision, r.macro_recall, r.macro_f1, total);
    return out;
}

nlohmann::json to_json(const ClassificationReport& r) {
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& m : r.per_class) {
        classes.push_back(
            {{"label", m.label}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}});
    }
    return {{"accuracy", r.accuracy},
            {"macro_accuracy", r.macro_accuracy},
            {"macro_precision", r.macro_precision},
            {"macro_recall", r.macro_recall},
            {"macro_f1", r.macro_f1},
            {"zero_division", r.zero_division},
            {"per_class", std::move(classes)}};
}

std::string confusion_csv(const ConfusionMatrix& cm) {
    std::string out = "true\\pred";
    for (const auto& l : cm.class_labels) out += "," + l;
    out += '\n';
    for (std::size_t i = 0; i < cm.class_labels.size(); ++i) {
        out += cm.class_labels[i];
        for (auto c : cm.counts[i]) out += fmt::format(",{}", c);
        out += '\n';
    }
    return out;
}

}  // namespace stylo
