#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace stylo {

/// counts[i][j]: documents of true class i predicted as class j.
struct ConfusionMatrix {
    std::vector<std::string> class_labels;
    std::vector<std::vector<std::size_t>> counts;

    std::size_t total() const noexcept;
};

struct ClassMetrics {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct ClassificationReport {
    double accuracy = 0.0;
    /// Unweighted mean of per-class recall over all C classes.
    double macro_accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    std::vector<ClassMetrics> per_class;
    /// Set when some class has no true or no predicted samples; the affected
    /// recall or precision was taken as 0.
    bool zero_division = false;
};

/// Throws InvalidArgument on length mismatch, empty input, or a label not in
/// class_labels.
ConfusionMatrix confusion_matrix(std::span<const std::string> y_true, std::span<const std::string> y_pred,
                                 std::span<const std::string> class_labels);

/// Throws InvalidArgument if the matrix is empty.
ClassificationReport report(const ConfusionMatrix& cm);

/// Mean and population standard deviation. Throws InvalidArgument if empty.
std::pair<double, double> aggregate_mean_std(std::span<const double> values);

/// One row per class (label,precision,recall,f1,support) followed by
/// accuracy, macro_accuracy and macro avg summary rows.
std::string report_csv(const ClassificationReport& r);
nlohmann::json to_json(const ClassificationReport& r);
/// Header row and first column carry the labels.
std::string confusion_csv(const ConfusionMatrix& cm);

}  // namespace stylo
