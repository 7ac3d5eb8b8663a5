#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace netfeat::evaluation {

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConfusionMatrix {
    /// Sorted class labels.
    std::vector<std::string> classes;
    /// counts[t][p]: items of true class t predicted as p.
    std::vector<std::vector<std::uint64_t>> counts;

    std::uint64_t total() const;
    std::uint64_t trace() const;
    /// Index of a class, or nullopt.
    std::optional<std::size_t> index_of(const std::string& label) const;
};

/// Classes are the sorted union of both lists. Throws EvaluationError on a
/// length mismatch or empty input.
ConfusionMatrix confusion(const std::vector<std::string>& truth, const std::vector<std::string>& pred);

struct ClassMetrics {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;
    /// Set when a zero denominator forced one of the values above to 0.
    bool zero_division = false;
};

struct ClassificationMetrics {
    double accuracy = 0.0;
    std::vector<ClassMetrics> per_class;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double weighted_precision = 0.0;
    double weighted_recall = 0.0;
    double weighted_f1 = 0.0;
};

/// Throws EvaluationError for an empty matrix.
ClassificationMetrics classification_metrics(const ConfusionMatrix& cm);

struct ChallengeScore {
    std::uint64_t tp = 0, fn = 0, fp = 0, tn = 0;
    /// TP/(TP+FN); undefined (NaN) without positives.
    double tpr;
    /// FP/(TN+FP); undefined without negatives.
    double far;
    /// TPR*(1-FAR); undefined if either rate is.
    double score;
};

/// Binary detection score for the named positive class. Every class other
/// than `positive` counts as negative, so the matrix may hold one or two
/// classes. Throws EvaluationError for more than two classes, or for two
/// classes neither of which is `positive`.
ChallengeScore challenge_score(const ConfusionMatrix& cm, const std::string& positive);

/// Rows of an "id,label" CSV (header required), in file order. Throws
/// EvaluationError on a bad header, wrong column count or duplicate id.
std::vector<std::pair<std::string, std::string>> read_label_csv(const std::filesystem::path& path);

/// Aligns predictions to truth by id (truth order). Throws EvaluationError
/// naming the first id present in only one of the inputs.
std::pair<std::vector<std::string>, std::vector<std::string>> join_labels(
    const std::vector<std::pair<std::string, std::string>>& truth,
    const std::vector<std::pair<std::string, std::string>>& pred);

/// metric,class,value rows: accuracy, per-class precision/recall/f1/support,
/// macro_* and weighted_*, then tp/fn/fp/tn/tpr/far/score when `challenge` is given.
void write_metrics_csv(std::ostream& out, const ClassificationMetrics& m, const ChallengeScore* challenge = nullptr);
void write_metrics_text(std::ostream& out, const ConfusionMatrix& cm, const ClassificationMetrics& m,
                        const ChallengeScore* challenge = nullptr, const std::string& positive = {});

} // namespace netfeat::evaluation
