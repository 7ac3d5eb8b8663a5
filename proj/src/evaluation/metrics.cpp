#include "netfeat/evaluation/metrics.hpp"

#include "netfeat/plugins/feature_record.hpp"
#include "netfeat/util/config.hpp"
#include "netfeat/util/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_map>

namespace netfeat::evaluation {

using plugins::format_number;
using plugins::kUndefined;

std::uint64_t ConfusionMatrix::total() const
{
    std::uint64_t n = 0;
    for (const auto& row : counts)
        for (auto c : row)
            n += c;
    return n;
}

std::uint64_t ConfusionMatrix::trace() const
{
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < counts.size(); ++i)
        n += counts[i][i];
    return n;
}

std::optional<std::size_t> ConfusionMatrix::index_of(const std::string& label) const
{
    const auto it = std::lower_bound(classes.begin(), classes.end(), label);
    if (it == classes.end() || *it != label)
        return std::nullopt;
    return static_cast<std::size_t>(it - classes.begin());
}

ConfusionMatrix confusion(const std::vector<std::string>& truth, const std::vector<std::string>& pred)
{
    if (truth.size() != pred.size())
        throw EvaluationError("truth and prediction lengths differ: " + std::to_string(truth.size()) + " vs " +
                              std::to_string(pred.size()));
    if (truth.empty())
        throw EvaluationError("no items to score");
    std::set<std::string> labels(truth.begin(), truth.end());
    labels.insert(pred.begin(), pred.end());

    ConfusionMatrix cm;
    cm.classes.assign(labels.begin(), labels.end());
    cm.counts.assign(cm.classes.size(), std::vector<std::uint64_t>(cm.classes.size(), 0));
    for (std::size_t i = 0; i < truth.size(); ++i)
        ++cm.counts[*cm.index_of(truth[i])][*cm.index_of(pred[i])];
    return cm;
}

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm)
{
    const std::uint64_t total = cm.total();
    if (total == 0)
        throw EvaluationError("empty confusion matrix");
    const std::size_t k = cm.classes.size();

    ClassificationMetrics m;
    m.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
    for (std::size_t c = 0; c < k; ++c) {
        std::uint64_t predicted = 0;
        std::uint64_t actual = 0;
        for (std::size_t o = 0; o < k; ++o) {
            predicted += cm.counts[o][c];
            actual += cm.counts[c][o];
        }
        const double tp = static_cast<double>(cm.counts[c][c]);
        ClassMetrics cls;
        cls.label = cm.classes[c];
        cls.support = actual;
        if (predicted > 0)
            cls.precision = tp / static_cast<double>(predicted);
        else
            cls.zero_division = true;
        if (actual > 0)
            cls.recall = tp / static_cast<double>(actual);
        else
            cls.zero_division = true;
        if (cls.precision + cls.recall > 0)
            cls.f1 = 2 * cls.precision * cls.recall / (cls.precision + cls.recall);

        m.per_class.push_back(std::move(cls));
    }

    // Sum in label order so the averages do not depend on the class order of `cm`.
    std::vector<const ClassMetrics*> by_label;
    for (const auto& cls : m.per_class)
        by_label.push_back(&cls);
    std::sort(by_label.begin(), by_label.end(),
              [](const ClassMetrics* a, const ClassMetrics* b) { return a->label < b->label; });
    for (const ClassMetrics* cls : by_label) {
        const double w = static_cast<double>(cls->support) / static_cast<double>(total);
        m.macro_precision += cls->precision / static_cast<double>(k);
        m.macro_recall += cls->recall / static_cast<double>(k);
        m.macro_f1 += cls->f1 / static_cast<double>(k);
        m.weighted_precision += cls->precision * w;
        m.weighted_recall += cls->recall * w;
        m.weighted_f1 += cls->f1 * w;
    }
    return m;
}

ChallengeScore challenge_score(const ConfusionMatrix& cm, const std::string& positive)
{
    if (cm.classes.size() > 2)
        throw EvaluationError("challenge scoring needs a binary problem, got " + std::to_string(cm.classes.size()) +
                              " classes");
    const auto pos = cm.index_of(positive);
    if (cm.classes.size() == 2 && !pos)
        throw EvaluationError("positive class '" + positive + "' not among the labels");

    ChallengeScore s;
    for (std::size_t t = 0; t < cm.classes.size(); ++t) {
        for (std::size_t p = 0; p < cm.classes.size(); ++p) {
            const bool tp = pos && t == *pos;
            const bool pp = pos && p == *pos;
            const std::uint64_t n = cm.counts[t][p];
            if (tp && pp)
                s.tp += n;
            else if (tp)
                s.fn += n;
            else if (pp)
                s.fp += n;
            else
                s.tn += n;
        }
    }
    s.tpr = s.tp + s.fn == 0 ? kUndefined : static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn);
    s.far = s.tn + s.fp == 0 ? kUndefined : static_cast<double>(s.fp) / static_cast<double>(s.tn + s.fp);
    s.score = plugins::is_undefined(s.tpr) || plugins::is_undefined(s.far) ? kUndefined : s.tpr * (1.0 - s.far);
    return s;
}

std::vector<std::pair<std::string, std::string>> read_label_csv(const std::filesystem::path& path)
{
    std::vector<util::CsvRow> rows;
    try {
        rows = util::read_csv_file(path);
    } catch (const util::CsvError& e) {
        throw EvaluationError(e.what());
    }
    if (rows.empty() || rows[0].size() != 2 || util::to_lower(util::trim(rows[0][0])) != "id" ||
        util::to_lower(util::trim(rows[0][1])) != "label")
        throw EvaluationError(path.string() + ": expected header 'id,label'");

    std::vector<std::pair<std::string, std::string>> out;
    std::set<std::string> seen;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 2)
            throw EvaluationError(path.string() + ": row " + std::to_string(i + 1) + " has " +
                                  std::to_string(rows[i].size()) + " columns, expected 2");
        std::string id = util::trim(rows[i][0]);
        if (!seen.insert(id).second)
            throw EvaluationError(path.string() + ": duplicate id '" + id + "'");
        out.emplace_back(std::move(id), util::trim(rows[i][1]));
    }
    return out;
}

std::pair<std::vector<std::string>, std::vector<std::string>> join_labels(
    const std::vector<std::pair<std::string, std::string>>& truth,
    const std::vector<std::pair<std::string, std::string>>& pred)
{
    std::unordered_map<std::string, const std::string*> predicted;
    for (const auto& [id, label] : pred)
        predicted.emplace(id, &label);

    std::pair<std::vector<std::string>, std::vector<std::string>> out;
    std::set<std::string> truth_ids;
    for (const auto& [id, label] : truth) {
        const auto it = predicted.find(id);
        if (it == predicted.end())
            throw EvaluationError("id '" + id + "' has no prediction");
        out.first.push_back(label);
        out.second.push_back(*it->second);
        truth_ids.insert(id);
    }
    for (const auto& [id, label] : pred)
        if (!truth_ids.contains(id))
            throw EvaluationError("id '" + id + "' has a prediction but no ground truth");
    return out;
}

void write_metrics_csv(std::ostream& out, const ClassificationMetrics& m, const ChallengeScore* challenge)
{
    util::write_csv_row(out, {"metric", "class", "value"});
    const auto put = [&](const std::string& metric, const std::string& cls, double v) {
        util::write_csv_row(out, {metric, cls, format_number(v)});
    };
    put("accuracy", "", m.accuracy);
    for (const ClassMetrics& c : m.per_class) {
        put("precision", c.label, c.precision);
        put("recall", c.label, c.recall);
        put("f1", c.label, c.f1);
        put("support", c.label, static_cast<double>(c.support));
        put("zero_division", c.label, c.zero_division ? 1.0 : 0.0);
    }
    put("macro_precision", "", m.macro_precision);
    put("macro_recall", "", m.macro_recall);
    put("macro_f1", "", m.macro_f1);
    put("weighted_precision", "", m.weighted_precision);
    put("weighted_recall", "", m.weighted_recall);
    put("weighted_f1", "", m.weighted_f1);
    if (challenge) {
        put("tp", "", static_cast<double>(challenge->tp));
        put("fn", "", static_cast<double>(challenge->fn));
        put("fp", "", static_cast<double>(challenge->fp));
        put("tn", "", static_cast<double>(challenge->tn));
        put("tpr", "", challenge->tpr);
        put("far", "", challenge->far);
        put("score", "", challenge->score);
    }
}

namespace {

std::string fmt(double v)
{
    if (plugins::is_undefined(v))
        return "undefined";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

} // namespace

void write_metrics_text(std::ostream& out, const ConfusionMatrix& cm, const ClassificationMetrics& m,
                        const ChallengeScore* challenge, const std::string& positive)
{
    out << "items     " << cm.total() << "\n";
    out << "classes   " << cm.classes.size() << "\n";
    out << "accuracy  " << fmt(m.accuracy) << "\n\n";

    std::size_t width = 5;
    for (const auto& c : m.per_class)
        width = std::max(width, c.label.size());
    const auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w)
            s.append(w - s.size(), ' ');
        return s;
    };
    out << pad("class", width) << "  precision  recall  f1      support\n";
    for (const auto& c : m.per_class) {
        out << pad(c.label, width) << "  " << pad(fmt(c.precision), 9) << "  " << pad(fmt(c.recall), 6) << "  "
            << pad(fmt(c.f1), 6) << "  " << c.support << (c.zero_division ? "  (zero division)" : "") << "\n";
    }
    out << pad("macro", width) << "  " << pad(fmt(m.macro_precision), 9) << "  " << pad(fmt(m.macro_recall), 6)
        << "  " << fmt(m.macro_f1) << "\n";
    out << pad("weighted", width) << "  " << pad(fmt(m.weighted_precision), 9) << "  "
        << pad(fmt(m.weighted_recall), 6) << "  " << fmt(m.weighted_f1) << "\n";
    if (challenge) {
        out << "\npositive  " << positive << "\n";
        out << "TP " << challenge->tp << "  FN " << challenge->fn << "  FP " << challenge->fp << "  TN "
            << challenge->tn << "\n";
        out << "TPR       " << fmt(challenge->tpr) << "\n";
        out << "FAR       " << fmt(challenge->far) << "\n";
        out << "score     " << fmt(challenge->score) << "  (TPR*(1-FAR))\n";
    }
}

} // namespace netfeat::evaluation
