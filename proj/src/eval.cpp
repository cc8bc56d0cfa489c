#include "fncstance/eval.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

#include "fncstance/error.hpp"

namespace fncstance::eval {

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t n = 0;
    for (const auto& row : counts) {
        for (auto c : row) n += c;
    }
    return n;
}

std::uint64_t ConfusionMatrix::trace() const {
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < kNumStances; ++i) n += counts[i][i];
    return n;
}

std::uint64_t ConfusionMatrix::row_total(Stance gold) const {
    std::uint64_t n = 0;
    for (auto c : counts[index_of(gold)]) n += c;
    return n;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
    for (std::size_t i = 0; i < kNumStances; ++i) {
        for (std::size_t j = 0; j < kNumStances; ++j) counts[i][j] += other.counts[i][j];
    }
    return *this;
}

ConfusionMatrix confusion(std::span<const Stance> golds, std::span<const Stance> preds) {
    if (golds.size() != preds.size()) {
        throw ParameterError("confusion: " + std::to_string(golds.size()) + " gold labels vs " +
                             std::to_string(preds.size()) + " predictions");
    }
    if (golds.empty()) throw ParameterError("confusion: no pairs to score");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < golds.size(); ++i) cm.add(golds[i], preds[i]);
    return cm;
}

namespace {

struct Tallies {
    double total = 0;
    double related_gold = 0;
    double binary_correct = 0;  // correct related/unrelated call
    double exact_related = 0;   // gold related and stance exactly right
};

Tallies tally(const ConfusionMatrix& cm) {
    Tallies t;
    for (Stance g : kAllStances) {
        for (Stance p : kAllStances) {
            const double c = static_cast<double>(cm.at(g, p));
            t.total += c;
            if (is_related(g)) t.related_gold += c;
            if (is_related(g) == is_related(p)) t.binary_correct += c;
            if (is_related(g) && g == p) t.exact_related += c;
        }
    }
    return t;
}

}  // namespace

double score_accuracy_mix(const ConfusionMatrix& cm) {
    const Tallies t = tally(cm);
    if (t.total == 0) throw ParameterError("cannot score an empty confusion matrix");
    const double score1 = t.binary_correct / t.total;
    const double score2 = t.related_gold > 0 ? t.exact_related / t.related_gold : 0.0;
    return 100.0 * (0.25 * score1 + 0.75 * score2);
}

double score_official_weighted(const ConfusionMatrix& cm) {
    const Tallies t = tally(cm);
    const double max_points = 0.25 * t.total + 0.75 * t.related_gold;
    if (max_points == 0) throw ParameterError("cannot score an empty confusion matrix");
    const double points = 0.25 * t.binary_correct + 0.75 * t.exact_related;
    return 100.0 * points / max_points;
}

EvalReport report(const ConfusionMatrix& cm) {
    EvalReport r;
    r.confusion = cm;
    for (Stance s : kAllStances) {
        const auto row = cm.row_total(s);
        r.empty_class[index_of(s)] = row == 0;
        r.class_accuracy[index_of(s)] =
            row == 0 ? 0.0 : 100.0 * static_cast<double>(cm.at(s, s)) / static_cast<double>(row);
    }
    const auto total = cm.total();
    r.overall_accuracy =
        total == 0 ? 0.0 : 100.0 * static_cast<double>(cm.trace()) / static_cast<double>(total);
    r.score_accuracy_mix = score_accuracy_mix(cm);
    r.score_official_weighted = score_official_weighted(cm);
    return r;
}

EvalReport report(std::span<const Stance> golds, std::span<const Stance> preds) {
    return report(confusion(golds, preds));
}

namespace {

std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
}

}  // namespace

void write_table(std::ostream& out, const EvalReport& r) {
    constexpr std::size_t w = 11;
    out << pad("gold\\pred", w);
    for (Stance s : kAllStances) out << pad(std::string(to_string(s)), w);
    out << pad("accuracy%", w) << '\n';
    for (Stance g : kAllStances) {
        out << pad(std::string(to_string(g)), w);
        for (Stance p : kAllStances) out << pad(std::to_string(r.confusion.at(g, p)), w);
        std::string acc = fixed2(r.class_accuracy[index_of(g)]);
        if (r.empty_class[index_of(g)]) acc += " (empty)";
        out << pad(acc, w) << '\n';
    }
    out << '\n';
    out << "pairs scored:              " << r.confusion.total() << '\n';
    out << "overall accuracy:          " << fixed2(r.overall_accuracy) << "%\n";
    out << "FNC score (official):      " << fixed2(r.score_official_weighted) << '\n';
    out << "FNC score (0.25/0.75 mix): " << fixed2(r.score_accuracy_mix) << '\n';
    out << "note: the official score normalizes by attainable points; the plain "
           "0.25*Score1 + 0.75*Score2 mix differs by "
        << fixed2(r.score_variant_gap()) << " points on this matrix\n";
}

void write_key_values(std::ostream& out, const EvalReport& r) {
    out << "pairs=" << r.confusion.total() << '\n';
    out << "score_official_weighted=" << fixed2(r.score_official_weighted) << '\n';
    out << "score_accuracy_mix=" << fixed2(r.score_accuracy_mix) << '\n';
    out << "score_variant_gap=" << fixed2(r.score_variant_gap()) << '\n';
    out << "score_variants_differ=" << (fixed2(r.score_variant_gap()) != "0.00" ? 1 : 0) << '\n';
    out << "overall_accuracy=" << fixed2(r.overall_accuracy) << '\n';
    for (Stance s : kAllStances) {
        out << "class_accuracy_" << to_string(s) << '=' << fixed2(r.class_accuracy[index_of(s)]) << '\n';
        out << "class_empty_" << to_string(s) << '=' << (r.empty_class[index_of(s)] ? 1 : 0) << '\n';
    }
    for (Stance g : kAllStances) {
        for (Stance p : kAllStances) {
            out << "confusion_" << to_string(g) << '_' << to_string(p) << '=' << r.confusion.at(g, p)
                << '\n';
        }
    }
}

ConfusionMatrix read_confusion(std::istream& in) {
    ConfusionMatrix cm;
    for (auto& row : cm.counts) {
        for (auto& c : row) {
            long long v = -1;
            if (!(in >> v) || v < 0) {
                throw FormatError("confusion matrix needs 16 non-negative integer counts");
            }
            c = static_cast<std::uint64_t>(v);
        }
    }
    std::string extra;
    if (in >> extra) throw FormatError("confusion matrix has more than 16 entries");
    return cm;
}

void write_confusion(std::ostream& out, const ConfusionMatrix& cm) {
    for (const auto& row : cm.counts) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << row[j];
        out << '\n';
    }
}

}  // namespace fncstance::eval
