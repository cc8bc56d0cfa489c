#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "fncstance/stance.hpp"

namespace fncstance::eval {

// counts[gold][predicted], both in Stance order.
struct ConfusionMatrix {
    std::array<std::array<std::uint64_t, kNumStances>, kNumStances> counts{};

    std::uint64_t at(Stance gold, Stance predicted) const {
        return counts[index_of(gold)][index_of(predicted)];
    }
    void add(Stance gold, Stance predicted, std::uint64_t n = 1) {
        counts[index_of(gold)][index_of(predicted)] += n;
    }
    std::uint64_t total() const;
    std::uint64_t trace() const;
    std::uint64_t row_total(Stance gold) const;

    ConfusionMatrix& operator+=(const ConfusionMatrix& other);
    friend ConfusionMatrix operator+(ConfusionMatrix a, const ConfusionMatrix& b) { return a += b; }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Throws ParameterError on length mismatch or empty input.
ConfusionMatrix confusion(std::span<const Stance> golds, std::span<const Stance> preds);

// 100 * (0.25 * related/unrelated accuracy + 0.75 * exact accuracy on
// gold-related pairs). The second term is 0 without gold-related pairs.
double score_accuracy_mix(const ConfusionMatrix& cm);

// FNC-1 scorer: 0.25 per correct related/unrelated call plus 0.75 per exact
// related stance, as a percentage of the attainable maximum.
double score_official_weighted(const ConfusionMatrix& cm);

struct EvalReport {
    ConfusionMatrix confusion;
    std::array<double, kNumStances> class_accuracy{};  // percent
    std::array<bool, kNumStances> empty_class{};       // row had no gold pairs
    double overall_accuracy = 0.0;                     // percent
    double score_accuracy_mix = 0.0;
    double score_official_weighted = 0.0;

    // official minus literal formula, in points.
    double score_variant_gap() const { return score_official_weighted - score_accuracy_mix; }
};

EvalReport report(const ConfusionMatrix& cm);
EvalReport report(std::span<const Stance> golds, std::span<const Stance> preds);

// Aligned table with the confusion matrix, class accuracies and both scores.
void write_table(std::ostream& out, const EvalReport& r);
// key=value lines, two decimals.
void write_key_values(std::ostream& out, const EvalReport& r);

// Four whitespace-separated rows of four counts, gold-major.
ConfusionMatrix read_confusion(std::istream& in);
void write_confusion(std::ostream& out, const ConfusionMatrix& cm);

}  // namespace fncstance::eval
