#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace fncstance {

// Label order is fixed: it is the row/column order of confusion matrices, the
// output order of the classifier, and the argmax tie-break order.
enum class Stance : std::uint8_t { Agree = 0, Disagree = 1, Discuss = 2, Unrelated = 3 };

inline constexpr std::size_t kNumStances = 4;
inline constexpr std::array<Stance, kNumStances> kAllStances{
    Stance::Agree, Stance::Disagree, Stance::Discuss, Stance::Unrelated};

constexpr std::size_t index_of(Stance s) { return static_cast<std::size_t>(s); }
constexpr bool is_related(Stance s) { return s != Stance::Unrelated; }

// Lowercase canonical name ("agree", ...).
std::string_view to_string(Stance s);

// Case-insensitive, surrounding whitespace ignored. Throws LabelError.
Stance parse_stance(std::string_view label);

}  // namespace fncstance
