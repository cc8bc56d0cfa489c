#include "fncstance/stance.hpp"

#include <cctype>
#include <string>

#include "fncstance/error.hpp"

namespace fncstance {

std::string_view to_string(Stance s) {
    switch (s) {
        case Stance::Agree: return "agree";
        case Stance::Disagree: return "disagree";
        case Stance::Discuss: return "discuss";
        case Stance::Unrelated: return "unrelated";
    }
    return "?";
}

Stance parse_stance(std::string_view label) {
    auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (!label.empty() && is_space(label.front())) label.remove_prefix(1);
    while (!label.empty() && is_space(label.back())) label.remove_suffix(1);
    std::string lowered(label);
    for (char& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (Stance s : kAllStances) {
        if (lowered == to_string(s)) return s;
    }
    throw LabelError("unknown stance label '" + std::string(label) + "'");
}

}  // namespace fncstance
