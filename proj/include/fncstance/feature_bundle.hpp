#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fncstance/stance.hpp"

namespace fncstance {

// Which feature branches are enabled. Names used on the command line and in
// cache headers: "neural", "stat", "ext".
struct BranchSet {
    bool neural = true;
    bool statistical = true;
    bool external = true;

    bool any() const { return neural || statistical || external; }

    // Comma separated list; throws ConfigError on unknown names or an empty set.
    static BranchSet parse(std::string_view list);
    std::string to_string() const;

    friend bool operator==(const BranchSet&, const BranchSet&) = default;
};

inline constexpr std::string_view kNeuralBranch = "neural";
inline constexpr std::string_view kStatisticalBranch = "stat";
inline constexpr std::string_view kExternalBranch = "ext";

// Per-pair features. Disabled branches leave their block empty.
struct FeatureBundle {
    std::string key;                  // "<body id>|<headline>"
    std::vector<double> neural;       // product block then abs-difference block
    std::vector<double> statistical;  // headline TF then body TF
    std::vector<double> external;     // 50 hand-crafted slots
    std::optional<Stance> label;

    // Block by branch name; throws ShapeError for an unknown name.
    const std::vector<double>& block(std::string_view branch) const;

    friend bool operator==(const FeatureBundle&, const FeatureBundle&) = default;
};

}  // namespace fncstance
