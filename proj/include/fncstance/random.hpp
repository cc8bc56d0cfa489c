#pragma once

#include <cstdint>
#include <random>

namespace fncstance {

// mt19937_64 is bit-exact across standard libraries; the distribution adapters
// are not, so conversions to doubles are done here by hand.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Fisher-Yates, j = next() % (i + 1).
    template <typename Container>
    void shuffle(Container& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(engine_() % i);
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace fncstance
