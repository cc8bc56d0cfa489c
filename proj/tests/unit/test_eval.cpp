#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fncstance/error.hpp"
#include "fncstance/eval.hpp"
#include "fncstance/random.hpp"
#include "synthetic.hpp"

using namespace fncstance;
using namespace fncstance::eval;

namespace {

// Independent per-pair oracle of the challenge scorer.
double official_oracle(const std::vector<Stance>& g, const std::vector<Stance>& p) {
    double points = 0, max = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const bool gr = g[i] != Stance::Unrelated;
        const bool pr = p[i] != Stance::Unrelated;
        max += gr ? 1.0 : 0.25;
        if (gr == pr) points += 0.25;
        if (gr && g[i] == p[i]) points += 0.75;
    }
    return 100.0 * points / max;
}

double literal_oracle(const std::vector<Stance>& g, const std::vector<Stance>& p) {
    double binary = 0, related = 0, exact = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const bool gr = g[i] != Stance::Unrelated;
        binary += gr == (p[i] != Stance::Unrelated);
        if (gr) {
            ++related;
            exact += g[i] == p[i];
        }
    }
    const double s1 = binary / static_cast<double>(g.size());
    const double s2 = related > 0 ? exact / related : 0.0;
    return 100.0 * (0.25 * s1 + 0.75 * s2);
}

std::pair<std::vector<Stance>, std::vector<Stance>> random_labels(Rng& rng, std::size_t n) {
    std::vector<Stance> g(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = static_cast<Stance>(rng.next() % 4);
        p[i] = rng.uniform() < 0.5 ? g[i] : static_cast<Stance>(rng.next() % 4);
    }
    return {g, p};
}

}  // namespace

TEST_CASE("confusion counts gold rows and predicted columns") {
    const std::vector<Stance> ten(10, Stance::Agree);
    const auto cm = confusion(ten, ten);
    CHECK(cm.at(Stance::Agree, Stance::Agree) == 10);
    CHECK(cm.total() == 10);
    CHECK(cm.trace() == 10);
    const std::vector<Stance> g{Stance::Discuss}, p{Stance::Unrelated};
    const auto one = confusion(g, p);
    CHECK(one.at(Stance::Discuss, Stance::Unrelated) == 1);
    CHECK(one.trace() == 0);
    CHECK_THROWS_AS(confusion(ten, g), ParameterError);
    CHECK_THROWS_AS(confusion({}, {}), ParameterError);
}

TEST_CASE("reference confusion matrix yields the expected metrics") {
    const auto cm = testing::reference_confusion();
    REQUIRE(cm.total() == 25413);
    const auto r = report(cm);
    CHECK(std::abs(r.score_official_weighted - 83.08) <= 0.02);
    CHECK(r.score_official_weighted == doctest::Approx(100.0 * 9680.5 / 11651.25));
    CHECK(std::abs(r.class_accuracy[0] - 43.82) <= 0.01);
    CHECK(std::abs(r.class_accuracy[1] - 6.31) <= 0.01);
    CHECK(std::abs(r.class_accuracy[2] - 85.68) <= 0.01);
    CHECK(std::abs(r.class_accuracy[3] - 98.04) <= 0.01);
    CHECK(std::abs(r.overall_accuracy - 89.29) <= 0.02);
    CHECK(r.overall_accuracy == doctest::Approx(100.0 * 22693 / 25413));
    CHECK(std::abs(r.score_accuracy_mix - 74.15) <= 0.05);
    CHECK(r.score_accuracy_mix ==
          doctest::Approx(100.0 * (0.25 * 24613.0 / 25413 + 0.75 * 4703.0 / 7064)));
    CHECK(r.score_variant_gap() > 8.9);

    ConfusionMatrix all_unrelated;
    for (Stance s : kAllStances) all_unrelated.add(s, Stance::Unrelated, cm.row_total(s));
    CHECK(std::abs(score_official_weighted(all_unrelated) - 39.37) <= 0.02);
}

TEST_CASE("score edge cases") {
    const std::vector<Stance> g{Stance::Agree, Stance::Disagree, Stance::Discuss, Stance::Unrelated};
    CHECK(score_official_weighted(confusion(g, g)) == 100.0);
    CHECK(score_accuracy_mix(confusion(g, g)) == 100.0);

    const std::vector<Stance> u(5, Stance::Unrelated);
    CHECK(score_accuracy_mix(confusion(u, u)) == 25.0);
    CHECK(score_official_weighted(confusion(u, u)) == 100.0);
    CHECK_THROWS_AS(score_official_weighted(ConfusionMatrix{}), ParameterError);
}

TEST_CASE("report handles single-pair and all-wrong inputs") {
    const std::vector<Stance> g{Stance::Discuss};
    const auto r = report(g, g);
    CHECK(r.overall_accuracy == 100.0);
    CHECK(r.class_accuracy[2] == 100.0);
    CHECK(r.class_accuracy[0] == 0.0);
    CHECK(r.empty_class == std::array<bool, 4>{true, true, false, true});

    const std::vector<Stance> gw{Stance::Agree, Stance::Unrelated};
    const std::vector<Stance> pw{Stance::Unrelated, Stance::Discuss};
    const auto w = report(gw, pw);
    CHECK(w.overall_accuracy == 0.0);
    CHECK(w.score_official_weighted == 0.0);
    CHECK(w.score_accuracy_mix == 0.0);
}

TEST_CASE("scores match per-pair oracles and satisfy the stated properties") {
    Rng rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        auto [g, p] = random_labels(rng, 1 + rng.next() % 60);
        const auto cm = confusion(g, p);
        const double off = score_official_weighted(cm);
        const double lit = score_accuracy_mix(cm);
        CHECK(off == doctest::Approx(official_oracle(g, p)));
        CHECK(lit == doctest::Approx(literal_oracle(g, p)));
        CHECK(off >= 0.0);
        CHECK(off <= 100.0);
        CHECK(lit >= 0.0);
        CHECK(lit <= 100.0);

        const bool exact = g == p;
        const bool has_related =
            std::any_of(g.begin(), g.end(), [](Stance s) { return s != Stance::Unrelated; });
        CHECK((off == 100.0) == exact);
        // The literal formula caps at 25 without related gold pairs.
        if (has_related) CHECK((lit == 100.0) == exact);

        // The binary credit alone never beats the full score.
        double binary = 0;
        std::uint64_t related = 0;
        for (Stance gs : kAllStances) {
            if (gs != Stance::Unrelated) related += cm.row_total(gs);
            for (Stance ps : kAllStances) {
                if ((gs == Stance::Unrelated) == (ps == Stance::Unrelated)) binary += cm.at(gs, ps);
            }
        }
        const double max = 0.25 * static_cast<double>(cm.total()) + 0.75 * static_cast<double>(related);
        CHECK(off >= 100.0 * 0.25 * binary / max - 1e-12);

        std::vector<std::size_t> order(g.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(order);
        std::vector<Stance> g2, p2;
        for (std::size_t i : order) {
            g2.push_back(g[i]);
            p2.push_back(p[i]);
        }
        const auto r1 = report(g, p);
        const auto r2 = report(g2, p2);
        CHECK(r1.confusion == r2.confusion);
        CHECK(r1.score_official_weighted == r2.score_official_weighted);
        CHECK(r1.class_accuracy == r2.class_accuracy);

        auto [g3, p3] = random_labels(rng, 1 + rng.next() % 30);
        std::vector<Stance> gm = g, pm = p;
        gm.insert(gm.end(), g3.begin(), g3.end());
        pm.insert(pm.end(), p3.begin(), p3.end());
        CHECK(confusion(gm, pm) == cm + confusion(g3, p3));

        const auto r = report(cm);
        CHECK(r.overall_accuracy == doctest::Approx(100.0 * cm.trace() / cm.total()));
        for (Stance s : kAllStances) {
            const auto row = cm.row_total(s);
            CHECK(r.class_accuracy[index_of(s)] ==
                  doctest::Approx(row ? 100.0 * cm.at(s, s) / row : 0.0));
            CHECK(r.empty_class[index_of(s)] == (row == 0));
        }
    }
}

TEST_CASE("report files") {
    const auto r = report(testing::reference_confusion());
    std::ostringstream kv;
    write_key_values(kv, r);
    const auto s = kv.str();
    CHECK(s.find("score_official_weighted=83.09\n") != std::string::npos);
    CHECK(s.find("score_accuracy_mix=74.15\n") != std::string::npos);
    CHECK(s.find("score_variants_differ=1\n") != std::string::npos);
    // 22693 / 25413 = 89.2968..., printed rounded.
    CHECK(s.find("overall_accuracy=89.30\n") != std::string::npos);
    CHECK(s.find("class_accuracy_disagree=6.31\n") != std::string::npos);
    CHECK(s.find("confusion_agree_discuss=945\n") != std::string::npos);

    std::ostringstream table;
    write_table(table, r);
    CHECK(table.str().find("83.09") != std::string::npos);
    CHECK(table.str().find("17990") != std::string::npos);

    std::stringstream cm_text;
    write_confusion(cm_text, r.confusion);
    CHECK(read_confusion(cm_text) == r.confusion);
    std::istringstream bad("1 2 3");
    CHECK_THROWS_AS(read_confusion(bad), FormatError);
    std::istringstream neg("1 2 3 4 5 6 7 8 9 10 11 12 13 14 15 -1");
    CHECK_THROWS_AS(read_confusion(neg), FormatError);
}
