#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "fncstance/embeddings.hpp"
#include "fncstance/error.hpp"
#include "fncstance/random.hpp"
#include "synthetic.hpp"

using namespace fncstance;

namespace {

void put_u32(std::ofstream& f, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) f.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::ofstream& f, float x) {
    std::uint32_t bits;
    std::memcpy(&bits, &x, 4);
    put_u32(f, bits);
}

// Hand-assembled STVEC1 file; record i holds value (i + 1) * 0.5 at slot j % 7.
std::string write_binary(const std::string& path, const std::vector<std::string>& keys,
                         std::uint32_t dim, std::uint32_t bad_dim_for_last = 0) {
    std::ofstream f(path, std::ios::binary);
    f.write("STVEC1", 6);
    put_u32(f, static_cast<std::uint32_t>(keys.size()));
    put_u32(f, dim);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        put_u32(f, static_cast<std::uint32_t>(keys[i].size()));
        f.write(keys[i].data(), static_cast<std::streamsize>(keys[i].size()));
        const std::uint32_t d = (bad_dim_for_last && i + 1 == keys.size()) ? bad_dim_for_last : dim;
        for (std::uint32_t j = 0; j < d; ++j) {
            put_f32(f, j % 7 == 0 ? static_cast<float>(i + 1) * 0.5f : 0.0f);
        }
    }
    return path;
}

double norm(const SentenceEmbedding& v) {
    return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

}  // namespace

TEST_CASE("binary store with two 4800-dim records") {
    const auto dir = testing::scratch_dir("emb_binary");
    const auto path = write_binary(dir + "/two.stvec", {"led zeppelin", "robert plant"}, 4800);
    const auto store = EmbeddingStore::load(path);
    CHECK(store.dimension() == 4800);
    REQUIRE(store.size() == 2);
    const auto* v = store.find_key("robert plant");
    REQUIRE(v != nullptr);
    CHECK((*v)[0] == 1.0);
    CHECK((*v)[7] == 1.0);
    CHECK((*v)[1] == 0.0);
    CHECK(store.find_text("Robert   PLANT!") == v);
    CHECK(store.find_key("Robert Plant") == nullptr);

    store.save_binary(dir + "/again.stvec");
    CHECK(testing::read_bytes(dir + "/again.stvec") == testing::read_bytes(path));
}

TEST_CASE("empty record section keeps the declared dimension") {
    const auto dir = testing::scratch_dir("emb_empty");
    const auto store = EmbeddingStore::load(write_binary(dir + "/e.stvec", {}, 4800));
    CHECK(store.size() == 0);
    CHECK(store.dimension() == 4800);
}

TEST_CASE("dimension mismatches and duplicate keys are format errors") {
    const auto dir = testing::scratch_dir("emb_errors");
    try {
        EmbeddingStore::load(write_binary(dir + "/bad.stvec", {"ok", "short one"}, 4800, 4799));
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("short one") != std::string::npos);
    }
    CHECK_THROWS_AS(EmbeddingStore::load(write_binary(dir + "/dup.stvec", {"k", "k"}, 3)),
                    FormatError);
    {
        std::ofstream f(dir + "/bad.txt");
        f << "STVEC-TXT\t3\nabc\t1 2 3\nxyz\t1 2\n";
    }
    CHECK_THROWS_AS(EmbeddingStore::load(dir + "/bad.txt"), FormatError);
    {
        std::ofstream f(dir + "/junk.bin");
        f << "NOTAVEC";
    }
    CHECK_THROWS_AS(EmbeddingStore::load(dir + "/junk.bin"), FormatError);
    EmbeddingStore s(2);
    CHECK_THROWS_AS(s.insert("a", {1.0}), FormatError);
}

TEST_CASE("text store parses and round-trips") {
    const auto dir = testing::scratch_dir("emb_text");
    {
        std::ofstream f(dir + "/s.txt");
        f << "STVEC-TXT\t3\nled zeppelin\t0.5 -1 2.25\nhoax\t1e-3 0 3\n";
    }
    const auto store = EmbeddingStore::load(dir + "/s.txt");
    REQUIRE(store.size() == 2);
    CHECK(*store.find_key("led zeppelin") == SentenceEmbedding{0.5, -1.0, 2.25});
    CHECK(*store.find_key("hoax") == SentenceEmbedding{1e-3, 0.0, 3.0});
    store.save_text(dir + "/t.txt");
    const auto back = EmbeddingStore::load(dir + "/t.txt");
    CHECK(back.entries() == store.entries());
}

TEST_CASE("fallback embedder is deterministic and unit length") {
    CHECK(fallback_embed("", 64, 1) == SentenceEmbedding(64, 0.0));
    CHECK(fallback_embed("!!! ---", 64, 1) == SentenceEmbedding(64, 0.0));
    const auto a = fallback_embed("Led Zeppelin reunion", 4800, 7);
    CHECK(a == fallback_embed("Led Zeppelin reunion", 4800, 7));
    CHECK(a == fallback_embed("led   zeppelin, REUNION", 4800, 7));
    CHECK(a != fallback_embed("Led Zeppelin reunion", 4800, 8));
    CHECK(norm(a) == doctest::Approx(1.0).epsilon(1e-12));
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        std::string t;
        for (std::uint64_t k = 0; k <= rng.next() % 10; ++k) t += "w" + std::to_string(rng.next() % 20) + " ";
        const auto v = fallback_embed(t, 1 + rng.next() % 40, rng.next());
        CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-12));
        for (double x : v) CHECK(std::isfinite(x));
    }
    CHECK_THROWS_AS(fallback_embed("x", 0, 1), ParameterError);
}

TEST_CASE("encoder reports the missing normalized key") {
    EmbeddingStore store(2);
    store.insert("known text", {1.0, 2.0});
    const auto enc = SentenceEncoder::from_store(store);
    CHECK(enc.encode("Known TEXT.") == SentenceEmbedding{1.0, 2.0});
    try {
        enc.encode("Unknown, Text");
        FAIL("expected MissingEmbeddingError");
    } catch (const MissingEmbeddingError& e) {
        CHECK(std::string(e.what()).find("unknown text") != std::string::npos);
    }
    const auto fb = SentenceEncoder::fallback(16, 5);
    CHECK(fb.is_fallback());
    CHECK(fb.encode("anything") == fallback_embed("anything", 16, 5));
}

TEST_CASE("neural features are product and absolute difference") {
    const auto f = neural_features({1, 2}, {3, -1});
    CHECK(f.product == std::vector<double>{3, -2});
    CHECK(f.abs_difference == std::vector<double>{2, 3});
    const auto same = neural_features({0.5, -2}, {0.5, -2});
    CHECK(same.product == std::vector<double>{0.25, 4});
    CHECK(same.abs_difference == std::vector<double>{0, 0});
    CHECK_THROWS_AS(neural_features({1}, {1, 2}), ParameterError);

    Rng rng(9);
    for (int i = 0; i < 100; ++i) {
        SentenceEmbedding u(12), v(12);
        for (auto& x : u) x = rng.uniform(-3, 3);
        for (auto& x : v) x = rng.uniform(-3, 3);
        const auto a = neural_features(u, v);
        const auto b = neural_features(v, u);
        CHECK(a.product == b.product);
        CHECK(a.abs_difference == b.abs_difference);
        for (double x : a.abs_difference) CHECK(x >= 0.0);
    }
}
