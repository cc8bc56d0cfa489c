#include "synthetic.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "fncstance/random.hpp"

namespace fs = std::filesystem;

namespace fncstance::testing {

namespace {

std::string topic_word(std::size_t topic, std::size_t k) {
    static const char* stems[] = {"gov", "sci", "art", "spo", "tec", "med", "eco", "war", "sky", "sea"};
    return std::string(stems[topic % 10]) + "x" + std::to_string(topic) + "w" + std::to_string(k);
}

const std::vector<std::string>& common_words() {
    static const std::vector<std::string> w{"the", "a", "of", "to", "in", "and", "on", "for",
                                            "with", "was", "said", "has", "from", "by", "at"};
    return w;
}

std::string sentence(Rng& rng, std::size_t topic, std::size_t words) {
    std::string s;
    for (std::size_t i = 0; i < words; ++i) {
        if (!s.empty()) s.push_back(' ');
        if (rng.uniform() < 0.4) {
            s += common_words()[rng.next() % common_words().size()];
        } else {
            s += topic_word(topic, rng.next() % 30);
        }
    }
    return s;
}

}  // namespace

Corpus synthetic_corpus(const SyntheticOptions& options) {
    Rng rng(options.seed);
    Corpus corpus;
    std::vector<std::size_t> topics;
    for (std::size_t b = 0; b < options.bodies; ++b) {
        const std::size_t topic = b % 12;
        topics.push_back(topic);
        std::string body = "Report, " + sentence(rng, topic, 12) + ". ";
        const std::size_t sentences = 4 + rng.next() % 5;
        for (std::size_t s = 0; s < sentences; ++s) body += sentence(rng, topic, 8 + rng.next() % 10) + ". ";
        if (b % 3 == 0) body += "Officials say it was not a hoax. ";
        corpus.add_body(static_cast<BodyId>(100 + b), body);
    }

    for (std::size_t i = 0; i < options.pairs; ++i) {
        const std::size_t b = rng.next() % options.bodies;
        const BodyId id = static_cast<BodyId>(100 + b);
        const double u = rng.uniform();
        Stance stance = u < 0.70 ? Stance::Unrelated
                        : u < 0.86 ? Stance::Discuss
                        : u < 0.95 ? Stance::Agree
                                   : Stance::Disagree;
        const std::size_t topic = stance == Stance::Unrelated ? (topics[b] + 1 + rng.next() % 11) % 12
                                                              : topics[b];
        // Headlines reuse words from the body's lead so overlap features fire.
        std::string headline;
        const auto& body = *corpus.bodies.at(id);
        std::istringstream lead(body);
        std::string word;
        std::vector<std::string> lead_words;
        while (lead >> word && lead_words.size() < 14) lead_words.push_back(word);
        switch (stance) {
            case Stance::Agree:
                headline = "Confirmed: " + lead_words[1] + " " + lead_words[2] + " " + lead_words[3] +
                           " " + topic_word(topic, rng.next() % 30);
                break;
            case Stance::Disagree:
                headline = "Fake story: " + lead_words[1] + " " + lead_words[2] + " is a hoax, " +
                           topic_word(topic, rng.next() % 30);
                break;
            case Stance::Discuss:
                headline = "Reportedly " + topic_word(topic, rng.next() % 30) + " " +
                           topic_word(topic, rng.next() % 30) + " may " +
                           topic_word(topic, rng.next() % 30);
                break;
            case Stance::Unrelated:
                headline = sentence(rng, topic, 6 + rng.next() % 4);
                headline[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(headline[0])));
                break;
        }
        corpus.add_pair(headline + " #" + std::to_string(i % 7), id, stance);
    }
    return corpus;
}

CorpusFiles write_synthetic_corpus(const std::string& dir, const std::string& prefix,
                                   const SyntheticOptions& options) {
    fs::create_directories(dir);
    CorpusFiles files{(fs::path(dir) / (prefix + "_stances.csv")).string(),
                      (fs::path(dir) / (prefix + "_bodies.csv")).string()};
    save_corpus(synthetic_corpus(options), files.stances, files.bodies);
    return files;
}

std::string scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("fncstance_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

eval::ConfusionMatrix reference_confusion() {
    eval::ConfusionMatrix cm;
    cm.counts = {{{834, 15, 945, 109},
                  {208, 44, 328, 117},
                  {401, 23, 3825, 215},
                  {22, 12, 325, 17990}}};
    return cm;
}

}  // namespace fncstance::testing
