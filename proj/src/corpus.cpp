#include "fncstance/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "fncstance/csv.hpp"
#include "fncstance/error.hpp"
#include "fncstance/random.hpp"

namespace fncstance {

namespace {

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::optional<std::size_t> find_column(const csv::Row& header, std::string_view name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) == name) return i;
    }
    return std::nullopt;
}

std::size_t require_column(const csv::Row& header, std::string_view name, std::string_view file) {
    auto idx = find_column(header, name);
    if (!idx) {
        throw SchemaError(std::string(file) + ": missing column '" + std::string(name) + "'");
    }
    return *idx;
}

BodyId parse_body_id(std::string_view field, std::string_view file, std::size_t line) {
    field = trim(field);
    BodyId id = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), id);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
        throw SchemaError(std::string(file) + " row " + std::to_string(line) +
                          ": invalid Body ID '" + std::string(field) + "'");
    }
    return id;
}

// Drops trailing blank records (a final newline yields one).
std::vector<csv::Row> without_blank_rows(std::vector<csv::Row> rows) {
    std::erase_if(rows, [](const csv::Row& r) { return r.size() == 1 && r[0].empty(); });
    return rows;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

const std::string& StancePair::body() const {
    static const std::string empty;
    return body_text ? *body_text : empty;
}

bool operator==(const StancePair& a, const StancePair& b) {
    return a.headline == b.headline && a.body_id == b.body_id && a.body() == b.body() &&
           a.stance == b.stance;
}

StancePair make_pair(std::string headline, BodyId body_id, std::string body,
                     std::optional<Stance> stance) {
    return StancePair{std::move(headline), body_id,
                      std::make_shared<const std::string>(std::move(body)), stance};
}

void Corpus::add_body(BodyId id, std::string text) {
    auto [it, inserted] = bodies.try_emplace(id, nullptr);
    if (!inserted) {
        throw SchemaError("duplicate Body ID " + std::to_string(id));
    }
    it->second = std::make_shared<const std::string>(std::move(text));
}

void Corpus::add_pair(std::string headline, BodyId id, std::optional<Stance> stance) {
    auto it = bodies.find(id);
    if (it == bodies.end()) {
        throw JoinError("Body ID " + std::to_string(id) + " has no body text");
    }
    pairs.push_back(StancePair{std::move(headline), id, it->second, stance});
}

bool operator==(const Corpus& a, const Corpus& b) {
    if (a.pairs != b.pairs || a.bodies.size() != b.bodies.size()) return false;
    return std::equal(a.bodies.begin(), a.bodies.end(), b.bodies.begin(),
                      [](const auto& x, const auto& y) {
                          return x.first == y.first && *x.second == *y.second;
                      });
}

Corpus parse_corpus(std::string_view stances_csv, std::string_view bodies_csv, LabelPolicy policy) {
    Corpus corpus;

    auto body_rows = without_blank_rows(csv::parse(bodies_csv));
    if (body_rows.empty()) throw SchemaError("bodies: missing header row");
    const auto& bheader = body_rows.front();
    const std::size_t bid_col = require_column(bheader, "Body ID", "bodies");
    const std::size_t text_col = require_column(bheader, "articleBody", "bodies");
    for (std::size_t r = 1; r < body_rows.size(); ++r) {
        const auto& row = body_rows[r];
        if (row.size() != bheader.size()) {
            throw SchemaError("bodies row " + std::to_string(r) + ": expected " +
                              std::to_string(bheader.size()) + " fields, got " +
                              std::to_string(row.size()));
        }
        const BodyId id = parse_body_id(row[bid_col], "bodies", r);
        if (is_blank(row[text_col])) {
            throw SchemaError("bodies row " + std::to_string(r) + ": empty articleBody");
        }
        corpus.add_body(id, row[text_col]);
    }

    auto stance_rows = without_blank_rows(csv::parse(stances_csv));
    if (stance_rows.empty()) throw SchemaError("stances: missing header row");
    const auto& sheader = stance_rows.front();
    const std::size_t head_col = require_column(sheader, "Headline", "stances");
    const std::size_t sid_col = require_column(sheader, "Body ID", "stances");
    std::optional<std::size_t> label_col = find_column(sheader, "Stance");
    if (!label_col && policy == LabelPolicy::Required) {
        require_column(sheader, "Stance", "stances");
    }

    corpus.pairs.reserve(stance_rows.size() - 1);
    for (std::size_t r = 1; r < stance_rows.size(); ++r) {
        const auto& row = stance_rows[r];
        if (row.size() != sheader.size()) {
            throw SchemaError("stances row " + std::to_string(r) + ": expected " +
                              std::to_string(sheader.size()) + " fields, got " +
                              std::to_string(row.size()));
        }
        if (is_blank(row[head_col])) {
            throw SchemaError("stances row " + std::to_string(r) + ": empty Headline");
        }
        const BodyId id = parse_body_id(row[sid_col], "stances", r);
        std::optional<Stance> stance;
        if (label_col) {
            try {
                stance = parse_stance(row[*label_col]);
            } catch (const LabelError& e) {
                throw LabelError("stances row " + std::to_string(r) + ": " + e.what());
            }
        }
        try {
            corpus.add_pair(row[head_col], id, stance);
        } catch (const JoinError& e) {
            throw JoinError("stances row " + std::to_string(r) + ": " + e.what());
        }
    }
    return corpus;
}

Corpus load_corpus(const std::string& stances_path, const std::string& bodies_path,
                   LabelPolicy policy) {
    return parse_corpus(read_text(stances_path), read_text(bodies_path), policy);
}

void save_corpus(const Corpus& corpus, const std::string& stances_path,
                 const std::string& bodies_path) {
    const bool labeled = std::all_of(corpus.pairs.begin(), corpus.pairs.end(),
                                     [](const StancePair& p) { return p.stance.has_value(); });
    std::ofstream s(stances_path, std::ios::binary);
    if (!s) throw SchemaError("cannot write " + stances_path);
    s << csv::format_row(labeled ? csv::Row{"Headline", "Body ID", "Stance"}
                                 : csv::Row{"Headline", "Body ID"});
    for (const auto& p : corpus.pairs) {
        csv::Row row{p.headline, std::to_string(p.body_id)};
        if (labeled) row.emplace_back(to_string(*p.stance));
        s << csv::format_row(row);
    }

    std::ofstream b(bodies_path, std::ios::binary);
    if (!b) throw SchemaError("cannot write " + bodies_path);
    b << csv::format_row({"Body ID", "articleBody"});
    for (const auto& [id, text] : corpus.bodies) {
        // Quote unconditionally: bodies routinely carry commas and newlines.
        std::string quoted = "\"";
        for (char c : *text) {
            if (c == '"') quoted.push_back('"');
            quoted.push_back(c);
        }
        quoted.push_back('"');
        b << id << ',' << quoted << '\n';
    }
}

LabelHistogram label_histogram(const Corpus& corpus) {
    LabelHistogram h{};
    for (const auto& p : corpus.pairs) {
        if (p.stance) ++h[index_of(*p.stance)];
    }
    return h;
}

std::pair<Corpus, Corpus> split(const Corpus& corpus, double validation_fraction,
                                std::uint64_t seed) {
    if (corpus.empty()) throw SplitError("cannot split an empty corpus");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
        throw ParameterError("validation fraction must lie in (0, 1)");
    }

    std::map<BodyId, std::size_t> pairs_per_body;
    for (const auto& p : corpus.pairs) ++pairs_per_body[p.body_id];

    std::vector<BodyId> ids;
    ids.reserve(pairs_per_body.size());
    for (const auto& [id, _] : pairs_per_body) ids.push_back(id);
    Rng rng(seed);
    rng.shuffle(ids);

    const double target2 = 2.0 * validation_fraction * static_cast<double>(corpus.size());
    std::set<BodyId> validation_ids;
    std::size_t validation_pairs = 0;
    for (BodyId id : ids) {
        const std::size_t c = pairs_per_body[id];
        if (static_cast<double>(2 * validation_pairs + c) < target2) {
            validation_ids.insert(id);
            validation_pairs += c;
        }
    }
    if (validation_ids.empty()) {
        throw SplitError("validation fraction " + std::to_string(validation_fraction) +
                         " puts no body in the validation split");
    }
    if (validation_ids.size() == pairs_per_body.size()) {
        throw SplitError("validation fraction " + std::to_string(validation_fraction) +
                         " leaves no body for training");
    }

    Corpus train;
    Corpus validation;
    for (const auto& [id, text] : corpus.bodies) {
        if (!pairs_per_body.contains(id)) continue;
        (validation_ids.contains(id) ? validation : train).bodies.emplace(id, text);
    }
    for (const auto& p : corpus.pairs) {
        (validation_ids.contains(p.body_id) ? validation : train).pairs.push_back(p);
    }
    return {std::move(train), std::move(validation)};
}

}  // namespace fncstance
