#include "mmqo/similarity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iostream>

#include "json.hpp"

#include "mmqo/errors.hpp"

namespace mmqo {

SynonymLexicon SynonymLexicon::builtin() {
    SynonymLexicon lex;
    lex.add_set({"person", "persons", "people", "human", "humans"});
    lex.add_set({"man", "men", "gentleman", "gentlemen"});
    lex.add_set({"woman", "women", "lady", "ladies"});
    lex.add_set({"child", "children", "kid", "kids"});
    lex.add_set({"picture", "pictures", "image", "images", "photo", "photos", "photograph",
                 "photographs"});
    lex.add_set({"car", "cars", "automobile", "automobiles"});
    lex.add_set({"boat", "boats", "ship", "ships"});
    lex.add_set({"dog", "dogs", "puppy", "puppies"});
    lex.add_set({"cat", "cats", "kitten", "kittens"});
    lex.add_set({"bicycle", "bicycles", "bike", "bikes"});
    return lex;
}

SynonymLexicon SynonymLexicon::from_json_text(const std::string &text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(std::string("synonym lexicon: ") + e.what());
    }
    if (!doc.is_array()) throw ConfigError("synonym lexicon: expected an array of synonym sets");
    SynonymLexicon lex;
    for (const auto &set : doc) {
        lex.add_set(set.get<std::vector<std::string>>());
    }
    return lex;
}

SynonymLexicon SynonymLexicon::load_file(const std::string &path) {
    std::FILE *f = std::fopen(path.c_str(), "rb");
    if (!f) throw ConfigError("cannot open synonym lexicon: " + path);
    std::string text;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) text.append(buf, n);
    std::fclose(f);
    return from_json_text(text);
}

void SynonymLexicon::add_set(const std::vector<std::string> &members) {
    if (members.empty()) return;
    std::string canonical = members.front();
    std::transform(canonical.begin(), canonical.end(), canonical.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (std::string member : members) {
        std::transform(member.begin(), member.end(), member.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        canon_[member] = canonical;
    }
}

std::string SynonymLexicon::canonical(const std::string &token) const {
    auto it = canon_.find(token);
    if (it != canon_.end()) return it->second;
    // naive plural fold: "dogs" -> "dog" (guarded so "glass" stays intact)
    if (token.size() >= 4 && token.back() == 's' && token[token.size() - 2] != 's') {
        std::string singular = token.substr(0, token.size() - 1);
        auto sit = canon_.find(singular);
        return sit != canon_.end() ? sit->second : singular;
    }
    return token;
}

std::vector<std::string> tokenize_phrase(std::string_view text, const SynonymLexicon &lexicon) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(lexicon.canonical(current));
            current.clear();
        }
    };
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

double cosine(const SparseVec &a, const SparseVec &b) {
    if (!a.empty() && a == b) return 1.0; // identical vectors score exactly 1
    double dot = 0, norm_a = 0, norm_b = 0;
    for (const auto &[k, v] : a) {
        norm_a += v * v;
        auto it = b.find(k);
        if (it != b.end()) dot += v * it->second;
    }
    for (const auto &[k, v] : b) norm_b += v * v;
    if (norm_a == 0 || norm_b == 0) return 0;
    return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

double EmbeddingProvider::map_cosine(double c) const {
    return std::clamp(c, 0.0, 1.0);
}

DefaultEmbeddingProvider::DefaultEmbeddingProvider(SynonymLexicon lexicon)
    : lexicon_(std::move(lexicon)) {}

SparseVec DefaultEmbeddingProvider::embed(const std::string &text) const {
    SparseVec vec;
    std::vector<std::string> tokens = tokenize_phrase(text, lexicon_);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        vec["u:" + tokens[i]] += 1;
        if (i + 1 < tokens.size()) vec["b:" + tokens[i] + " " + tokens[i + 1]] += 1;
    }
    return vec;
}

double tfidf_cosine(const std::string &a, const std::string &b, const SynonymLexicon &lexicon) {
    std::vector<std::string> ta = tokenize_phrase(a, lexicon);
    std::vector<std::string> tb = tokenize_phrase(b, lexicon);
    if (ta.empty() || tb.empty()) return ta == tb ? 1.0 : 0.0;

    SparseVec tf_a, tf_b;
    for (const auto &t : ta) tf_a[t] += 1;
    for (const auto &t : tb) tf_b[t] += 1;

    // Smoothed idf over the two-document corpus: ln((1+N)/(1+df)) + 1 keeps
    // shared terms from vanishing, so identical phrases score exactly 1.
    auto idf = [&](const std::string &term) {
        int df = (tf_a.count(term) ? 1 : 0) + (tf_b.count(term) ? 1 : 0);
        return std::log(3.0 / (1.0 + df)) + 1.0;
    };
    SparseVec va, vb;
    for (const auto &[t, f] : tf_a) va[t] = f * idf(t);
    for (const auto &[t, f] : tf_b) vb[t] = f * idf(t);
    return std::clamp(cosine(va, vb), 0.0, 1.0);
}

SimilarityChecker::SimilarityChecker(std::shared_ptr<const EmbeddingProvider> backend,
                                     SynonymLexicon lexicon, double threshold)
    : backend_(std::move(backend)), lexicon_(std::move(lexicon)), threshold_(threshold),
      warn_([](const std::string &msg) { std::cerr << "[mmqo] warning: " << msg << "\n"; }) {}

SimilarityChecker::SimilarityChecker()
    : SimilarityChecker(std::make_shared<DefaultEmbeddingProvider>()) {}

void SimilarityChecker::set_warning_sink(std::function<void(const std::string &)> sink) {
    warn_ = std::move(sink);
}

SimilarityReport SimilarityChecker::compare(const std::string &a, const std::string &b) const {
    std::pair<std::string, std::string> key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
    {
        std::lock_guard lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }

    SimilarityReport report;
    report.lexical_score = tfidf_cosine(key.first, key.second, lexicon_);
    try {
        SparseVec ea = backend_->embed(key.first);
        SparseVec eb = backend_->embed(key.second);
        report.semantic_score = backend_->map_cosine(cosine(ea, eb));
    } catch (const BackendUnavailableError &e) {
        report.degraded = true;
        report.semantic_score = 1.0; // lexical-only fallback
        if (warn_) warn_(std::string("embedding backend unavailable (") + e.what() +
                         "), using lexical score only");
    }
    report.combined = report.lexical_score * report.semantic_score;
    report.equivalent = report.combined >= threshold_;

    std::lock_guard lock(mutex_);
    cache_.emplace(std::move(key), report);
    return report;
}

bool SimilarityChecker::equivalent(const std::string &a, const std::string &b) const {
    return compare(a, b).equivalent;
}

} // namespace mmqo
