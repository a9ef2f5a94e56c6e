#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace mmqo {

/// Synonym sets applied before any token comparison, plus a naive plural
/// fold. Maps every member of a set to one canonical token.
class SynonymLexicon {
  public:
    /// Built-in lexicon covering the phrase vocabulary the optimizer deals
    /// with (persons/people, man/men, picture/image, ...).
    static SynonymLexicon builtin();
    /// Loads a JSON array of synonym sets: [["person","persons","people"], ...].
    static SynonymLexicon from_json_text(const std::string &text);
    static SynonymLexicon load_file(const std::string &path);

    void add_set(const std::vector<std::string> &members);
    std::string canonical(const std::string &token) const;

  private:
    std::map<std::string, std::string> canon_;
};

/// Lowercased, synonym-canonicalized word list of a phrase.
std::vector<std::string> tokenize_phrase(std::string_view text, const SynonymLexicon &lexicon);

using SparseVec = std::map<std::string, double>;

double cosine(const SparseVec &a, const SparseVec &b);

/// Sentence embedding backend. The default is offline and deterministic; a
/// remote implementation may throw BackendUnavailableError, in which case
/// scoring degrades to the lexical component alone.
class EmbeddingProvider {
  public:
    virtual ~EmbeddingProvider() = default;
    virtual SparseVec embed(const std::string &text) const = 0;
    /// Maps a raw embedding cosine into [0,1]. The default embedding has
    /// non-negative components, so clamping is exact; dense-model providers
    /// override this with their own documented mapping.
    virtual double map_cosine(double c) const;
    virtual std::string name() const = 0;
};

/// Token unigram + bigram count vectors after synonym canonicalization.
class DefaultEmbeddingProvider : public EmbeddingProvider {
  public:
    explicit DefaultEmbeddingProvider(SynonymLexicon lexicon = SynonymLexicon::builtin());
    SparseVec embed(const std::string &text) const override;
    std::string name() const override { return "default-ngram"; }

  private:
    SynonymLexicon lexicon_;
};

/// Dense-model embeddings over an HTTP endpoint (OpenAI-style /v1/embeddings
/// body). Throws BackendUnavailableError on any transport or shape problem;
/// the similarity checker then degrades to lexical-only scoring. Dense
/// cosines can be negative, so the [0,1] mapping is (1+c)/2.
struct RemoteEmbeddingConfig {
    std::string base_url;
    std::string path = "/v1/embeddings";
    std::string model = "default";
    std::string api_key_env = "MMQO_API_KEY";
    int timeout_seconds = 30;
};

class RemoteEmbeddingProvider : public EmbeddingProvider {
  public:
    explicit RemoteEmbeddingProvider(RemoteEmbeddingConfig config);
    SparseVec embed(const std::string &text) const override;
    double map_cosine(double c) const override { return (1.0 + c) / 2.0; }
    std::string name() const override { return "remote:" + config_.model; }

  private:
    RemoteEmbeddingConfig config_;
};

struct SimilarityReport {
    double lexical_score = 0;  // TF-IDF cosine over the two-document corpus
    double semantic_score = 0; // backend embedding cosine mapped to [0,1]
    double combined = 0;       // lexical * semantic
    bool equivalent = false;   // combined >= threshold
    bool degraded = false;     // backend unavailable, lexical-only
};

/// Hybrid phrase-equivalence checker: multiplies the TF-IDF cosine with the
/// backend embedding cosine and thresholds the product (default 0.5).
/// Symmetric in its arguments; results are cached per (a,b) pair.
class SimilarityChecker {
  public:
    explicit SimilarityChecker(std::shared_ptr<const EmbeddingProvider> backend,
                               SynonymLexicon lexicon = SynonymLexicon::builtin(),
                               double threshold = 0.5);
    SimilarityChecker(); // default backend, built-in lexicon, threshold 0.5

    SimilarityReport compare(const std::string &a, const std::string &b) const;
    bool equivalent(const std::string &a, const std::string &b) const;

    double threshold() const { return threshold_; }
    const SynonymLexicon &lexicon() const { return lexicon_; }

    /// Sink for the degradation warning (defaults to stderr).
    void set_warning_sink(std::function<void(const std::string &)> sink);

  private:
    std::shared_ptr<const EmbeddingProvider> backend_;
    SynonymLexicon lexicon_;
    double threshold_;
    std::function<void(const std::string &)> warn_;
    mutable std::mutex mutex_;
    mutable std::map<std::pair<std::string, std::string>, SimilarityReport> cache_;
};

/// TF-IDF cosine over the two-document corpus {a,b} with smoothed inverse
/// document frequencies. Exposed for the independent checks in the tests.
double tfidf_cosine(const std::string &a, const std::string &b, const SynonymLexicon &lexicon);

} // namespace mmqo
