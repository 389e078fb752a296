#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "apptopics/rng.hpp"
#include "apptopics/util.hpp"

namespace apptopics {

// Dense row-major matrix.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

class Vocabulary {
 public:
  // Sorted, deduplicated tokens get ids 0..V-1.
  static Vocabulary build(const std::vector<Words>& documents);
  static Vocabulary from_sorted(Words tokens);

  std::optional<std::uint32_t> id(std::string_view token) const;
  const std::string& token(std::uint32_t id) const { return id_to_token_.at(id); }
  std::size_t size() const { return id_to_token_.size(); }
  const Words& tokens() const { return id_to_token_; }

 private:
  Words id_to_token_;
  std::unordered_map<std::string, std::uint32_t> token_to_id_;
};

struct LdaConfig {
  std::size_t n_topics = 31;
  // Symmetric per-topic Dirichlet parameter; unset means 5.0 / n_topics.
  std::optional<double> alpha;
  double beta = 0.01;
  std::size_t n_iterations = 1000;
  std::size_t burn_in = 800;
  std::uint64_t seed = 0;

  double alpha_value() const { return alpha ? *alpha : 5.0 / static_cast<double>(n_topics); }
  void validate() const;
};

struct LdaDocument {
  std::string id;
  Words tokens;
  // Identifies the document's random stream. Documents are swept in
  // ascending stream order, so reordering documents together with their
  // streams leaves every per-document result unchanged.
  std::uint64_t stream = 0;
};

// Documents with stream = position in the list.
std::vector<LdaDocument> make_documents(std::vector<std::pair<std::string, Words>> docs);

struct LdaModel {
  LdaConfig config;
  Vocabulary vocab;
  std::vector<std::string> doc_ids;
  std::vector<std::size_t> doc_lengths;
  // Final Gibbs state.
  Matrix<std::int64_t> topic_word_counts;  // K x V
  Matrix<std::int64_t> doc_topic_counts;   // D x K
  // Sufficient statistics averaged over the post-burn-in sweeps.
  Matrix<double> topic_word_mean;  // K x V
  Matrix<double> doc_topic_mean;   // D x K
  // Posterior means derived from the averaged statistics.
  Matrix<double> phi;    // K x V
  Matrix<double> theta;  // D x K

  std::size_t n_topics() const { return config.n_topics; }
  std::optional<std::size_t> doc_index(std::string_view id) const;
  void recompute_distributions();
};

// Collapsed Gibbs sampler state. Exposed so callers can observe the count
// matrices between sweeps.
class GibbsSampler {
 public:
  GibbsSampler(std::vector<std::vector<std::uint32_t>> docs, std::vector<std::uint64_t> streams,
               std::size_t vocab_size, const LdaConfig& config);

  void sweep();

  std::size_t sweeps_done() const { return sweeps_; }
  std::size_t total_tokens() const { return total_tokens_; }
  const Matrix<std::int64_t>& topic_word_counts() const { return topic_word_; }
  const Matrix<std::int64_t>& doc_topic_counts() const { return doc_topic_; }
  const std::vector<std::int64_t>& topic_totals() const { return topic_totals_; }
  const std::vector<std::vector<std::uint16_t>>& assignments() const { return z_; }

  // Log-likelihood of the corpus under theta/phi estimated from the current
  // sample.
  double log_likelihood() const;

 private:
  void sample_document(std::size_t d);

  LdaConfig config_;
  std::size_t vocab_size_;
  std::vector<std::vector<std::uint32_t>> docs_;
  std::vector<CounterRng> rngs_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<std::uint16_t>> z_;
  Matrix<std::int64_t> topic_word_;
  Matrix<std::int64_t> doc_topic_;
  std::vector<std::int64_t> topic_totals_;
  std::vector<double> weights_;
  std::size_t total_tokens_ = 0;
  std::size_t sweeps_ = 0;
};

using SweepObserver = std::function<void(const GibbsSampler&)>;

// Fits LDA by collapsed Gibbs sampling. `observer`, when set, runs after
// every sweep.
LdaModel fit_gibbs(const std::vector<LdaDocument>& corpus, const LdaConfig& config,
                   const SweepObserver& observer = {});

struct TopicShare {
  std::size_t topic = 0;  // zero-based
  double percent = 0.0;

  bool operator==(const TopicShare&) const = default;
};

// Largest contributions first (ties to the lower topic id), at most `max_n`,
// each at least `min_pct` percent.
std::vector<TopicShare> top_topics(std::span<const double> theta_row, double min_pct = 1.0,
                                   std::size_t max_n = 4);

std::vector<std::pair<std::string, double>> top_words(const LdaModel& model, std::size_t topic, std::size_t n);

// Sum over token positions of log sum_k theta_dk phi_kw. Documents are matched
// to theta rows by position; unknown tokens are skipped.
double corpus_log_likelihood(const LdaModel& model, const std::vector<LdaDocument>& corpus);

// Theta for a document that was not part of the fit, by Gibbs sampling its
// topic assignments against the fitted phi. With no in-vocabulary token the
// result is the prior mean (uniform).
std::vector<double> infer_theta(const LdaModel& model, const Words& tokens, std::uint64_t stream,
                                std::size_t iterations = 100, std::size_t* known_tokens = nullptr);

// Base-2 Jensen-Shannon divergence, in [0, 1].
double js_divergence(std::span<const double> p, std::span<const double> q);

struct TopicMapEntry {
  std::size_t topic = 0;
  double prevalence = 0.0;
  double x = 0.0;
  double y = 0.0;
};

struct TopicMap {
  std::vector<TopicMapEntry> topics;
  Matrix<double> divergence;
};

// Topic prevalence plus a 2-D embedding of the topics by classical MDS over
// the pairwise Jensen-Shannon divergences of the phi rows.
TopicMap emit_topic_map(const LdaModel& model);

void save_model(const LdaModel& model, const std::filesystem::path& path);
LdaModel load_model(const std::filesystem::path& path);
std::string serialize_model(const LdaModel& model);
LdaModel parse_model(std::string_view text);

}  // namespace apptopics
