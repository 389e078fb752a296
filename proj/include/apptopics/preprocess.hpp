#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "apptopics/textstats.hpp"
#include "apptopics/util.hpp"

namespace apptopics {

// Token lists per source, as stored in the Dataset-1/Dataset-2 files.
struct AppTokens {
  std::string sha256;
  std::string package_id;
  Words method_tokens;
  Words xml_tokens;
  Words gui_tokens;

  std::size_t total_tokens() const {
    return method_tokens.size() + xml_tokens.size() + gui_tokens.size();
  }
};

using Corpus = std::vector<AppTokens>;

struct PipelineThresholds {
  std::size_t min_token_len = 4;
  double support_cutoff = 0.10;
  std::size_t min_keywords = 10;
  double max_non_english = 0.10;
  double max_encrypted = 0.51;
  bool prune = true;
  bool gui_dictionary_filter = true;

  void validate() const;
};

struct CorpusStats {
  std::size_t n_docs = 0;
  std::map<std::string, std::size_t, std::less<>> doc_frequency;

  double support(std::string_view token) const;
};

// Splits on non-alphanumeric characters and drops purely numeric pieces.
Words tokenize(const Words& words);

Words normalize(const Words& tokens);
Words drop_short(const Words& tokens, std::size_t min_len = 4);

// Dictionary-assisted English inflection reducer: irregular plural table,
// regular noun plural suffixes, and superlatives of gradable adjectives.
class Lemmatizer {
 public:
  explicit Lemmatizer(const EnglishDictionary* dict = nullptr);
  std::string lemmatize(std::string_view token) const;

 private:
  bool known(const std::string& w) const;

  const EnglishDictionary* dict_;
  std::unordered_map<std::string, std::string> irregular_;
};

CorpusStats compute_support(const Corpus& corpus);
Corpus prune_by_support(const Corpus& corpus, const CorpusStats& stats, double cutoff);

enum class RemovalReason { kFewKeywords, kNonEnglish, kEncrypted };

std::string_view to_string(RemovalReason r);

struct RemovedApp {
  std::string sha256;
  std::string package_id;
  std::size_t keyword_count = 0;
  double non_english_ratio = 0.0;
  double encrypted_ratio = 0.0;
  std::vector<RemovalReason> reasons;
};

struct FilterResult {
  Corpus kept;
  std::vector<RemovedApp> removed;
};

// `flags[i]` belongs to `corpus[i]` and must be measured on the raw features;
// keyword counts are taken from the processed lists in `corpus`.
FilterResult filter_apps(const Corpus& corpus, const std::vector<TextQualityFlags>& flags,
                         const PipelineThresholds& thresholds);

// Per-app cleaning for one source list: tokenize, normalize, drop short,
// (optional dictionary filter), lemmatize, stem, sort and deduplicate.
Words clean_tokens(const Words& raw, const PipelineThresholds& thresholds, const Lemmatizer& lemmatizer,
                   const EnglishDictionary* dictionary_filter = nullptr);

AppTokens clean_app(const AppTokens& raw, const PipelineThresholds& thresholds, const Lemmatizer& lemmatizer,
                    const EnglishDictionary& dict);

struct PreprocessResult {
  Corpus corpus;
  std::vector<RemovedApp> removed;
};

// The full cleaning pipeline over a raw (Dataset-1) corpus.
PreprocessResult preprocess_corpus(const Corpus& raw, const PipelineThresholds& thresholds,
                                   const EnglishDictionary& dict, const TextStatsThresholds& text_thresholds = {});

}  // namespace apptopics
