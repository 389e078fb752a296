#include "apptopics/preprocess.hpp"

#include <algorithm>
#include <set>

#include "apptopics/porter.hpp"

namespace apptopics {

void PipelineThresholds::validate() const {
  if (min_token_len == 0) throw Error("min_token_len must be positive");
  if (!(support_cutoff > 0.0 && support_cutoff <= 1.0)) throw Error("support_cutoff must be in (0, 1]");
  if (min_keywords == 0) throw Error("min_keywords must be positive");
  if (!(max_non_english > 0.0 && max_non_english <= 1.0)) throw Error("max_non_english must be in (0, 1]");
  if (!(max_encrypted > 0.0 && max_encrypted <= 1.0)) throw Error("max_encrypted must be in (0, 1]");
}

double CorpusStats::support(std::string_view token) const {
  if (n_docs == 0) return 0.0;
  auto it = doc_frequency.find(token);
  if (it == doc_frequency.end()) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(n_docs);
}

Words tokenize(const Words& words) {
  Words out;
  for (const auto& w : words) {
    std::string piece;
    auto flush = [&] {
      if (!piece.empty() && !std::all_of(piece.begin(), piece.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        out.push_back(piece);
      }
      piece.clear();
    };
    for (char c : w) {
      if (is_ascii_alnum(c)) {
        piece.push_back(c);
      } else {
        flush();
      }
    }
    flush();
  }
  return out;
}

Words normalize(const Words& tokens) {
  Words out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(to_lower_ascii(t));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Words drop_short(const Words& tokens, std::size_t min_len) {
  Words out;
  for (const auto& t : tokens) {
    if (t.size() >= min_len) out.push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lemmatizer

Lemmatizer::Lemmatizer(const EnglishDictionary* dict) : dict_(dict) {
  irregular_ = {
      {"children", "child"}, {"men", "man"},           {"women", "woman"},       {"people", "person"},
      {"feet", "foot"},      {"teeth", "tooth"},       {"geese", "goose"},       {"mice", "mouse"},
      {"lice", "louse"},     {"oxen", "ox"},           {"indices", "index"},     {"matrices", "matrix"},
      {"vertices", "vertex"}, {"analyses", "analysis"}, {"criteria", "criterion"}, {"phenomena", "phenomenon"},
      {"wives", "wife"},     {"knives", "knife"},      {"lives", "life"},        {"leaves", "leaf"},
      {"halves", "half"},    {"shelves", "shelf"},     {"wolves", "wolf"},       {"thieves", "thief"},
      {"selves", "self"},    {"loaves", "loaf"},       {"dice", "die"},          {"cacti", "cactus"},
  };
}

bool Lemmatizer::known(const std::string& w) const {
  return w.size() >= 3 && dict_ != nullptr && dict_->contains(w);
}

std::string Lemmatizer::lemmatize(std::string_view token) const {
  std::string t(token);
  if (auto it = irregular_.find(t); it != irregular_.end()) return it->second;
  if (dict_ == nullptr) return t;

  auto ends_with = [&](std::string_view suffix) {
    return t.size() > suffix.size() && std::string_view(t).substr(t.size() - suffix.size()) == suffix;
  };

  // Noun plurals, most specific suffix first.
  static constexpr std::pair<std::string_view, std::string_view> kPlural[] = {
      {"ies", "y"}, {"ses", "s"}, {"xes", "x"}, {"zes", "z"}, {"ches", "ch"}, {"shes", "sh"},
  };
  for (auto [suffix, repl] : kPlural) {
    if (!ends_with(suffix)) continue;
    std::string cand = t.substr(0, t.size() - suffix.size()) + std::string(repl);
    if (known(cand)) return cand;
  }
  if (ends_with("s") && !ends_with("ss") && !ends_with("us") && !ends_with("is")) {
    std::string cand = t.substr(0, t.size() - 1);
    if (known(cand)) return cand;
  }

  // Superlatives: only when the matching comparative is also a word, which
  // keeps nouns such as "interest" or "forest" intact.
  if (ends_with("est")) {
    std::string base = t.substr(0, t.size() - 3);
    if (base.size() >= 4 && dict_->contains(base + "er")) {
      if (known(base)) return base;
      if (known(base + "e")) return base + "e";
      if (base[base.size() - 1] == base[base.size() - 2]) {
        std::string undoubled = base.substr(0, base.size() - 1);
        if (known(undoubled)) return undoubled;
      }
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Corpus-level support

CorpusStats compute_support(const Corpus& corpus) {
  CorpusStats stats;
  stats.n_docs = corpus.size();
  for (const auto& app : corpus) {
    std::set<std::string_view> seen;
    for (const auto* list : {&app.method_tokens, &app.xml_tokens, &app.gui_tokens}) {
      for (const auto& t : *list) seen.insert(t);
    }
    for (auto t : seen) {
      auto it = stats.doc_frequency.find(t);
      if (it == stats.doc_frequency.end()) {
        stats.doc_frequency.emplace(std::string(t), 1);
      } else {
        ++it->second;
      }
    }
  }
  return stats;
}

Corpus prune_by_support(const Corpus& corpus, const CorpusStats& stats, double cutoff) {
  Corpus out = corpus;
  auto frequent = [&](const std::string& t) { return stats.support(t) >= cutoff; };
  for (auto& app : out) {
    std::erase_if(app.method_tokens, frequent);
    std::erase_if(app.xml_tokens, frequent);
    std::erase_if(app.gui_tokens, frequent);
  }
  return out;
}

std::string_view to_string(RemovalReason r) {
  switch (r) {
    case RemovalReason::kFewKeywords:
      return "few-keywords";
    case RemovalReason::kNonEnglish:
      return "non-english";
    case RemovalReason::kEncrypted:
      return "encrypted";
  }
  return "unknown";
}

FilterResult filter_apps(const Corpus& corpus, const std::vector<TextQualityFlags>& flags,
                         const PipelineThresholds& thresholds) {
  if (flags.size() != corpus.size()) throw Error("filter_apps: one flag record per app is required");
  FilterResult result;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& app = corpus[i];
    RemovedApp r{app.sha256, app.package_id, app.total_tokens(), flags[i].non_english_ratio,
                 flags[i].encrypted_ratio, {}};
    if (r.keyword_count < thresholds.min_keywords) r.reasons.push_back(RemovalReason::kFewKeywords);
    if (r.non_english_ratio >= thresholds.max_non_english) r.reasons.push_back(RemovalReason::kNonEnglish);
    if (r.encrypted_ratio >= thresholds.max_encrypted) r.reasons.push_back(RemovalReason::kEncrypted);
    if (r.reasons.empty()) {
      result.kept.push_back(app);
    } else {
      result.removed.push_back(std::move(r));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

Words clean_tokens(const Words& raw, const PipelineThresholds& thresholds, const Lemmatizer& lemmatizer,
                   const EnglishDictionary* dictionary_filter) {
  Words tokens = drop_short(normalize(tokenize(raw)), thresholds.min_token_len);
  if (dictionary_filter) {
    std::erase_if(tokens, [&](const std::string& t) { return !dictionary_filter->contains(t); });
  }
  for (auto& t : tokens) t = porter_stem(lemmatizer.lemmatize(t));
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  return tokens;
}

AppTokens clean_app(const AppTokens& raw, const PipelineThresholds& thresholds, const Lemmatizer& lemmatizer,
                    const EnglishDictionary& dict) {
  AppTokens out{raw.sha256, raw.package_id, {}, {}, {}};
  out.method_tokens = clean_tokens(raw.method_tokens, thresholds, lemmatizer);
  out.xml_tokens = clean_tokens(raw.xml_tokens, thresholds, lemmatizer);
  out.gui_tokens =
      clean_tokens(raw.gui_tokens, thresholds, lemmatizer, thresholds.gui_dictionary_filter ? &dict : nullptr);
  return out;
}

PreprocessResult preprocess_corpus(const Corpus& raw, const PipelineThresholds& thresholds,
                                   const EnglishDictionary& dict, const TextStatsThresholds& text_thresholds) {
  thresholds.validate();
  PreprocessResult result;
  if (raw.empty()) return result;

  const Lemmatizer lemmatizer(&dict);
  Corpus corpus;
  std::vector<TextQualityFlags> flags;
  corpus.reserve(raw.size());
  for (const auto& app : raw) {
    TextQualityFlags f;
    f.non_english_ratio = non_english_ratio(app.method_tokens, app.xml_tokens, app.gui_tokens, dict, text_thresholds);
    f.encrypted_ratio = encrypted_ratio(app.method_tokens, app.xml_tokens, app.gui_tokens, dict, text_thresholds);
    f.encrypted_present = f.encrypted_ratio > 0.0;
    flags.push_back(f);
    corpus.push_back(clean_app(app, thresholds, lemmatizer, dict));
  }

  // Removing apps changes every token's support, so pruning and filtering are
  // repeated until neither changes the corpus.
  while (true) {
    if (thresholds.prune && !corpus.empty()) {
      corpus = prune_by_support(corpus, compute_support(corpus), thresholds.support_cutoff);
    }
    auto filtered = filter_apps(corpus, flags, thresholds);
    bool changed = !filtered.removed.empty();
    if (changed) {
      std::vector<TextQualityFlags> kept_flags;
      std::size_t k = 0;
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (k < filtered.kept.size() && filtered.kept[k].sha256 == corpus[i].sha256 &&
            filtered.kept[k].package_id == corpus[i].package_id) {
          kept_flags.push_back(flags[i]);
          ++k;
        }
      }
      flags = std::move(kept_flags);
      result.removed.insert(result.removed.end(), filtered.removed.begin(), filtered.removed.end());
    }
    corpus = std::move(filtered.kept);
    if (!changed || !thresholds.prune) break;
  }
  std::sort(result.removed.begin(), result.removed.end(), [](const RemovedApp& a, const RemovedApp& b) {
    return a.sha256 != b.sha256 ? a.sha256 < b.sha256 : a.package_id < b.package_id;
  });
  result.corpus = std::move(corpus);
  return result;
}

}  // namespace apptopics
