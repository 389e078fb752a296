#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>

#include "apptopics/extract.hpp"
#include "apptopics/util.hpp"

namespace apptopics {

class EnglishDictionary {
 public:
  EnglishDictionary() = default;
  explicit EnglishDictionary(const Words& words);

  // One word per line; blank lines and `#` comments are ignored. Throws when
  // the file is missing or yields no words.
  static EnglishDictionary load(const std::filesystem::path& path);

  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

 private:
  std::unordered_set<std::string> words_;
};

struct TextStatsThresholds {
  std::size_t hex_min_len = 32;
  std::size_t base64_min_len = 16;
  double base64_min_entropy = 4.0;
  std::size_t consonant_min_len = 12;
  std::size_t consonant_run = 5;
  std::size_t english_min_len = 4;
  std::size_t obfuscated_max_len = 2;
  double obfuscated_ratio = 0.30;
};

struct TextQualityFlags {
  double non_english_ratio = 0.0;
  double encrypted_ratio = 0.0;
  bool obfuscated_methods = false;
  bool obfuscated_xml = false;
  bool encrypted_present = false;
};

// Shannon entropy in bits per character. Throws on an empty token.
double token_entropy(std::string_view token);

bool is_encrypted_like(std::string_view token, const EnglishDictionary& dict,
                       const TextStatsThresholds& t = {});

// Ratios over the union of the three word lists, with multiplicity.
double encrypted_ratio(const Words& methods, const Words& xml, const Words& gui,
                       const EnglishDictionary& dict, const TextStatsThresholds& t = {});
double non_english_ratio(const Words& methods, const Words& xml, const Words& gui,
                         const EnglishDictionary& dict, const TextStatsThresholds& t = {});

double encrypted_ratio(const RawAppFeatures& rec, const EnglishDictionary& dict,
                       const TextStatsThresholds& t = {});
double non_english_ratio(const RawAppFeatures& rec, const EnglishDictionary& dict,
                         const TextStatsThresholds& t = {});

// True when more than `obfuscated_ratio` of the identifiers are at most
// `obfuscated_max_len` characters long.
bool is_obfuscated_source(const Words& identifiers, const TextStatsThresholds& t = {});

TextQualityFlags compute_flags(const RawAppFeatures& rec, const EnglishDictionary& dict,
                               const TextStatsThresholds& t = {});

}  // namespace apptopics
