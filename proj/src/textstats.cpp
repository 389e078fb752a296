#include "apptopics/textstats.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace apptopics {

EnglishDictionary::EnglishDictionary(const Words& words) {
  for (const auto& w : words) {
    if (!w.empty()) words_.insert(to_lower_ascii(w));
  }
}

EnglishDictionary EnglishDictionary::load(const std::filesystem::path& path) {
  std::string text = read_file(path);
  EnglishDictionary dict;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = trim(std::string_view(text).substr(pos, nl - pos));
    if (!line.empty() && line[0] != '#') dict.words_.insert(to_lower_ascii(line));
    pos = nl + 1;
  }
  if (dict.words_.empty()) throw Error("dictionary is empty: " + path.string());
  return dict;
}

bool EnglishDictionary::contains(std::string_view word) const {
  return words_.count(to_lower_ascii(word)) > 0;
}

double token_entropy(std::string_view token) {
  if (token.empty()) throw Error("token_entropy: empty token");
  std::array<std::size_t, 256> counts{};
  for (char c : token) ++counts[static_cast<unsigned char>(c)];
  const double n = static_cast<double>(token.size());
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

namespace {

bool is_hex(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

bool is_base64(char c) { return is_ascii_alnum(c) || c == '+' || c == '/' || c == '='; }

bool is_consonant(char c) {
  if (!is_ascii_alpha(c)) return false;
  switch (c | 0x20) {
    case 'a':
    case 'e':
    case 'i':
    case 'o':
    case 'u':
      return false;
    default:
      return true;
  }
}

std::size_t longest_consonant_run(std::string_view s) {
  std::size_t best = 0, run = 0;
  for (char c : s) {
    run = is_consonant(c) ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

template <typename F>
void for_each_word(const Words& a, const Words& b, const Words& c, F&& f) {
  for (const auto& w : a) f(w);
  for (const auto& w : b) f(w);
  for (const auto& w : c) f(w);
}

}  // namespace

bool is_encrypted_like(std::string_view token, const EnglishDictionary& dict, const TextStatsThresholds& t) {
  if (token.empty()) return false;
  if (token.size() >= t.hex_min_len && std::all_of(token.begin(), token.end(), is_hex)) return true;
  if (token.size() >= t.base64_min_len && std::all_of(token.begin(), token.end(), is_base64) &&
      token_entropy(token) >= t.base64_min_entropy) {
    return true;
  }
  if (token.size() >= t.consonant_min_len && !dict.contains(token) &&
      longest_consonant_run(token) >= t.consonant_run) {
    return true;
  }
  return false;
}

double encrypted_ratio(const Words& methods, const Words& xml, const Words& gui,
                       const EnglishDictionary& dict, const TextStatsThresholds& t) {
  std::size_t total = 0, hits = 0;
  for_each_word(methods, xml, gui, [&](const std::string& w) {
    ++total;
    if (is_encrypted_like(w, dict, t)) ++hits;
  });
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

double non_english_ratio(const Words& methods, const Words& xml, const Words& gui,
                         const EnglishDictionary& dict, const TextStatsThresholds& t) {
  std::size_t total = 0, misses = 0;
  for_each_word(methods, xml, gui, [&](const std::string& w) {
    if (w.size() < t.english_min_len) return;
    ++total;
    if (!dict.contains(w)) ++misses;
  });
  return total == 0 ? 0.0 : static_cast<double>(misses) / static_cast<double>(total);
}

double encrypted_ratio(const RawAppFeatures& rec, const EnglishDictionary& dict, const TextStatsThresholds& t) {
  return encrypted_ratio(rec.method_words, rec.xml_words, rec.gui_words, dict, t);
}

double non_english_ratio(const RawAppFeatures& rec, const EnglishDictionary& dict,
                         const TextStatsThresholds& t) {
  return non_english_ratio(rec.method_words, rec.xml_words, rec.gui_words, dict, t);
}

bool is_obfuscated_source(const Words& identifiers, const TextStatsThresholds& t) {
  if (identifiers.empty()) return false;
  auto shorts = std::count_if(identifiers.begin(), identifiers.end(),
                              [&](const std::string& s) { return s.size() <= t.obfuscated_max_len; });
  return static_cast<double>(shorts) / static_cast<double>(identifiers.size()) > t.obfuscated_ratio;
}

TextQualityFlags compute_flags(const RawAppFeatures& rec, const EnglishDictionary& dict,
                               const TextStatsThresholds& t) {
  TextQualityFlags flags;
  flags.non_english_ratio = non_english_ratio(rec, dict, t);
  flags.encrypted_ratio = encrypted_ratio(rec, dict, t);
  flags.encrypted_present = flags.encrypted_ratio > 0.0;
  flags.obfuscated_methods = is_obfuscated_source(rec.method_identifiers, t);
  flags.obfuscated_xml = is_obfuscated_source(rec.xml_keys, t);
  return flags;
}

}  // namespace apptopics
