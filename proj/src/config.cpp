#include "apptopics/config.hpp"

#include <charconv>
#include <functional>
#include <map>

namespace apptopics {

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw Error("config: bad value for " + key + ": '" + value + "'");
  return out;
}

bool parse_flag(const std::string& key, const std::string& value) {
  const std::string v = to_lower_ascii(value);
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  throw Error("config: bad boolean for " + key + ": '" + value + "'");
}

void require_file(const char* key, const std::filesystem::path& p) {
  if (p.empty()) return;
  if (!std::filesystem::is_regular_file(p)) throw Error(std::string("config: ") + key + " not found: " + p.string());
}

}  // namespace

void PipelineConfig::validate() const {
  pipeline.validate();
  lda.validate();
  if (ocr_adapter != "sidecar" && ocr_adapter != "command") throw Error("config: ocr_adapter must be sidecar or command");
  if (ocr_adapter == "command" && ocr_command.empty()) throw Error("config: ocr_command is required for ocr_adapter = command");
  if (text.hex_min_len == 0 || text.base64_min_len == 0 || text.consonant_run == 0) {
    throw Error("config: text thresholds must be positive");
  }
  if (!(text.obfuscated_ratio >= 0.0 && text.obfuscated_ratio <= 1.0)) throw Error("config: obfuscated_ratio must be in [0, 1]");
  if (!(topic_min_pct >= 0.0 && topic_min_pct <= 100.0)) throw Error("config: topic_min_pct must be in [0, 100]");
  if (topic_max_n == 0) throw Error("config: topic_max_n must be positive");
  if (!(anomaly.spread_percent > 0.0 && anomaly.spread_percent <= 100.0)) {
    throw Error("config: spread_threshold must be in (0, 100]");
  }
  if (anomaly.min_topics == 0) throw Error("config: spread_min_topics must be positive");
  if (top_words == 0) throw Error("config: top_words must be positive");
  if (!input_root.empty() && !std::filesystem::is_directory(input_root)) {
    throw Error("config: input_root is not a directory: " + input_root.string());
  }
  require_file("dictionary", dictionary);
  require_file("label_map", label_map);
  require_file("reference_labels", reference_labels);
}

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  PipelineConfig cfg;
  auto path = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter, std::less<>> setters = {
      {"input_root", [&](auto&, auto& v) { cfg.input_root = path(v); }},
      {"output_dir", [&](auto&, auto& v) { cfg.output_dir = path(v); }},
      {"dictionary", [&](auto&, auto& v) { cfg.dictionary = path(v); }},
      {"label_map", [&](auto&, auto& v) { cfg.label_map = path(v); }},
      {"reference_labels", [&](auto&, auto& v) { cfg.reference_labels = path(v); }},
      {"flags", [&](auto&, auto& v) { cfg.flags = path(v); }},
      {"ocr_adapter", [&](auto&, auto& v) { cfg.ocr_adapter = v; }},
      {"ocr_command", [&](auto&, auto& v) { cfg.ocr_command = v; }},
      {"extra_stopwords", [&](auto&, auto& v) {
         for (auto& w : split_char(v, ',')) {
           auto t = trim(w);
           if (!t.empty()) cfg.extra_stopwords.push_back(to_lower_ascii(t));
         }
       }},
      {"pruning", [&](auto& k, auto& v) { cfg.pipeline.prune = parse_flag(k, v); }},
      {"gui_dictionary_filter", [&](auto& k, auto& v) { cfg.pipeline.gui_dictionary_filter = parse_flag(k, v); }},
      {"min_token_len", [&](auto& k, auto& v) { cfg.pipeline.min_token_len = parse_number<std::size_t>(k, v); }},
      {"support_cutoff", [&](auto& k, auto& v) { cfg.pipeline.support_cutoff = parse_number<double>(k, v); }},
      {"min_keywords", [&](auto& k, auto& v) { cfg.pipeline.min_keywords = parse_number<std::size_t>(k, v); }},
      {"max_non_english", [&](auto& k, auto& v) { cfg.pipeline.max_non_english = parse_number<double>(k, v); }},
      {"max_encrypted", [&](auto& k, auto& v) { cfg.pipeline.max_encrypted = parse_number<double>(k, v); }},
      {"hex_min_len", [&](auto& k, auto& v) { cfg.text.hex_min_len = parse_number<std::size_t>(k, v); }},
      {"base64_min_len", [&](auto& k, auto& v) { cfg.text.base64_min_len = parse_number<std::size_t>(k, v); }},
      {"base64_min_entropy", [&](auto& k, auto& v) { cfg.text.base64_min_entropy = parse_number<double>(k, v); }},
      {"consonant_min_len", [&](auto& k, auto& v) { cfg.text.consonant_min_len = parse_number<std::size_t>(k, v); }},
      {"consonant_run", [&](auto& k, auto& v) { cfg.text.consonant_run = parse_number<std::size_t>(k, v); }},
      {"english_min_len", [&](auto& k, auto& v) { cfg.text.english_min_len = parse_number<std::size_t>(k, v); }},
      {"obfuscated_max_len", [&](auto& k, auto& v) { cfg.text.obfuscated_max_len = parse_number<std::size_t>(k, v); }},
      {"obfuscated_ratio", [&](auto& k, auto& v) { cfg.text.obfuscated_ratio = parse_number<double>(k, v); }},
      {"n_topics", [&](auto& k, auto& v) { cfg.lda.n_topics = parse_number<std::size_t>(k, v); }},
      {"alpha", [&](auto& k, auto& v) { cfg.lda.alpha = parse_number<double>(k, v); }},
      {"beta", [&](auto& k, auto& v) { cfg.lda.beta = parse_number<double>(k, v); }},
      {"iterations", [&](auto& k, auto& v) { cfg.lda.n_iterations = parse_number<std::size_t>(k, v); }},
      {"burn_in", [&](auto& k, auto& v) { cfg.lda.burn_in = parse_number<std::size_t>(k, v); }},
      {"seed", [&](auto& k, auto& v) { cfg.lda.seed = parse_number<std::uint64_t>(k, v); }},
      {"topic_min_pct", [&](auto& k, auto& v) { cfg.topic_min_pct = parse_number<double>(k, v); }},
      {"topic_max_n", [&](auto& k, auto& v) { cfg.topic_max_n = parse_number<std::size_t>(k, v); }},
      {"spread_threshold", [&](auto& k, auto& v) { cfg.anomaly.spread_percent = parse_number<double>(k, v); }},
      {"spread_min_topics", [&](auto& k, auto& v) { cfg.anomaly.min_topics = parse_number<std::size_t>(k, v); }},
      {"top_words", [&](auto& k, auto& v) { cfg.top_words = parse_number<std::size_t>(k, v); }},
      {"infer_iterations", [&](auto& k, auto& v) { cfg.infer_iterations = parse_number<std::size_t>(k, v); }},
  };

  std::size_t line_no = 0;
  for (auto& raw : split_char(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) throw Error("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    it->second(key, value);
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

}  // namespace apptopics
