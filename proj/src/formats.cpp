#include "apptopics/formats.hpp"

#include <json.hpp>

#include <sstream>

namespace apptopics::formats {

namespace {

std::string tokens_field(const Words& words) {
  return words.empty() ? std::string(kNullField) : join(words, " ");
}

Words field_tokens(std::string_view field) {
  if (field == kNullField) return {};
  return split_whitespace(field);
}

// Splits the text into lines, dropping a trailing empty line and '\r'.
std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  return lines;
}

template <typename RowFn>
void for_each_row(std::string_view text, std::string_view expected_header, std::size_t columns, RowFn fn) {
  auto lines = lines_of(text);
  if (lines.empty() || lines.front() != expected_header) {
    throw Error("unexpected header; expected: " + std::string(expected_header));
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto fields = split_char(lines[i], '\t');
    if (fields.size() != columns) {
      throw Error("line " + std::to_string(i + 1) + ": expected " + std::to_string(columns) + " columns, found " +
                  std::to_string(fields.size()));
    }
    fn(fields, i + 1);
  }
}

bool parse_bool(const std::string& s, std::size_t line) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw Error("line " + std::to_string(line) + ": expected true or false, found '" + s + "'");
}

double parse_ratio(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw Error("line " + std::to_string(line) + ": bad number '" + s + "'");
}

std::size_t parse_topic(const std::string& s, std::size_t line) {
  std::string digits = (!s.empty() && (s[0] == 'T' || s[0] == 't')) ? s.substr(1) : s;
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
    throw Error("line " + std::to_string(line) + ": bad topic id '" + s + "'");
  }
  std::size_t k = std::stoul(digits);
  if (k == 0) throw Error("line " + std::to_string(line) + ": topic ids start at 1");
  return k - 1;
}

constexpr std::string_view kDatasetHeader = "sha256\tpackage_id\tmethod_names\txml_values\tgui_text";
constexpr std::string_view kFlagsHeader =
    "sha256\tpackage_id\tnon_english_ratio\tencrypted_ratio\tobfuscated_methods\tobfuscated_xml\tencrypted_present";
constexpr std::string_view kClassificationHeader =
    "sha256\tpackage_id\tprimary_topic\tcategory\ttopic_1\tpct_1\ttopic_2\tpct_2\ttopic_3\tpct_3\ttopic_4\tpct_4"
    "\tanomaly\treasons";
constexpr std::string_view kLabelHeader = "topic\tcategory\tmalware";
constexpr std::string_view kReferenceHeader = "app_id\tcategory";

}  // namespace

std::string write_dataset(const Corpus& rows) {
  std::string out(kDatasetHeader);
  out += '\n';
  for (const auto& r : rows) {
    if (!is_sha256_hex(r.sha256)) throw Error("invalid sha256 '" + r.sha256 + "'");
    out += r.sha256 + '\t' + r.package_id + '\t' + tokens_field(r.method_tokens) + '\t' +
           tokens_field(r.xml_tokens) + '\t' + tokens_field(r.gui_tokens) + '\n';
  }
  return out;
}

Corpus parse_dataset(std::string_view text) {
  Corpus rows;
  for_each_row(text, kDatasetHeader, 5, [&](const std::vector<std::string>& f, std::size_t line) {
    if (!is_sha256_hex(f[0])) throw Error("line " + std::to_string(line) + ": invalid sha256");
    rows.push_back(AppTokens{f[0], f[1], field_tokens(f[2]), field_tokens(f[3]), field_tokens(f[4])});
  });
  return rows;
}

AppTokens to_tokens(const RawAppFeatures& rec) {
  return AppTokens{rec.sha256, rec.package_id, rec.method_words, rec.xml_words, rec.gui_words};
}

std::string write_flags(const std::vector<FlagRow>& rows) {
  std::string out(kFlagsHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r.sha256 + '\t' + r.package_id + '\t' + format_double(r.flags.non_english_ratio) + '\t' +
           format_double(r.flags.encrypted_ratio) + '\t' + (r.flags.obfuscated_methods ? "true" : "false") + '\t' +
           (r.flags.obfuscated_xml ? "true" : "false") + '\t' + (r.flags.encrypted_present ? "true" : "false") +
           '\n';
  }
  return out;
}

std::vector<FlagRow> parse_flags(std::string_view text) {
  std::vector<FlagRow> rows;
  for_each_row(text, kFlagsHeader, 7, [&](const std::vector<std::string>& f, std::size_t line) {
    FlagRow r{f[0], f[1], {}};
    r.flags.non_english_ratio = parse_ratio(f[2], line);
    r.flags.encrypted_ratio = parse_ratio(f[3], line);
    r.flags.obfuscated_methods = parse_bool(f[4], line);
    r.flags.obfuscated_xml = parse_bool(f[5], line);
    r.flags.encrypted_present = parse_bool(f[6], line);
    rows.push_back(std::move(r));
  });
  return rows;
}

std::string write_removal_report(const std::vector<RemovedApp>& removed) {
  std::string out = "sha256\tpackage_id\tkeywords\tnon_english_ratio\tencrypted_ratio\treasons\n";
  for (const auto& r : removed) {
    std::string reasons;
    for (std::size_t i = 0; i < r.reasons.size(); ++i) {
      if (i) reasons += ',';
      reasons += to_string(r.reasons[i]);
    }
    out += r.sha256 + '\t' + r.package_id + '\t' + std::to_string(r.keyword_count) + '\t' +
           format_fixed(r.non_english_ratio, 4) + '\t' + format_fixed(r.encrypted_ratio, 4) + '\t' + reasons + '\n';
  }
  return out;
}

std::string write_topic_keys(const LdaModel& model, std::size_t n_words) {
  std::string out = "topic\talpha\ttop_words\n";
  const std::string alpha = format_fixed(model.config.alpha_value(), 5);
  for (std::size_t k = 0; k < model.n_topics(); ++k) {
    Words words;
    for (auto& [w, p] : top_words(model, k, n_words)) words.push_back(w);
    out += std::to_string(k + 1) + '\t' + alpha + '\t' + join(words, " ") + '\n';
  }
  return out;
}

std::string write_composition(const LdaModel& model) {
  std::string out = "app";
  for (std::size_t k = 0; k < model.n_topics(); ++k) out += "\tT" + std::to_string(k + 1);
  out += '\n';
  for (std::size_t d = 0; d < model.doc_ids.size(); ++d) {
    out += model.doc_ids[d];
    for (std::size_t k = 0; k < model.n_topics(); ++k) out += '\t' + format_fixed(model.theta(d, k) * 100.0, 3);
    out += '\n';
  }
  return out;
}

std::string write_classification(const std::vector<ClassificationResult>& rows) {
  std::string out(kClassificationHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r.sha256 + '\t' + r.package_id + '\t' + "T" + std::to_string(r.assignment.primary_topic() + 1) + '\t' +
           r.category;
    for (std::size_t i = 0; i < 4; ++i) {
      if (i < r.assignment.contributions.size()) {
        const auto& c = r.assignment.contributions[i];
        out += "\tT" + std::to_string(c.topic + 1) + '\t' + format_fixed(c.percent, 3);
      } else {
        out += "\t\t";
      }
    }
    out += '\t';
    out += r.verdict.anomaly ? "true" : "false";
    out += '\t' + join(r.verdict.reasons, ",") + '\n';
  }
  return out;
}

std::vector<ClassificationResult> parse_classification(std::string_view text) {
  std::vector<ClassificationResult> rows;
  for_each_row(text, kClassificationHeader, 14, [&](const std::vector<std::string>& f, std::size_t line) {
    ClassificationResult r;
    r.sha256 = f[0];
    r.package_id = f[1];
    r.assignment.app_id = f[0];
    r.category = f[3];
    for (std::size_t i = 0; i < 4; ++i) {
      const auto& topic = f[4 + 2 * i];
      if (topic.empty()) break;
      r.assignment.contributions.push_back({parse_topic(topic, line), parse_ratio(f[5 + 2 * i], line)});
    }
    if (r.assignment.contributions.empty() || r.assignment.primary_topic() != parse_topic(f[2], line)) {
      throw Error("line " + std::to_string(line) + ": primary topic does not match the first contribution");
    }
    r.verdict.anomaly = parse_bool(f[12], line);
    if (!f[13].empty()) r.verdict.reasons = split_char(f[13], ',');
    rows.push_back(std::move(r));
  });
  return rows;
}

TopicLabelMap parse_label_map(std::string_view text) {
  TopicLabelMap map;
  for_each_row(text, kLabelHeader, 3, [&](const std::vector<std::string>& f, std::size_t line) {
    if (f[1].empty()) throw Error("line " + std::to_string(line) + ": empty category");
    map.set(parse_topic(f[0], line), TopicLabel{f[1], parse_bool(f[2], line)});
  });
  return map;
}

std::string write_label_map(const TopicLabelMap& map) {
  std::string out(kLabelHeader);
  out += '\n';
  for (const auto& [topic, label] : map.entries()) {
    out += std::to_string(topic + 1) + '\t' + label.category + '\t' + (label.malware ? "true" : "false") + '\n';
  }
  return out;
}

ReferenceLabels parse_reference_labels(std::string_view text) {
  ReferenceLabels labels;
  for_each_row(text, kReferenceHeader, 2, [&](const std::vector<std::string>& f, std::size_t line) {
    if (f[0].empty() || f[1].empty()) throw Error("line " + std::to_string(line) + ": empty field");
    labels[f[0]] = f[1];
  });
  return labels;
}

std::string write_similarity(const SimilarityReport& report) {
  std::string out = "topic\tcategory\tapps\tmatches\tsimilarity\n";
  for (const auto& [topic, entry] : report.per_topic) {
    out += "T" + std::to_string(topic + 1) + '\t' + (entry.category.empty() ? "-" : entry.category) + '\t' +
           std::to_string(entry.apps) + '\t' + std::to_string(entry.matches) + '\t' +
           (entry.percent ? format_fixed(*entry.percent, 2) : "NA") + '\n';
  }
  out += "Average\t\t\t\t" + (report.average ? format_fixed(*report.average, 2) : std::string("NA")) + '\n';
  return out;
}

std::string write_topic_map(const TopicMap& map, const LdaModel& model, std::size_t n_words) {
  nlohmann::ordered_json doc;
  doc["n_topics"] = model.n_topics();
  doc["distance"] = "jensen-shannon (base 2)";
  auto topics = nlohmann::ordered_json::array();
  for (const auto& t : map.topics) {
    nlohmann::ordered_json entry;
    entry["topic"] = t.topic + 1;
    entry["prevalence"] = t.prevalence;
    entry["x"] = t.x;
    entry["y"] = t.y;
    auto words = nlohmann::ordered_json::array();
    for (auto& [w, p] : top_words(model, t.topic, n_words)) words.push_back({{"token", w}, {"probability", p}});
    entry["top_words"] = std::move(words);
    topics.push_back(std::move(entry));
  }
  doc["topics"] = std::move(topics);
  auto div = nlohmann::ordered_json::array();
  for (std::size_t a = 0; a < map.divergence.rows(); ++a) {
    auto row = map.divergence.row(a);
    div.push_back(std::vector<double>(row.begin(), row.end()));
  }
  doc["divergence"] = std::move(div);
  return doc.dump(2) + '\n';
}

}  // namespace apptopics::formats
