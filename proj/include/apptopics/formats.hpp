#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "apptopics/classify.hpp"
#include "apptopics/extract.hpp"
#include "apptopics/preprocess.hpp"
#include "apptopics/textstats.hpp"
#include "apptopics/topicmodel.hpp"

// Every file is UTF-8, tab-separated, with one header row.
namespace apptopics::formats {

inline constexpr std::string_view kNullField = "Null";

// Dataset-1 / Dataset-2: sha256, package_id, method_names, xml_values, gui_text.
// Token fields are space-joined; an empty list is written as "Null".
std::string write_dataset(const Corpus& rows);
Corpus parse_dataset(std::string_view text);

AppTokens to_tokens(const RawAppFeatures& rec);

struct FlagRow {
  std::string sha256;
  std::string package_id;
  TextQualityFlags flags;
};

std::string write_flags(const std::vector<FlagRow>& rows);
std::vector<FlagRow> parse_flags(std::string_view text);

std::string write_removal_report(const std::vector<RemovedApp>& removed);

// One line per topic: topic number (1-based), alpha, top words.
std::string write_topic_keys(const LdaModel& model, std::size_t n_words = 20);

// One row per app: sha256 then the K topic percentages.
std::string write_composition(const LdaModel& model);

std::string write_classification(const std::vector<ClassificationResult>& rows);
std::vector<ClassificationResult> parse_classification(std::string_view text);

// topic (1-based), category, malware flag (true/false).
TopicLabelMap parse_label_map(std::string_view text);
std::string write_label_map(const TopicLabelMap& map);

// app id, category. The app id may be a sha256 or a package id.
ReferenceLabels parse_reference_labels(std::string_view text);

std::string write_similarity(const SimilarityReport& report);

std::string write_topic_map(const TopicMap& map, const LdaModel& model, std::size_t n_words = 10);

}  // namespace apptopics::formats
