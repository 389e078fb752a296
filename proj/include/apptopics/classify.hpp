#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "apptopics/textstats.hpp"
#include "apptopics/topicmodel.hpp"

namespace apptopics {

inline constexpr std::string_view kNonMatchCategory = "Non-Match";

struct TopicLabel {
  std::string category;
  bool malware = false;

  bool operator==(const TopicLabel&) const = default;
};

// Topic (zero-based) to category. Topics without an entry are unmapped.
class TopicLabelMap {
 public:
  // The 31 default category names for topics 1..31 in order; topics beyond
  // 31 are named "Topic<k>".
  static TopicLabelMap default_map(std::size_t n_topics);

  void set(std::size_t topic, TopicLabel label);
  const TopicLabel* find(std::size_t topic) const;
  const std::map<std::size_t, TopicLabel>& entries() const { return entries_; }

 private:
  std::map<std::size_t, TopicLabel> entries_;
};

const std::vector<std::string>& default_category_names();

struct TopicAssignment {
  std::string app_id;
  std::vector<TopicShare> contributions;

  std::size_t primary_topic() const;
};

struct AnomalyVerdict {
  bool anomaly = false;
  std::vector<std::string> reasons;
};

struct ClassificationResult {
  std::string sha256;
  std::string package_id;
  TopicAssignment assignment;
  std::string category;
  AnomalyVerdict verdict;
};

std::string assign_category(const TopicAssignment& assignment, const TopicLabelMap& labels);

// App id -> reference category.
using ReferenceLabels = std::map<std::string, std::string, std::less<>>;

// For each topic, the most common reference category among apps whose
// primary topic it is. Ties go to the alphabetically first category.
TopicLabelMap majority_label_map(std::span<const TopicAssignment> assignments, const ReferenceLabels& reference);

struct TopicSimilarity {
  std::size_t apps = 0;
  std::size_t matches = 0;
  std::string category;
  std::optional<double> percent;  // absent for unmapped or Non-Match topics
};

struct SimilarityReport {
  std::map<std::size_t, TopicSimilarity> per_topic;
  std::optional<double> average;
};

SimilarityReport most_frequent_match_similarity(std::span<const TopicAssignment> assignments,
                                                const ReferenceLabels& reference, const TopicLabelMap& labels);

struct AnomalyThresholds {
  double spread_percent = 8.0;
  std::size_t min_topics = 2;
};

// Reasons are gathered independently; the app is an anomaly candidate only
// when all three are present.
AnomalyVerdict flag_anomaly(const TextQualityFlags& flags, std::span<const double> theta_row,
                            const AnomalyThresholds& thresholds = {});

}  // namespace apptopics
