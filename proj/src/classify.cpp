#include "apptopics/classify.hpp"

#include <algorithm>
#include <numeric>

namespace apptopics {

const std::vector<std::string>& default_category_names() {
  static const std::vector<std::string> kNames = {
      "Personalization", "Cards",          "Education",          "Libraries_and_Demo",  "Lifestyle",
      "Tools",           "Medical",        "Music_and_Audio",    "Sports",              "Arcade",
      "Transportation",  "Business",       "Non-Match",          "Communication",       "Casual",
      "Brain",           "Health_and_Fitness", "Finance",        "Productivity",        "Books_and_Reference",
      "Racing",          "Photography",    "Entertainment",      "Media_and_Video",     "Comics",
      "Weather",         "Travel_and_Local", "Sports_Games",     "News_and_Magazines",  "Shopping",
      "Social"};
  return kNames;
}

TopicLabelMap TopicLabelMap::default_map(std::size_t n_topics) {
  TopicLabelMap map;
  const auto& names = default_category_names();
  for (std::size_t k = 0; k < n_topics; ++k) {
    map.set(k, TopicLabel{k < names.size() ? names[k] : "Topic" + std::to_string(k + 1), false});
  }
  return map;
}

void TopicLabelMap::set(std::size_t topic, TopicLabel label) {
  if (label.category.empty()) throw Error("category name must not be empty");
  entries_[topic] = std::move(label);
}

const TopicLabel* TopicLabelMap::find(std::size_t topic) const {
  auto it = entries_.find(topic);
  return it == entries_.end() ? nullptr : &it->second;
}

std::size_t TopicAssignment::primary_topic() const {
  if (contributions.empty()) throw Error("app '" + app_id + "' has no topic contributions");
  return contributions.front().topic;
}

std::string assign_category(const TopicAssignment& assignment, const TopicLabelMap& labels) {
  const std::size_t primary = assignment.primary_topic();
  const TopicLabel* label = labels.find(primary);
  if (!label) throw Error("topic T" + std::to_string(primary + 1) + " has no category");
  return label->category;
}

namespace {

const std::string& reference_for(const TopicAssignment& a, const ReferenceLabels& reference) {
  auto it = reference.find(a.app_id);
  if (it == reference.end()) throw Error("no reference category for app '" + a.app_id + "'");
  return it->second;
}

}  // namespace

TopicLabelMap majority_label_map(std::span<const TopicAssignment> assignments, const ReferenceLabels& reference) {
  std::map<std::size_t, std::map<std::string, std::size_t>> votes;
  for (const auto& a : assignments) ++votes[a.primary_topic()][reference_for(a, reference)];
  TopicLabelMap map;
  for (const auto& [topic, counts] : votes) {
    // std::map iterates categories alphabetically, so the first maximum wins ties.
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    map.set(topic, TopicLabel{best->first, false});
  }
  return map;
}

SimilarityReport most_frequent_match_similarity(std::span<const TopicAssignment> assignments,
                                                const ReferenceLabels& reference, const TopicLabelMap& labels) {
  SimilarityReport report;
  for (const auto& a : assignments) {
    const std::string& ref = reference_for(a, reference);
    auto& entry = report.per_topic[a.primary_topic()];
    ++entry.apps;
    if (const TopicLabel* label = labels.find(a.primary_topic()); label && label->category == ref) ++entry.matches;
  }
  std::vector<double> present;
  for (auto& [topic, entry] : report.per_topic) {
    const TopicLabel* label = labels.find(topic);
    if (!label) continue;
    entry.category = label->category;
    if (label->category == kNonMatchCategory) continue;
    entry.percent = 100.0 * static_cast<double>(entry.matches) / static_cast<double>(entry.apps);
    present.push_back(*entry.percent);
  }
  if (!present.empty()) {
    report.average = std::accumulate(present.begin(), present.end(), 0.0) / static_cast<double>(present.size());
  }
  return report;
}

AnomalyVerdict flag_anomaly(const TextQualityFlags& flags, std::span<const double> theta_row,
                            const AnomalyThresholds& thresholds) {
  AnomalyVerdict v;
  if (flags.obfuscated_methods || flags.obfuscated_xml) v.reasons.emplace_back("obfuscated");
  if (flags.encrypted_present) v.reasons.emplace_back("encrypted");
  auto spread = std::count_if(theta_row.begin(), theta_row.end(),
                              [&](double p) { return p * 100.0 >= thresholds.spread_percent; });
  if (static_cast<std::size_t>(spread) >= thresholds.min_topics) v.reasons.emplace_back("topic-spread");
  v.anomaly = v.reasons.size() == 3;
  return v;
}

}  // namespace apptopics
