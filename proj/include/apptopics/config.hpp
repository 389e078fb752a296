#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "apptopics/classify.hpp"
#include "apptopics/preprocess.hpp"
#include "apptopics/textstats.hpp"
#include "apptopics/topicmodel.hpp"

namespace apptopics {

// Flat `key = value` file. `#` starts a comment; unknown keys are errors.
struct PipelineConfig {
  std::filesystem::path input_root;
  std::filesystem::path output_dir;
  std::filesystem::path dictionary = std::filesystem::path(APPTOPICS_DATA_DIR) / "english_words.txt";
  std::filesystem::path label_map;
  std::filesystem::path reference_labels;
  std::filesystem::path flags;
  std::string ocr_adapter = "sidecar";
  std::string ocr_command;
  Words extra_stopwords;

  PipelineThresholds pipeline;
  TextStatsThresholds text;
  LdaConfig lda;
  AnomalyThresholds anomaly;
  double topic_min_pct = 1.0;
  std::size_t topic_max_n = 4;
  std::size_t top_words = 20;
  std::size_t infer_iterations = 100;

  // Range checks plus existence of every referenced input file.
  void validate() const;
};

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace apptopics
