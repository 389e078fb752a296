#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "apptopics/classify.hpp"
#include "apptopics/config.hpp"
#include "apptopics/extract.hpp"
#include "apptopics/formats.hpp"
#include "apptopics/preprocess.hpp"
#include "apptopics/textstats.hpp"
#include "apptopics/topicmodel.hpp"

namespace fs = std::filesystem;
using namespace apptopics;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Configuration file (key = value)");
  cmd->add_option("--seed", c.seed, "Override the configured seed");
}

PipelineConfig load(const Common& c) {
  PipelineConfig cfg = c.config.empty() ? PipelineConfig{} : load_config(c.config);
  if (c.seed) cfg.lda.seed = *c.seed;
  cfg.validate();
  return cfg;
}

// Explicit flag, else <output_dir>/<name>.
fs::path resolve(const std::string& given, const PipelineConfig& cfg, const char* name, const char* flag) {
  if (!given.empty()) return given;
  if (cfg.output_dir.empty()) throw Error(std::string("no ") + flag + " given and no output_dir configured");
  return cfg.output_dir / name;
}

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

void write_output(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file_atomic(path, content);
  std::cerr << "wrote " << path.string() << '\n';
}

std::vector<LdaDocument> documents_of(const Corpus& corpus) {
  std::vector<std::pair<std::string, Words>> docs;
  for (const auto& app : corpus) {
    Words tokens = app.method_tokens;
    tokens.insert(tokens.end(), app.xml_tokens.begin(), app.xml_tokens.end());
    tokens.insert(tokens.end(), app.gui_tokens.begin(), app.gui_tokens.end());
    if (tokens.empty()) {
      warn("app " + app.sha256 + " has no tokens; left out of the model");
      continue;
    }
    docs.emplace_back(app.sha256, std::move(tokens));
  }
  return make_documents(std::move(docs));
}

int cmd_extract(const Common& c, const std::string& input, const std::string& out, const std::string& flags_out) {
  PipelineConfig cfg = load(c);
  fs::path root = input.empty() ? cfg.input_root : fs::path(input);
  if (root.empty()) throw Error("no input root given");
  auto apps = discover_apps(root);
  if (apps.empty()) throw Error("no app directories under " + root.string());

  auto ocr = make_ocr_adapter(cfg.ocr_adapter, cfg.ocr_command);
  auto table = StopwordTable::android_default();
  for (const auto& w : cfg.extra_stopwords) table.add(w);
  auto dict = EnglishDictionary::load(cfg.dictionary);

  Corpus rows;
  std::vector<formats::FlagRow> flag_rows;
  for (std::size_t i = 0; i < apps.size(); ++i) {
    try {
      RawAppFeatures rec = extract_app(apps[i], *ocr, table);
      std::cerr << "[" << i + 1 << "/" << apps.size() << "] " << rec.package_id << ": " << rec.method_words.size()
                << " method, " << rec.xml_words.size() << " xml, " << rec.gui_words.size() << " gui words";
      if (rec.skipped_file_count) std::cerr << ", " << rec.skipped_file_count << " files skipped";
      std::cerr << '\n';
      flag_rows.push_back({rec.sha256, rec.package_id, compute_flags(rec, dict, cfg.text)});
      rows.push_back(formats::to_tokens(rec));
    } catch (const std::exception& e) {
      warn("skipping " + apps[i].root_path.string() + ": " + e.what());
    }
  }
  write_output(resolve(out, cfg, "dataset1.tsv", "--out"), formats::write_dataset(rows));
  fs::path fp = !flags_out.empty() ? fs::path(flags_out) : !cfg.flags.empty() ? cfg.flags : resolve("", cfg, "flags.tsv", "--flags-out");
  write_output(fp, formats::write_flags(flag_rows));
  return 0;
}

int cmd_preprocess(const Common& c, const std::string& in, const std::string& out, const std::string& report) {
  PipelineConfig cfg = load(c);
  Corpus raw = formats::parse_dataset(read_file(resolve(in, cfg, "dataset1.tsv", "--in")));
  auto dict = EnglishDictionary::load(cfg.dictionary);
  auto result = preprocess_corpus(raw, cfg.pipeline, dict, cfg.text);
  std::cerr << raw.size() << " apps in, " << result.corpus.size() << " kept, " << result.removed.size()
            << " removed\n";
  write_output(resolve(out, cfg, "dataset2.tsv", "--out"), formats::write_dataset(result.corpus));
  write_output(resolve(report, cfg, "removed.tsv", "--report"), formats::write_removal_report(result.removed));
  return 0;
}

int cmd_fit(const Common& c, const std::string& in, const std::string& model_out, const std::string& keys_out,
            const std::string& comp_out) {
  PipelineConfig cfg = load(c);
  Corpus corpus = formats::parse_dataset(read_file(resolve(in, cfg, "dataset2.tsv", "--in")));
  auto docs = documents_of(corpus);
  if (docs.empty()) throw Error("Dataset-2 has no documents to fit");
  if (docs.size() < cfg.lda.n_topics) {
    warn(std::to_string(docs.size()) + " documents for " + std::to_string(cfg.lda.n_topics) + " topics");
  }
  const std::size_t report_every = std::max<std::size_t>(1, cfg.lda.n_iterations / 10);
  LdaModel model = fit_gibbs(docs, cfg.lda, [&](const GibbsSampler& s) {
    if (s.sweeps_done() > 0 && s.sweeps_done() % report_every == 0) {
      std::cerr << "sweep " << s.sweeps_done() << "/" << cfg.lda.n_iterations << '\n';
    }
  });
  std::cerr << "log-likelihood " << corpus_log_likelihood(model, docs) << '\n';
  write_output(resolve(model_out, cfg, "model.lda", "--model"), serialize_model(model));
  write_output(resolve(keys_out, cfg, "topic_keys.tsv", "--keys"), formats::write_topic_keys(model, cfg.top_words));
  write_output(resolve(comp_out, cfg, "composition.tsv", "--composition"), formats::write_composition(model));
  return 0;
}

int cmd_classify(const Common& c, const std::string& model_in, const std::string& in, const std::string& flags_in,
                 const std::string& labels_in, const std::string& out) {
  PipelineConfig cfg = load(c);
  LdaModel model = load_model(resolve(model_in, cfg, "model.lda", "--model"));
  Corpus corpus = formats::parse_dataset(read_file(resolve(in, cfg, "dataset2.tsv", "--in")));

  fs::path labels_path = !labels_in.empty() ? fs::path(labels_in) : cfg.label_map;
  TopicLabelMap labels = labels_path.empty() ? TopicLabelMap::default_map(model.n_topics())
                                             : formats::parse_label_map(read_file(labels_path));

  std::map<std::string, TextQualityFlags, std::less<>> flags;
  fs::path flags_path = !flags_in.empty() ? fs::path(flags_in) : cfg.flags;
  if (flags_path.empty() && !cfg.output_dir.empty() && fs::exists(cfg.output_dir / "flags.tsv")) {
    flags_path = cfg.output_dir / "flags.tsv";
  }
  if (flags_path.empty()) {
    warn("no flags file; obfuscation and encryption flags treated as false");
  } else {
    for (auto& row : formats::parse_flags(read_file(flags_path))) flags[row.sha256] = row.flags;
  }

  std::vector<ClassificationResult> results;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& app = corpus[i];
    std::vector<double> theta;
    if (auto d = model.doc_index(app.sha256)) {
      auto row = model.theta.row(*d);
      theta.assign(row.begin(), row.end());
    } else {
      Words tokens = app.method_tokens;
      tokens.insert(tokens.end(), app.xml_tokens.begin(), app.xml_tokens.end());
      tokens.insert(tokens.end(), app.gui_tokens.begin(), app.gui_tokens.end());
      std::size_t known = 0;
      theta = infer_theta(model, tokens, model.doc_ids.size() + i, cfg.infer_iterations, &known);
      if (known == 0) {
        warn("app " + app.sha256 + " shares no tokens with the model; using the uniform prior");
      } else {
        warn("app " + app.sha256 + " not in the model; theta inferred from " + std::to_string(known) + " tokens");
      }
    }
    ClassificationResult r;
    r.sha256 = app.sha256;
    r.package_id = app.package_id;
    r.assignment.app_id = app.sha256;
    r.assignment.contributions = top_topics(theta, cfg.topic_min_pct, cfg.topic_max_n);
    if (r.assignment.contributions.empty()) r.assignment.contributions = top_topics(theta, 0.0, 1);
    if (const TopicLabel* label = labels.find(r.assignment.primary_topic())) {
      r.category = label->category;
    } else {
      r.category = "Unmapped";
      warn("topic T" + std::to_string(r.assignment.primary_topic() + 1) + " has no category");
    }
    auto fit = flags.find(app.sha256);
    if (!flags_path.empty() && fit == flags.end()) warn("app " + app.sha256 + " missing from the flags file");
    r.verdict = flag_anomaly(fit == flags.end() ? TextQualityFlags{} : fit->second, theta, cfg.anomaly);
    results.push_back(std::move(r));
  }
  write_output(resolve(out, cfg, "classification.tsv", "--out"), formats::write_classification(results));
  return 0;
}

int cmd_similarity(const Common& c, const std::string& in, const std::string& reference_in,
                   const std::string& labels_in, const std::string& out, const std::string& labels_out) {
  PipelineConfig cfg = load(c);
  auto rows = formats::parse_classification(read_file(resolve(in, cfg, "classification.tsv", "--in")));
  fs::path ref_path = !reference_in.empty() ? fs::path(reference_in) : cfg.reference_labels;
  if (ref_path.empty()) throw Error("no reference labels given");
  ReferenceLabels given = formats::parse_reference_labels(read_file(ref_path));

  // Reference rows may be keyed by sha256 or by package id.
  ReferenceLabels reference;
  std::vector<TopicAssignment> assignments;
  for (const auto& r : rows) {
    auto it = given.find(r.sha256);
    if (it == given.end()) it = given.find(r.package_id);
    if (it == given.end()) throw Error("no reference category for app " + r.sha256 + " (" + r.package_id + ")");
    reference[r.sha256] = it->second;
    assignments.push_back(r.assignment);
  }

  fs::path labels_path = !labels_in.empty() ? fs::path(labels_in) : cfg.label_map;
  TopicLabelMap labels = labels_path.empty() ? majority_label_map(assignments, reference)
                                             : formats::parse_label_map(read_file(labels_path));
  auto report = most_frequent_match_similarity(assignments, reference, labels);
  write_output(resolve(out, cfg, "similarity.tsv", "--out"), formats::write_similarity(report));
  if (!labels_out.empty()) write_output(labels_out, formats::write_label_map(labels));
  return 0;
}

int cmd_topicmap(const Common& c, const std::string& model_in, const std::string& out) {
  PipelineConfig cfg = load(c);
  LdaModel model = load_model(resolve(model_in, cfg, "model.lda", "--model"));
  write_output(resolve(out, cfg, "topicmap.json", "--out"),
               formats::write_topic_map(emit_topic_map(model), model, std::min<std::size_t>(cfg.top_words, 10)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic-model classification of decompiled Android apps"};
  app.require_subcommand(1);

  Common common;
  std::string input, in, out, flags, report, model, keys, composition, labels, reference, labels_out;

  auto* extract = app.add_subcommand("extract", "Decompiled app directories -> Dataset-1 and flags");
  add_common(extract, common);
  extract->add_option("--input", input, "Directory holding <sha256>__<package> app directories");
  extract->add_option("--out", out, "Dataset-1 output file");
  extract->add_option("--flags-out", flags, "Text-quality flags output file");

  auto* preprocess = app.add_subcommand("preprocess", "Dataset-1 -> Dataset-2 and removal report");
  add_common(preprocess, common);
  preprocess->add_option("--in", in, "Dataset-1 file");
  preprocess->add_option("--out", out, "Dataset-2 output file");
  preprocess->add_option("--report", report, "Removal report output file");

  auto* fit = app.add_subcommand("fit", "Dataset-2 -> LDA model, topic keys and composition");
  add_common(fit, common);
  fit->add_option("--in", in, "Dataset-2 file");
  fit->add_option("--model", model, "Model output file");
  fit->add_option("--keys", keys, "Topic keys output file");
  fit->add_option("--composition", composition, "Composition output file");

  auto* classify = app.add_subcommand("classify", "Model + Dataset-2 -> classification");
  add_common(classify, common);
  classify->add_option("--model", model, "Model file");
  classify->add_option("--in", in, "Dataset-2 file");
  classify->add_option("--flags", flags, "Flags file written by extract");
  classify->add_option("--label-map", labels, "Topic label map");
  classify->add_option("--out", out, "Classification output file");

  auto* similarity = app.add_subcommand("similarity", "Classification + reference labels -> similarity report");
  add_common(similarity, common);
  similarity->add_option("--in", in, "Classification file");
  similarity->add_option("--reference", reference, "Reference labels file");
  similarity->add_option("--label-map", labels, "Fixed label map (default: majority vote)");
  similarity->add_option("--out", out, "Similarity report output file");
  similarity->add_option("--label-map-out", labels_out, "Write the label map used");

  auto* topicmap = app.add_subcommand("topicmap", "Model -> topic map JSON");
  add_common(topicmap, common);
  topicmap->add_option("--model", model, "Model file");
  topicmap->add_option("--out", out, "Topic map output file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*extract) return cmd_extract(common, input, out, flags);
    if (*preprocess) return cmd_preprocess(common, in, out, report);
    if (*fit) return cmd_fit(common, in, model, keys, composition);
    if (*classify) return cmd_classify(common, model, in, flags, labels, out);
    if (*similarity) return cmd_similarity(common, in, reference, labels, out, labels_out);
    if (*topicmap) return cmd_topicmap(common, model, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
