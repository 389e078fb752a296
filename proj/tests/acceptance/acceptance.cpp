// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "apptopics/classify.hpp"
#include "apptopics/extract.hpp"
#include "apptopics/formats.hpp"
#include "apptopics/porter.hpp"
#include "apptopics/preprocess.hpp"
#include "apptopics/textstats.hpp"
#include "apptopics/topicmodel.hpp"

using namespace apptopics;
namespace fs = std::filesystem;

namespace {

const fs::path kTestDir = APPTOPICS_TEST_DIR;
const fs::path kDictionary = fs::path(APPTOPICS_DATA_DIR) / "english_words.txt";

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (cond) return;
    if (ok) detail = what;
    ok = false;
  }
};

struct Criterion {
  int id;
  std::string name;
  double limit_s;
  std::function<Outcome()> run;
};

// ---------------------------------------------------------------------------

Outcome london_fixture() {
  Outcome out;
  auto apps = discover_apps(kTestDir / "fixtures" / "london");
  out.require(apps.size() == 1, "expected one fixture app");
  if (!out.ok) return out;

  SidecarOcr ocr;
  auto rec = extract_app(apps[0], ocr, StopwordTable::android_default());
  auto dict = EnglishDictionary::load(kDictionary);
  PipelineThresholds t;
  t.prune = false;
  auto result = preprocess_corpus({formats::to_tokens(rec)}, t, dict);
  out.require(result.corpus.size() == 1, "fixture app was filtered out");
  if (!out.ok) return out;
  const auto& app = result.corpus[0];

  const std::set<std::string> xml(app.xml_tokens.begin(), app.xml_tokens.end());
  const std::set<std::string> methods(app.method_tokens.begin(), app.method_tokens.end());
  const Words expected_xml = split_whitespace(
      "accur afghan african albanian alert american apart argentinian armenian asian australian austrian barbecu "
      "beach belgian bike bistro brazilian breakfast bridg british build burmes calcul cambodian canadian caribbean "
      "casino center chilean chines cinema club coffe colombian comput convent cream creperi croatian cuban czech "
      "dessert dinner distanc durat dutch ecuadorian educ egyptian elev english enhanc ethiopian european failur "
      "fast food fountain french garden german greek health histor hous hungarian imperi indian indonesian interact "
      "intern irish isra italian jamaican japanes keep korean landmark layer lebanes librari lodg london malaysian "
      "mediterranean metric mexican moment mongolian monument moroccan museum navig near neighborhood nepali order "
      "organ pakistani park pasta perform persian philippin pizza poi polish portugues proxim recommend religi "
      "restaurantsamppub romanian room rout russian satellit scottish seafood site spanish sport star streetview "
      "sushi swedish swiss taiwanes thai theater theme these tibetan tour tourist traffic transport tunisian "
      "turkish unit vegetarian vietnames walk waterfal");
  std::vector<std::string> missing;
  for (const auto& w : expected_xml) {
    if (!xml.count(w)) missing.push_back(w);
  }
  out.require(missing.empty(), "missing XML tokens: " + join(missing, " "));
  for (const char* m : {"bulk", "compass", "rout"}) {
    out.require(methods.count(m) == 1, std::string("missing method token ") + m);
  }
  out.require(app.gui_tokens.empty(), "GUI tokens not empty: " + join(app.gui_tokens, " "));
  out.detail = out.ok ? std::to_string(expected_xml.size()) + "/" + std::to_string(expected_xml.size()) +
                            " XML tokens, GUI Null"
                      : out.detail;
  return out;
}

// ---------------------------------------------------------------------------

Outcome porter_oracle() {
  Outcome out;
  auto voc = split_whitespace(read_file(kTestDir / "data" / "porter_voc.txt"));
  auto expected = split_whitespace(read_file(kTestDir / "data" / "porter_output.txt"));
  out.require(voc.size() == expected.size() && !voc.empty(), "vocabulary and output differ in length");
  if (!out.ok) return out;
  std::size_t agree = 0;
  std::vector<std::string> diffs;
  for (std::size_t i = 0; i < voc.size(); ++i) {
    if (porter_stem(voc[i]) == expected[i]) {
      ++agree;
    } else if (diffs.size() < 5) {
      diffs.push_back(voc[i] + "->" + porter_stem(voc[i]) + " (want " + expected[i] + ")");
    }
  }
  double rate = static_cast<double>(agree) / static_cast<double>(voc.size());
  std::ostringstream s;
  s << agree << "/" << voc.size() << " agree (" << std::fixed << std::setprecision(3) << rate * 100.0 << "%)";
  if (!diffs.empty()) s << "; e.g. " << join(diffs, ", ");
  out.require(rate >= 0.999, s.str());
  if (out.ok) out.detail = s.str();
  return out;
}

// ---------------------------------------------------------------------------

Outcome gibbs_recovery() {
  Outcome out;
  constexpr std::size_t kDocs = 100, kTokens = 50, kWordsPerTopic = 10;
  std::mt19937_64 gen(20240601);
  std::vector<std::pair<std::string, Words>> raw;
  std::vector<int> truth;
  for (std::size_t d = 0; d < kDocs; ++d) {
    int topic = static_cast<int>(d % 2);
    Words tokens;
    for (std::size_t i = 0; i < kTokens; ++i) {
      tokens.push_back((topic == 0 ? "alpha" : "omega") + std::to_string(gen() % kWordsPerTopic));
    }
    raw.emplace_back("doc" + std::to_string(d), std::move(tokens));
    truth.push_back(topic);
  }
  auto docs = make_documents(raw);
  LdaConfig cfg;
  cfg.n_topics = 2;
  cfg.seed = 7;

  const std::int64_t total = static_cast<std::int64_t>(kDocs * kTokens);
  std::size_t sweeps_checked = 0;
  std::vector<double> trace;
  auto observer = [&](const GibbsSampler& s) {
    const auto& tw = s.topic_word_counts();
    const auto& dt = s.doc_topic_counts();
    bool ok = std::accumulate(tw.data().begin(), tw.data().end(), std::int64_t{0}) == total &&
              std::accumulate(dt.data().begin(), dt.data().end(), std::int64_t{0}) == total;
    for (std::size_t k = 0; k < tw.rows(); ++k) {
      auto row = tw.row(k);
      ok = ok && std::accumulate(row.begin(), row.end(), std::int64_t{0}) == s.topic_totals()[k];
      ok = ok && std::all_of(row.begin(), row.end(), [](std::int64_t c) { return c >= 0; });
    }
    for (std::size_t d = 0; d < dt.rows(); ++d) {
      auto row = dt.row(d);
      ok = ok && std::accumulate(row.begin(), row.end(), std::int64_t{0}) == static_cast<std::int64_t>(kTokens);
    }
    if (!ok) out.require(false, "count conservation broken after sweep " + std::to_string(s.sweeps_done()));
    ++sweeps_checked;
    trace.push_back(s.log_likelihood());
  };
  auto model = fit_gibbs(docs, cfg, observer);
  out.require(sweeps_checked == cfg.n_iterations + 1, "observer did not see every sweep");

  auto check_rows = [&](const Matrix<double>& m, const char* what) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
      auto row = m.row(r);
      double sum = std::accumulate(row.begin(), row.end(), 0.0);
      if (std::abs(sum - 1.0) > 1e-9) out.require(false, std::string(what) + " row does not sum to 1");
    }
  };
  check_rows(model.theta, "theta");
  check_rows(model.phi, "phi");

  std::size_t best = 0;
  for (int perm = 0; perm < 2; ++perm) {
    std::size_t hits = 0;
    for (std::size_t d = 0; d < kDocs; ++d) {
      std::size_t k = static_cast<std::size_t>(perm == 0 ? truth[d] : 1 - truth[d]);
      if (model.theta(d, k) >= 0.8) ++hits;
    }
    best = std::max(best, hits);
  }
  out.require(best * 10 >= kDocs * 9, "only " + std::to_string(best) + " documents recovered");
  out.require(trace.back() >= trace[1], "log-likelihood fell below its first-sweep value");

  auto again = fit_gibbs(docs, cfg);
  out.require(again.phi == model.phi && again.theta == model.theta &&
                  again.topic_word_counts == model.topic_word_counts &&
                  again.doc_topic_counts == model.doc_topic_counts,
              "rerun is not bit-identical");
  if (out.ok) {
    out.detail = std::to_string(best) + "/" + std::to_string(kDocs) + " docs recovered, " +
                 std::to_string(sweeps_checked) + " states conserved";
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> theta_from_shares(const std::vector<std::pair<int, double>>& shares, std::size_t k_total) {
  std::vector<double> theta(k_total, 0.0);
  double used = 0.0;
  for (auto [topic, pct] : shares) {
    theta[static_cast<std::size_t>(topic - 1)] = pct / 100.0;
    used += pct / 100.0;
  }
  // The remainder is spread over the unlisted topics.
  const double rest = (1.0 - used) / static_cast<double>(k_total - shares.size());
  for (auto& p : theta) {
    if (p == 0.0) p = rest;
  }
  return theta;
}

Outcome six_app_anomalies() {
  Outcome out;
  struct Row {
    const char* package;
    std::vector<std::pair<int, double>> shares;
    bool obf_methods, obf_xml, encrypted;
    bool expected;
    std::vector<std::string> reasons;
  };
  const std::vector<Row> rows = {
      {"net.bible.android.activity", {{12, 30.95}, {24, 23.15}, {22, 16.77}, {4, 10.99}}, true, true, true, true,
       {"obfuscated", "encrypted", "topic-spread"}},
      {"com.nubee.coinpirates", {{9, 55.84}, {31, 20.44}, {23, 12.14}, {28, 10.73}}, false, true, true, true,
       {"obfuscated", "encrypted", "topic-spread"}},
      {"com.lonelycatgames.Xplore", {{24, 70.26}, {27, 11.85}, {8, 8.99}, {28, 5.35}}, false, true, true, true,
       {"obfuscated", "encrypted", "topic-spread"}},
      {"com.electricsheep.dj", {{15, 71.08}, {28, 9.44}, {24, 6.64}, {10, 6.59}}, false, false, false, false,
       {"topic-spread"}},
      {"com.reverie.game.toiletpaper", {{16, 31.68}, {28, 26.50}, {24, 21.25}, {22, 14.10}}, false, false, false,
       false, {"topic-spread"}},
      {"org.openintents.filemanager", {{24, 87.80}, {12, 8.51}}, false, true, true, true,
       {"obfuscated", "encrypted", "topic-spread"}},
  };
  std::string got;
  for (const auto& r : rows) {
    TextQualityFlags f;
    f.obfuscated_methods = r.obf_methods;
    f.obfuscated_xml = r.obf_xml;
    f.encrypted_present = r.encrypted;
    auto v = flag_anomaly(f, theta_from_shares(r.shares, 31));
    got += v.anomaly ? 'T' : 'F';
    out.require(v.anomaly == r.expected, std::string("wrong verdict for ") + r.package);
    out.require(v.reasons == r.reasons, std::string("wrong reasons for ") + r.package + ": " + join(v.reasons, ","));
  }
  if (out.ok) out.detail = "verdicts " + got;
  return out;
}

// ---------------------------------------------------------------------------

Outcome london_top_topics() {
  Outcome out;
  auto theta = theta_from_shares({{12, 91.274}, {3, 6.725}, {31, 1.379}}, 31);
  auto shares = top_topics(theta, 1.0, 4);
  out.require(shares.size() == 3, "expected 3 contributions, got " + std::to_string(shares.size()));
  if (!out.ok) return out;
  out.require(shares[0].topic == 11 && shares[1].topic == 2 && shares[2].topic == 30, "wrong topic order");
  out.require(std::abs(shares[0].percent - 91.274) < 1e-9 && std::abs(shares[1].percent - 6.725) < 1e-9 &&
                  std::abs(shares[2].percent - 1.379) < 1e-9,
              "wrong percentages");
  TopicLabelMap map;
  map.set(11, {"Restaurant", false});
  std::string category = assign_category(TopicAssignment{"london", shares}, map);
  out.require(category == "Restaurant", "category " + category);
  if (out.ok) out.detail = "T12 91.274, T3 6.725, T31 1.379 -> Restaurant";
  return out;
}

// ---------------------------------------------------------------------------

Outcome similarity_oracle() {
  Outcome out;
  const std::vector<std::string> pool{"Arcade", "Cards", "Finance", "Non-Match", "Tools", "Weather"};
  std::mt19937_64 gen(99);
  for (int instance = 0; instance < 100 && out.ok; ++instance) {
    const std::size_t K = 1 + gen() % 10;
    const std::size_t n_apps = 1 + gen() % 200;
    const std::size_t n_cats = 1 + gen() % pool.size();
    std::vector<TopicAssignment> apps;
    ReferenceLabels ref;
    for (std::size_t i = 0; i < n_apps; ++i) {
      std::string id = "app" + std::to_string(i);
      apps.push_back({id, {{gen() % K, 50.0}}});
      ref[id] = pool[gen() % n_cats];
    }
    TopicLabelMap fixed;
    for (std::size_t k = 0; k < K; ++k) {
      if (gen() % 4 != 0) fixed.set(k, {pool[gen() % pool.size()], false});
    }
    auto majority = majority_label_map(apps, ref);

    for (const TopicLabelMap* map : {&fixed, &majority}) {
      auto report = most_frequent_match_similarity(apps, ref, *map);
      double sum = 0.0;
      std::size_t counted = 0;
      for (std::size_t k = 0; k < K; ++k) {
        std::size_t in_topic = 0, matches = 0;
        const TopicLabel* label = map->find(k);
        for (std::size_t i = 0; i < n_apps; ++i) {
          if (apps[i].contributions[0].topic != k) continue;
          ++in_topic;
          if (label && ref.at(apps[i].app_id) == label->category) ++matches;
        }
        auto it = report.per_topic.find(k);
        if (in_topic == 0) {
          out.require(it == report.per_topic.end(), "empty topic reported");
          continue;
        }
        out.require(it != report.per_topic.end() && it->second.apps == in_topic && it->second.matches == matches,
                    "count mismatch in instance " + std::to_string(instance));
        if (!label || label->category == kNonMatchCategory) {
          out.require(it != report.per_topic.end() && !it->second.percent, "unmapped topic has a percentage");
          continue;
        }
        double pct = 100.0 * static_cast<double>(matches) / static_cast<double>(in_topic);
        out.require(it != report.per_topic.end() && it->second.percent && *it->second.percent == pct,
                    "percentage mismatch in instance " + std::to_string(instance));
        sum += pct;
        ++counted;
      }
      if (counted == 0) {
        out.require(!report.average, "average present with no mapped topic");
      } else {
        out.require(report.average && *report.average == sum / static_cast<double>(counted),
                    "average mismatch in instance " + std::to_string(instance));
      }
    }

    // Argmax property of the majority map, with alphabetical tie-breaking.
    for (std::size_t k = 0; k < K; ++k) {
      std::map<std::string, std::size_t> votes;
      for (const auto& a : apps) {
        if (a.contributions[0].topic == k) ++votes[ref.at(a.app_id)];
      }
      const TopicLabel* label = majority.find(k);
      if (votes.empty()) {
        out.require(label == nullptr, "topic without apps was mapped");
        continue;
      }
      std::size_t best = 0;
      for (const auto& [c, n] : votes) best = std::max(best, n);
      out.require(label && votes[label->category] == best, "majority map is not an argmax");
      for (const auto& [c, n] : votes) {
        if (n == best) {
          out.require(label && label->category == c, "tie not broken alphabetically");
          break;
        }
      }
    }
  }
  if (out.ok) out.detail = "100 instances match the brute-force count";
  return out;
}

// ---------------------------------------------------------------------------

Corpus random_corpus(std::mt19937_64& gen, std::size_t n_apps, const Words& pool) {
  Corpus c;
  for (std::size_t i = 0; i < n_apps; ++i) {
    AppTokens a;
    std::ostringstream sha;
    sha << std::hex << std::setw(16) << std::setfill('0') << gen() << std::setw(16) << gen() << std::setw(16)
        << gen() << std::setw(16) << gen();
    a.sha256 = sha.str();
    a.package_id = "com.example.app" + std::to_string(i);
    for (Words* list : {&a.method_tokens, &a.xml_tokens, &a.gui_tokens}) {
      std::size_t n = gen() % 25;
      for (std::size_t j = 0; j < n; ++j) list->push_back(pool[gen() % pool.size()]);
    }
    c.push_back(std::move(a));
  }
  return c;
}

Outcome pipeline_invariants() {
  Outcome out;
  auto dict = EnglishDictionary::load(kDictionary);
  const Lemmatizer lem(&dict);
  const Words pool = split_whitespace(
      "Navigation libraries Beaches gardens museums Bridges theaters fountains monuments landmarks waterfalls "
      "coffee dinner pizza sushi pasta restaurant weather forecast rain cloud sunny music audio player volume "
      "camera photo gallery filter share wallet bank money transfer budget game score level player puzzle map "
      "route traffic station train ticket xkqzvbnmwrt deadbeefdeadbeefdeadbeefdeadbeef aGVsbG8gd29ybGQxMjM0 "
      "Im a-b OK 2014 v2 zz Fabs lis RestaurantsampPubs nearest largest centers children");
  std::mt19937_64 gen(31337);
  PipelineThresholds t;

  for (int trial = 0; trial < 60 && out.ok; ++trial) {
    Corpus raw = random_corpus(gen, 2 + gen() % 40, pool);

    // Dataset-1 round trip.
    auto text = formats::write_dataset(raw);
    out.require(formats::write_dataset(formats::parse_dataset(text)) == text, "Dataset-1 round trip changed bytes");

    for (const auto& app : raw) {
      // Per-stage idempotence and monotonicity.
      Words tok = tokenize(app.xml_tokens);
      Words norm = normalize(tok);
      Words shortless = drop_short(norm, t.min_token_len);
      out.require(normalize(norm) == norm, "normalize is not idempotent");
      out.require(drop_short(shortless, t.min_token_len) == shortless, "drop_short is not idempotent");
      out.require(norm.size() <= tok.size() && shortless.size() <= norm.size(), "stage grew the token list");
      Words cleaned = clean_tokens(app.xml_tokens, t, lem);
      out.require(cleaned.size() <= shortless.size(), "lemmatize/stem grew the token list");
      Words filtered = clean_tokens(app.gui_tokens, t, lem, &dict);
      out.require(filtered.size() <= clean_tokens(app.gui_tokens, t, lem).size(), "dictionary filter grew the list");

      double e = encrypted_ratio(app.method_tokens, app.xml_tokens, app.gui_tokens, dict);
      double n = non_english_ratio(app.method_tokens, app.xml_tokens, app.gui_tokens, dict);
      out.require(e >= 0.0 && e <= 1.0 && n >= 0.0 && n <= 1.0, "ratio outside [0, 1]");
    }

    Corpus cleaned;
    for (const auto& app : raw) cleaned.push_back(clean_app(app, t, lem, dict));
    auto once = prune_by_support(cleaned, compute_support(cleaned), t.support_cutoff);
    auto twice = prune_by_support(once, compute_support(once), t.support_cutoff);
    bool same = true;
    std::size_t before = 0, after = 0;
    for (std::size_t i = 0; i < once.size(); ++i) {
      same = same && once[i].method_tokens == twice[i].method_tokens && once[i].xml_tokens == twice[i].xml_tokens &&
             once[i].gui_tokens == twice[i].gui_tokens;
      before += cleaned[i].total_tokens();
      after += once[i].total_tokens();
    }
    out.require(same, "prune_by_support is not idempotent");
    out.require(after <= before, "pruning grew the corpus");

    PipelineThresholds loose = t;
    loose.min_keywords = 2;
    loose.max_non_english = 1.0;
    loose.max_encrypted = 1.0;
    auto result = preprocess_corpus(raw, loose, dict);
    out.require(result.corpus.size() + result.removed.size() == raw.size(), "apps lost by the pipeline");
    auto stats = compute_support(result.corpus);
    for (const auto& [token, count] : stats.doc_frequency) {
      if (stats.support(token) >= loose.support_cutoff) out.require(false, "token " + token + " above the cutoff");
    }
    for (const auto& app : result.corpus) {
      out.require(app.total_tokens() >= loose.min_keywords, "kept app below the keyword minimum");
    }
  }
  if (out.ok) out.detail = "60 random corpora";
  return out;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "London fixture: extract + preprocess reproduces the processed token table", 5.0, london_fixture},
      {2, "Porter stemmer vs. reference vocabulary (>= 99.9%)", 1.0, porter_oracle},
      {3, "Gibbs sampler recovers two disjoint topics", 10.0, gibbs_recovery},
      {4, "Six-app anomaly fixture", 0.0, six_app_anomalies},
      {5, "Top-topics fixture (91.274 / 6.725 / 1.379)", 0.0, london_top_topics},
      {6, "Similarity vs. brute-force oracle, majority argmax", 5.0, similarity_oracle},
      {7, "Pipeline invariants", 30.0, pipeline_invariants},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0.0 && secs >= c.limit_s) {
      o.ok = false;
      o.detail += " (over the " + format_fixed(c.limit_s, 0) + " s limit)";
    }
    if (!o.ok) ++failures;
    std::cout << (o.ok ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.name << " - " << o.detail << " ("
              << format_fixed(secs, 3) << " s)\n";
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
            << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
