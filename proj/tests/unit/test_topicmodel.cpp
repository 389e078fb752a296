#include <doctest.h>

#include <cmath>
#include <numeric>

#include "apptopics/topicmodel.hpp"
#include "support.hpp"

using namespace apptopics;

namespace {

// Model with hand-set averaged counts.
LdaModel hand_model(Words vocab, std::vector<std::vector<double>> topic_word, std::vector<std::vector<double>> doc_topic,
                    double alpha = 0.1, double beta = 0.01) {
  LdaModel m;
  m.config.n_topics = topic_word.size();
  m.config.alpha = alpha;
  m.config.beta = beta;
  m.vocab = Vocabulary::from_sorted(std::move(vocab));
  m.topic_word_mean = Matrix<double>(topic_word.size(), m.vocab.size());
  m.topic_word_counts = Matrix<std::int64_t>(topic_word.size(), m.vocab.size());
  for (std::size_t k = 0; k < topic_word.size(); ++k) {
    for (std::size_t w = 0; w < m.vocab.size(); ++w) {
      m.topic_word_mean(k, w) = topic_word[k][w];
      m.topic_word_counts(k, w) = static_cast<std::int64_t>(topic_word[k][w]);
    }
  }
  m.doc_topic_mean = Matrix<double>(doc_topic.size(), topic_word.size());
  m.doc_topic_counts = Matrix<std::int64_t>(doc_topic.size(), topic_word.size());
  for (std::size_t d = 0; d < doc_topic.size(); ++d) {
    m.doc_ids.push_back("doc" + std::to_string(d));
    m.doc_lengths.push_back(static_cast<std::size_t>(std::accumulate(doc_topic[d].begin(), doc_topic[d].end(), 0.0)));
    for (std::size_t k = 0; k < topic_word.size(); ++k) {
      m.doc_topic_mean(d, k) = doc_topic[d][k];
      m.doc_topic_counts(d, k) = static_cast<std::int64_t>(doc_topic[d][k]);
    }
  }
  m.recompute_distributions();
  return m;
}

LdaConfig quick_config(std::size_t k, std::uint64_t seed = 1) {
  LdaConfig c;
  c.n_topics = k;
  c.n_iterations = 60;
  c.burn_in = 40;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("counter RNG") {
  CounterRng a(42, 0), b(42, 0), c(42, 1);
  for (int i = 0; i < 100; ++i) {
    auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
  }
  CounterRng u(1, 2);
  for (int i = 0; i < 1000; ++i) {
    double v = u.uniform();
    CHECK((v >= 0.0 && v < 1.0));
    CHECK(u.below(7) < 7);
  }
  // First two outputs of the reference splitmix64 generator started at 0.
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(splitmix64(0x9E3779B97F4A7C15ULL) == 0x6E789E6AA1B965F4ULL);
}

TEST_CASE("vocabulary") {
  auto v = Vocabulary::build({{"b", "a"}});
  CHECK(*v.id("a") == 0);
  CHECK(*v.id("b") == 1);
  auto dup = Vocabulary::build({{"x", "y"}, {"y", "z"}});
  CHECK(dup.size() == 3);
  CHECK_FALSE(dup.id("w").has_value());
  CHECK_THROWS_AS(Vocabulary::build({}), Error);
  CHECK_THROWS_AS(Vocabulary::from_sorted({"b", "a"}), Error);
}

TEST_CASE("config validation") {
  LdaConfig c;
  CHECK(c.alpha_value() == doctest::Approx(5.0 / 31));
  CHECK_NOTHROW(c.validate());
  c.burn_in = c.n_iterations;
  CHECK_THROWS_AS(c.validate(), Error);
  c = LdaConfig{};
  c.beta = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = LdaConfig{};
  c.n_topics = 1;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("fit_gibbs basics") {
  auto docs = make_documents({{"only", {"apple", "pear", "apple", "plum"}}});
  auto m = fit_gibbs(docs, quick_config(2));
  CHECK(m.theta(0, 0) + m.theta(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t k = 0; k < 2; ++k) {
    auto row = m.phi.row(k);
    CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(fit_gibbs({}, quick_config(2)), Error);
  CHECK_THROWS_AS(fit_gibbs(make_documents({{"empty", {}}}), quick_config(2)), Error);
  CHECK(m.doc_index("only") == 0u);
  CHECK_FALSE(m.doc_index("other").has_value());
}

TEST_CASE("fit_gibbs is deterministic and exchange-symmetric") {
  std::vector<std::pair<std::string, Words>> raw = {
      {"a", {"sun", "rain", "cloud", "sun"}}, {"b", {"goal", "ball", "goal"}},
      {"c", {"rain", "cloud", "wind"}},       {"d", {"ball", "team", "goal", "team"}}};
  auto docs = make_documents(raw);
  auto m1 = fit_gibbs(docs, quick_config(2, 9));
  auto m2 = fit_gibbs(docs, quick_config(2, 9));
  CHECK(m1.phi == m2.phi);
  CHECK(m1.theta == m2.theta);

  // Reverse the documents together with their streams.
  std::vector<LdaDocument> reversed(docs.rbegin(), docs.rend());
  auto m3 = fit_gibbs(reversed, quick_config(2, 9));
  for (std::size_t d = 0; d < docs.size(); ++d) {
    auto r1 = m1.theta.row(d);
    auto r3 = m3.theta.row(docs.size() - 1 - d);
    CHECK(std::equal(r1.begin(), r1.end(), r3.begin()));
  }
  CHECK(m1.phi == m3.phi);

  auto other = fit_gibbs(docs, quick_config(2, 10));
  CHECK_FALSE(other.phi == m1.phi);
}

TEST_CASE("duplicate streams are rejected") {
  std::vector<LdaDocument> docs{{"a", {"x"}, 3}, {"b", {"y"}, 3}};
  CHECK_THROWS_AS(fit_gibbs(docs, quick_config(2)), Error);
}

TEST_CASE("sampler conserves counts") {
  auto docs = make_documents({{"a", {"x", "y", "x", "z"}}, {"b", {"y", "y", "z"}}});
  std::size_t checks = 0;
  fit_gibbs(docs, quick_config(3), [&](const GibbsSampler& s) {
    auto sum = [](const Matrix<std::int64_t>& m) { return std::accumulate(m.data().begin(), m.data().end(), std::int64_t{0}); };
    CHECK(sum(s.topic_word_counts()) == 7);
    CHECK(sum(s.doc_topic_counts()) == 7);
    CHECK(std::accumulate(s.topic_totals().begin(), s.topic_totals().end(), std::int64_t{0}) == 7);
    ++checks;
  });
  CHECK(checks == 61);
}

TEST_CASE("top_topics") {
  std::vector<double> london(31, 0.0);
  london[11] = 0.91274;
  london[2] = 0.06725;
  london[30] = 0.01379;
  double rest = (1.0 - 0.91274 - 0.06725 - 0.01379) / 28.0;
  for (std::size_t k = 0; k < 31; ++k) {
    if (k != 11 && k != 2 && k != 30) london[k] = rest;
  }
  auto t = top_topics(london);
  REQUIRE(t.size() == 3);
  CHECK(t[0].topic == 11);
  CHECK(t[1].topic == 2);
  CHECK(t[2].topic == 30);
  CHECK(t[0].percent == doctest::Approx(91.274));

  std::vector<double> uniform(31, 1.0 / 31);
  auto u = top_topics(uniform);
  REQUIRE(u.size() == 4);
  CHECK(u[0].topic == 0);
  CHECK(u[3].topic == 3);

  std::vector<double> one(5, 0.0);
  one[4] = 1.0;
  CHECK(top_topics(one) == std::vector<TopicShare>{{4, 100.0}});
}

TEST_CASE("top_words") {
  auto m = hand_model({"rain", "sun", "weather"}, {{1, 2, 50}, {10, 10, 0}}, {{40, 23}});
  auto w = top_words(m, 0, 2);
  REQUIRE(w.size() == 2);
  CHECK(w[0].first == "weather");
  CHECK(w[1].first == "sun");
  CHECK(top_words(m, 0, 0).empty());
  CHECK(top_words(m, 1, 10).size() == 3);
  // Equal probabilities keep vocabulary order.
  CHECK(top_words(m, 1, 2)[0].first == "rain");
  CHECK_THROWS_AS(top_words(m, 2, 1), Error);
}

TEST_CASE("corpus_log_likelihood") {
  // Tiny beta and alpha so that theta and phi put almost all mass on one cell.
  auto m = hand_model({"only"}, {{1}, {0}}, {{1, 0}}, 1e-12, 1e-12);
  auto docs = make_documents({{"doc0", {"only"}}});
  CHECK(corpus_log_likelihood(m, docs) == doctest::Approx(0.0).epsilon(1e-9));

  auto fitted = fit_gibbs(make_documents({{"a", {"x", "y"}}, {"b", {"y", "z"}}}), quick_config(2));
  CHECK(std::isfinite(corpus_log_likelihood(fitted, make_documents({{"a", {"x", "y"}}, {"b", {"y", "z"}}}))));
}

TEST_CASE("infer_theta") {
  auto m = hand_model({"ball", "rain"}, {{100, 0}, {0, 100}}, {{10, 0}, {0, 10}});
  std::size_t known = 99;
  auto unknown = infer_theta(m, {"nothing", "here"}, 0, 50, &known);
  CHECK(known == 0);
  for (double p : unknown) CHECK(p == doctest::Approx(0.5));

  auto sporty = infer_theta(m, {"ball", "ball", "ball", "ball", "ball"}, 1, 50, &known);
  CHECK(known == 5);
  CHECK(sporty[0] > 0.9);
  CHECK(sporty[0] + sporty[1] == doctest::Approx(1.0));
  CHECK(infer_theta(m, {"ball", "rain"}, 4, 50) == infer_theta(m, {"ball", "rain"}, 4, 50));
}

TEST_CASE("js_divergence and topic map") {
  std::vector<double> p{0.5, 0.5, 0.0, 0.0}, q{0.0, 0.0, 0.5, 0.5};
  CHECK(js_divergence(p, p) == doctest::Approx(0.0));
  CHECK(js_divergence(p, q) == doctest::Approx(1.0));
  std::vector<double> r{0.25, 0.25, 0.25, 0.25};
  CHECK(js_divergence(p, r) == doctest::Approx(js_divergence(r, p)));

  auto same = hand_model({"a", "b"}, {{5, 5}, {5, 5}, {0, 10}}, {{6, 4, 0}, {4, 6, 10}});
  auto map = emit_topic_map(same);
  REQUIRE(map.topics.size() == 3);
  CHECK(map.divergence(0, 1) == doctest::Approx(0.0));
  CHECK(map.topics[0].x == doctest::Approx(map.topics[1].x));
  CHECK(map.topics[0].y == doctest::Approx(map.topics[1].y));
  double total = 0.0;
  for (const auto& t : map.topics) total += t.prevalence;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  auto disjoint = hand_model({"a", "b"}, {{10, 0}, {0, 10}}, {{5, 5}}, 0.1, 1e-15);
  CHECK(emit_topic_map(disjoint).divergence(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("model persistence round trip") {
  auto docs = make_documents({{"a", {"x", "y", "x"}}, {"b", {"y", "z"}}});
  auto m = fit_gibbs(docs, quick_config(2, 5));
  auto text = serialize_model(m);
  auto back = parse_model(text);
  CHECK(serialize_model(back) == text);
  CHECK(back.phi == m.phi);
  CHECK(back.theta == m.theta);
  CHECK(back.doc_ids == m.doc_ids);
  CHECK(back.config.seed == 5);

  TempDir tmp("model");
  save_model(m, tmp.path / "m.lda");
  CHECK(load_model(tmp.path / "m.lda").theta == m.theta);
  CHECK_THROWS_AS(parse_model("not a model"), Error);
  CHECK_THROWS_AS(parse_model(text.substr(0, text.size() / 2)), Error);
}
