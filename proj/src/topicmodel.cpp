#include "apptopics/topicmodel.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include <Eigen/Dense>

namespace apptopics {

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary Vocabulary::build(const std::vector<Words>& documents) {
  if (documents.empty()) throw Error("cannot build a vocabulary from an empty corpus");
  std::set<std::string> all;
  for (const auto& doc : documents) all.insert(doc.begin(), doc.end());
  return from_sorted(Words(all.begin(), all.end()));
}

Vocabulary Vocabulary::from_sorted(Words tokens) {
  Vocabulary v;
  v.id_to_token_ = std::move(tokens);
  v.token_to_id_.reserve(v.id_to_token_.size());
  for (std::uint32_t i = 0; i < v.id_to_token_.size(); ++i) {
    if (i > 0 && !(v.id_to_token_[i - 1] < v.id_to_token_[i])) {
      throw Error("vocabulary tokens must be sorted and unique");
    }
    v.token_to_id_.emplace(v.id_to_token_[i], i);
  }
  return v;
}

std::optional<std::uint32_t> Vocabulary::id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  if (it == token_to_id_.end()) return std::nullopt;
  return it->second;
}

void LdaConfig::validate() const {
  if (n_topics < 2) throw Error("n_topics must be at least 2");
  if (n_topics > 65535) throw Error("n_topics must be at most 65535");
  if (!(alpha_value() > 0.0)) throw Error("alpha must be positive");
  if (!(beta > 0.0)) throw Error("beta must be positive");
  if (n_iterations == 0) throw Error("n_iterations must be positive");
  if (burn_in >= n_iterations) throw Error("burn_in must be smaller than n_iterations");
}

std::vector<LdaDocument> make_documents(std::vector<std::pair<std::string, Words>> docs) {
  std::vector<LdaDocument> out;
  out.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    out.push_back(LdaDocument{std::move(docs[i].first), std::move(docs[i].second), i});
  }
  return out;
}

std::optional<std::size_t> LdaModel::doc_index(std::string_view id) const {
  for (std::size_t d = 0; d < doc_ids.size(); ++d) {
    if (doc_ids[d] == id) return d;
  }
  return std::nullopt;
}

void LdaModel::recompute_distributions() {
  const std::size_t K = config.n_topics;
  const std::size_t V = vocab.size();
  const std::size_t D = doc_ids.size();
  const double alpha = config.alpha_value();
  const double beta = config.beta;

  phi = Matrix<double>(K, V);
  for (std::size_t k = 0; k < K; ++k) {
    auto row = topic_word_mean.row(k);
    double total = std::accumulate(row.begin(), row.end(), 0.0);
    double denom = total + static_cast<double>(V) * beta;
    for (std::size_t w = 0; w < V; ++w) phi(k, w) = (row[w] + beta) / denom;
  }
  theta = Matrix<double>(D, K);
  for (std::size_t d = 0; d < D; ++d) {
    auto row = doc_topic_mean.row(d);
    double total = std::accumulate(row.begin(), row.end(), 0.0);
    double denom = total + static_cast<double>(K) * alpha;
    for (std::size_t k = 0; k < K; ++k) theta(d, k) = (row[k] + alpha) / denom;
  }
}

// ---------------------------------------------------------------------------
// Sampler

GibbsSampler::GibbsSampler(std::vector<std::vector<std::uint32_t>> docs, std::vector<std::uint64_t> streams,
                           std::size_t vocab_size, const LdaConfig& config)
    : config_(config),
      vocab_size_(vocab_size),
      docs_(std::move(docs)),
      topic_word_(config.n_topics, vocab_size),
      doc_topic_(docs_.size(), config.n_topics),
      topic_totals_(config.n_topics, 0),
      weights_(config.n_topics, 0.0) {
  config_.validate();
  if (streams.size() != docs_.size()) throw Error("one random stream per document is required");
  order_.resize(docs_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return streams[a] < streams[b]; });
  for (std::size_t i = 1; i < order_.size(); ++i) {
    if (streams[order_[i]] == streams[order_[i - 1]]) throw Error("document random streams must be distinct");
  }
  rngs_.reserve(docs_.size());
  for (auto s : streams) rngs_.emplace_back(config_.seed, s);

  const std::size_t K = config_.n_topics;
  z_.resize(docs_.size());
  for (std::size_t d : order_) {
    auto& rng = rngs_[d];
    z_[d].resize(docs_[d].size());
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      auto w = docs_[d][i];
      if (w >= vocab_size_) throw Error("token id out of vocabulary range");
      auto k = static_cast<std::uint16_t>(rng.below(K));
      z_[d][i] = k;
      ++topic_word_(k, w);
      ++doc_topic_(d, k);
      ++topic_totals_[k];
      ++total_tokens_;
    }
  }
}

void GibbsSampler::sample_document(std::size_t d) {
  const std::size_t K = config_.n_topics;
  const double alpha = config_.alpha_value();
  const double beta = config_.beta;
  const double vbeta = static_cast<double>(vocab_size_) * beta;
  auto& rng = rngs_[d];
  auto& doc = docs_[d];
  auto& zd = z_[d];
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto w = doc[i];
    const std::size_t old = zd[i];
    --topic_word_(old, w);
    --doc_topic_(d, old);
    --topic_totals_[old];

    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      double p = (static_cast<double>(doc_topic_(d, k)) + alpha) *
                 (static_cast<double>(topic_word_(k, w)) + beta) /
                 (static_cast<double>(topic_totals_[k]) + vbeta);
      total += p;
      weights_[k] = total;
    }
    const double u = rng.uniform() * total;
    std::size_t k = 0;
    while (k + 1 < K && weights_[k] <= u) ++k;

    zd[i] = static_cast<std::uint16_t>(k);
    ++topic_word_(k, w);
    ++doc_topic_(d, k);
    ++topic_totals_[k];
  }
}

void GibbsSampler::sweep() {
  for (std::size_t d : order_) sample_document(d);
  ++sweeps_;
}

double GibbsSampler::log_likelihood() const {
  const std::size_t K = config_.n_topics;
  const double alpha = config_.alpha_value();
  const double beta = config_.beta;
  const double vbeta = static_cast<double>(vocab_size_) * beta;
  double ll = 0.0;
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    const double nd = static_cast<double>(docs_[d].size());
    for (auto w : docs_[d]) {
      double p = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        double th = (static_cast<double>(doc_topic_(d, k)) + alpha) / (nd + static_cast<double>(K) * alpha);
        double ph = (static_cast<double>(topic_word_(k, w)) + beta) / (static_cast<double>(topic_totals_[k]) + vbeta);
        p += th * ph;
      }
      ll += std::log(p);
    }
  }
  return ll;
}

LdaModel fit_gibbs(const std::vector<LdaDocument>& corpus, const LdaConfig& config, const SweepObserver& observer) {
  config.validate();
  if (corpus.empty()) throw Error("cannot fit a topic model on an empty corpus");
  std::vector<Words> token_lists;
  token_lists.reserve(corpus.size());
  for (const auto& doc : corpus) {
    if (doc.tokens.empty()) throw Error("document '" + doc.id + "' is empty");
    token_lists.push_back(doc.tokens);
  }

  LdaModel model;
  model.config = config;
  model.vocab = Vocabulary::build(token_lists);
  const std::size_t K = config.n_topics;
  const std::size_t V = model.vocab.size();
  const std::size_t D = corpus.size();
  if (V < K) {
    std::cerr << "warning: vocabulary size " << V << " is smaller than the topic count " << K << '\n';
  }

  std::vector<std::vector<std::uint32_t>> ids(D);
  std::vector<std::uint64_t> streams(D);
  for (std::size_t d = 0; d < D; ++d) {
    model.doc_ids.push_back(corpus[d].id);
    model.doc_lengths.push_back(corpus[d].tokens.size());
    streams[d] = corpus[d].stream;
    ids[d].reserve(corpus[d].tokens.size());
    for (const auto& t : corpus[d].tokens) ids[d].push_back(*model.vocab.id(t));
  }

  GibbsSampler sampler(std::move(ids), std::move(streams), V, config);
  if (observer) observer(sampler);

  Matrix<double> tw_sum(K, V), dt_sum(D, K);
  std::size_t samples = 0;
  for (std::size_t it = 1; it <= config.n_iterations; ++it) {
    sampler.sweep();
    if (observer) observer(sampler);
    if (it <= config.burn_in) continue;
    ++samples;
    const auto& tw = sampler.topic_word_counts().data();
    auto& tws = tw_sum.data();
    for (std::size_t i = 0; i < tw.size(); ++i) tws[i] += static_cast<double>(tw[i]);
    const auto& dt = sampler.doc_topic_counts().data();
    auto& dts = dt_sum.data();
    for (std::size_t i = 0; i < dt.size(); ++i) dts[i] += static_cast<double>(dt[i]);
  }
  const double inv = 1.0 / static_cast<double>(samples);
  for (auto& x : tw_sum.data()) x *= inv;
  for (auto& x : dt_sum.data()) x *= inv;

  model.topic_word_counts = sampler.topic_word_counts();
  model.doc_topic_counts = sampler.doc_topic_counts();
  model.topic_word_mean = std::move(tw_sum);
  model.doc_topic_mean = std::move(dt_sum);
  model.recompute_distributions();
  return model;
}

// ---------------------------------------------------------------------------
// Evaluation

std::vector<TopicShare> top_topics(std::span<const double> theta_row, double min_pct, std::size_t max_n) {
  std::vector<TopicShare> all;
  all.reserve(theta_row.size());
  for (std::size_t k = 0; k < theta_row.size(); ++k) all.push_back({k, theta_row[k] * 100.0});
  std::stable_sort(all.begin(), all.end(),
                   [](const TopicShare& a, const TopicShare& b) { return a.percent > b.percent; });
  if (all.size() > max_n) all.resize(max_n);
  std::erase_if(all, [&](const TopicShare& s) { return s.percent < min_pct; });
  return all;
}

std::vector<std::pair<std::string, double>> top_words(const LdaModel& model, std::size_t topic, std::size_t n) {
  if (topic >= model.n_topics()) throw Error("topic index out of range");
  const std::size_t V = model.vocab.size();
  std::vector<std::uint32_t> ids(V);
  std::iota(ids.begin(), ids.end(), 0u);
  n = std::min(n, V);
  auto row = model.phi.row(topic);
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(),
                    [&](std::uint32_t a, std::uint32_t b) { return row[a] != row[b] ? row[a] > row[b] : a < b; });
  std::vector<std::pair<std::string, double>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(model.vocab.token(ids[i]), row[ids[i]]);
  return out;
}

double corpus_log_likelihood(const LdaModel& model, const std::vector<LdaDocument>& corpus) {
  if (corpus.size() != model.theta.rows()) throw Error("corpus does not match the fitted model");
  const std::size_t K = model.n_topics();
  double ll = 0.0;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for (const auto& t : corpus[d].tokens) {
      auto w = model.vocab.id(t);
      if (!w) continue;
      double p = 0.0;
      for (std::size_t k = 0; k < K; ++k) p += model.theta(d, k) * model.phi(k, *w);
      ll += std::log(p);
    }
  }
  return ll;
}

std::vector<double> infer_theta(const LdaModel& model, const Words& tokens, std::uint64_t stream,
                                std::size_t iterations, std::size_t* known_tokens) {
  const std::size_t K = model.n_topics();
  const double alpha = model.config.alpha_value();
  std::vector<std::uint32_t> ids;
  for (const auto& t : tokens) {
    if (auto w = model.vocab.id(t)) ids.push_back(*w);
  }
  if (known_tokens) *known_tokens = ids.size();
  if (ids.empty()) return std::vector<double>(K, 1.0 / static_cast<double>(K));
  if (iterations == 0) iterations = 1;

  CounterRng rng(model.config.seed ^ 0x5DEECE66DULL, stream);
  std::vector<std::size_t> z(ids.size());
  std::vector<double> counts(K, 0.0), sum(K, 0.0), weights(K, 0.0);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    z[i] = rng.below(K);
    counts[z[i]] += 1.0;
  }
  const std::size_t burn = iterations / 2;
  std::size_t samples = 0;
  for (std::size_t it = 1; it <= iterations; ++it) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      counts[z[i]] -= 1.0;
      double total = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        total += (counts[k] + alpha) * model.phi(k, ids[i]);
        weights[k] = total;
      }
      double u = rng.uniform() * total;
      std::size_t k = 0;
      while (k + 1 < K && weights[k] <= u) ++k;
      z[i] = k;
      counts[k] += 1.0;
    }
    if (it > burn) {
      ++samples;
      for (std::size_t k = 0; k < K; ++k) sum[k] += counts[k];
    }
  }
  std::vector<double> theta(K);
  const double n = static_cast<double>(ids.size());
  for (std::size_t k = 0; k < K; ++k) {
    theta[k] = (sum[k] / static_cast<double>(samples) + alpha) / (n + static_cast<double>(K) * alpha);
  }
  return theta;
}

// ---------------------------------------------------------------------------
// Topic map

double js_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error("js_divergence: size mismatch");
  double js = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) js += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0.0) js += 0.5 * q[i] * std::log2(q[i] / m);
  }
  return std::clamp(js, 0.0, 1.0);
}

TopicMap emit_topic_map(const LdaModel& model) {
  const std::size_t K = model.n_topics();
  if (K < 2) throw Error("topic map needs at least 2 topics");
  TopicMap map;
  map.divergence = Matrix<double>(K, K);
  for (std::size_t a = 0; a < K; ++a) {
    for (std::size_t b = a + 1; b < K; ++b) {
      double js = js_divergence(model.phi.row(a), model.phi.row(b));
      map.divergence(a, b) = js;
      map.divergence(b, a) = js;
    }
  }

  // Prevalence: expected share of corpus tokens per topic.
  std::vector<double> prevalence(K, 0.0);
  double total_tokens = 0.0;
  for (std::size_t d = 0; d < model.theta.rows(); ++d) {
    double nd = static_cast<double>(model.doc_lengths[d]);
    total_tokens += nd;
    for (std::size_t k = 0; k < K; ++k) prevalence[k] += model.theta(d, k) * nd;
  }
  for (auto& p : prevalence) p = total_tokens > 0.0 ? p / total_tokens : 1.0 / static_cast<double>(K);

  // Classical MDS: double-centre the squared distances and keep the two
  // leading eigenvectors scaled by sqrt(eigenvalue).
  Eigen::MatrixXd d2(K, K);
  for (std::size_t a = 0; a < K; ++a) {
    for (std::size_t b = 0; b < K; ++b) {
      double v = map.divergence(a, b);
      d2(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v * v;
    }
  }
  Eigen::MatrixXd centre = Eigen::MatrixXd::Identity(K, K) - Eigen::MatrixXd::Constant(K, K, 1.0 / static_cast<double>(K));
  Eigen::MatrixXd gram = -0.5 * centre * d2 * centre;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  std::vector<std::vector<double>> coords(2, std::vector<double>(K, 0.0));
  for (int axis = 0; axis < 2; ++axis) {
    Eigen::Index col = static_cast<Eigen::Index>(K) - 1 - axis;
    if (col < 0) break;
    double lambda = std::max(values(col), 0.0);
    double scale = std::sqrt(lambda);
    // Fix the sign so the largest-magnitude component is positive.
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < static_cast<Eigen::Index>(K); ++i) {
      if (std::abs(vectors(i, col)) > std::abs(vectors(arg, col)) + 1e-12) arg = i;
    }
    double sign = vectors(arg, col) < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < K; ++k) {
      coords[static_cast<std::size_t>(axis)][k] = sign * vectors(static_cast<Eigen::Index>(k), col) * scale;
    }
  }
  for (std::size_t k = 0; k < K; ++k) map.topics.push_back({k, prevalence[k], coords[0][k], coords[1][k]});
  return map;
}

// ---------------------------------------------------------------------------
// Persistence
//
//   apptopics-lda 1
//   n_topics <K>  alpha <a>  beta <b>  n_iterations <n>  burn_in <n>  seed <s>   (one per line)
//   vocab <V>               followed by V token lines
//   docs <D>                followed by D lines: id \t length \t K counts \t K means
//   topic_words             followed by K lines: nnz then (word count mean) triples

std::string serialize_model(const LdaModel& model) {
  const std::size_t K = model.n_topics();
  std::ostringstream out;
  out << "apptopics-lda 1\n";
  out << "n_topics " << K << '\n';
  out << "alpha " << format_double(model.config.alpha_value()) << '\n';
  out << "beta " << format_double(model.config.beta) << '\n';
  out << "n_iterations " << model.config.n_iterations << '\n';
  out << "burn_in " << model.config.burn_in << '\n';
  out << "seed " << model.config.seed << '\n';
  out << "vocab " << model.vocab.size() << '\n';
  for (const auto& t : model.vocab.tokens()) out << t << '\n';
  out << "docs " << model.doc_ids.size() << '\n';
  for (std::size_t d = 0; d < model.doc_ids.size(); ++d) {
    out << model.doc_ids[d] << '\t' << model.doc_lengths[d] << '\t';
    for (std::size_t k = 0; k < K; ++k) out << (k ? " " : "") << model.doc_topic_counts(d, k);
    out << '\t';
    for (std::size_t k = 0; k < K; ++k) out << (k ? " " : "") << format_double(model.doc_topic_mean(d, k));
    out << '\n';
  }
  out << "topic_words\n";
  for (std::size_t k = 0; k < K; ++k) {
    std::vector<std::size_t> nz;
    for (std::size_t w = 0; w < model.vocab.size(); ++w) {
      if (model.topic_word_counts(k, w) != 0 || model.topic_word_mean(k, w) != 0.0) nz.push_back(w);
    }
    out << nz.size();
    for (auto w : nz) {
      out << ' ' << w << ' ' << model.topic_word_counts(k, w) << ' ' << format_double(model.topic_word_mean(k, w));
    }
    out << '\n';
  }
  return out.str();
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  std::string_view next() {
    if (pos_ > text_.size()) throw Error("model file truncated");
    auto nl = text_.find('\n', pos_);
    if (nl == std::string_view::npos) nl = text_.size();
    auto line = text_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    ++line_no_;
    return line;
  }

  std::string keyed(std::string_view key) {
    auto line = next();
    auto sp = line.find(' ');
    if (sp == std::string_view::npos || line.substr(0, sp) != key) {
      throw Error("model file line " + std::to_string(line_no_) + ": expected '" + std::string(key) + "'");
    }
    return std::string(line.substr(sp + 1));
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

template <typename T>
T parse_number(const std::string& s) {
  std::istringstream in(s);
  T v{};
  in >> v;
  if (in.fail() || !in.eof()) throw Error("model file: bad number '" + s + "'");
  return v;
}

double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw Error("model file: bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw Error("model file: bad number '" + s + "'");
  }
}

}  // namespace

LdaModel parse_model(std::string_view text) {
  LineReader in(text);
  if (in.next() != "apptopics-lda 1") throw Error("not an apptopics model file (version 1)");
  LdaModel model;
  model.config.n_topics = parse_number<std::size_t>(in.keyed("n_topics"));
  model.config.alpha = parse_double(in.keyed("alpha"));
  model.config.beta = parse_double(in.keyed("beta"));
  model.config.n_iterations = parse_number<std::size_t>(in.keyed("n_iterations"));
  model.config.burn_in = parse_number<std::size_t>(in.keyed("burn_in"));
  model.config.seed = parse_number<std::uint64_t>(in.keyed("seed"));
  model.config.validate();
  const std::size_t K = model.config.n_topics;

  const auto V = parse_number<std::size_t>(in.keyed("vocab"));
  Words tokens;
  tokens.reserve(V);
  for (std::size_t i = 0; i < V; ++i) tokens.emplace_back(in.next());
  model.vocab = Vocabulary::from_sorted(std::move(tokens));

  const auto D = parse_number<std::size_t>(in.keyed("docs"));
  model.doc_topic_counts = Matrix<std::int64_t>(D, K);
  model.doc_topic_mean = Matrix<double>(D, K);
  for (std::size_t d = 0; d < D; ++d) {
    auto fields = split_char(in.next(), '\t');
    if (fields.size() != 4) throw Error("model file: malformed document row");
    model.doc_ids.push_back(fields[0]);
    model.doc_lengths.push_back(parse_number<std::size_t>(fields[1]));
    auto counts = split_whitespace(fields[2]);
    auto means = split_whitespace(fields[3]);
    if (counts.size() != K || means.size() != K) throw Error("model file: document row has wrong topic count");
    for (std::size_t k = 0; k < K; ++k) {
      model.doc_topic_counts(d, k) = parse_number<std::int64_t>(counts[k]);
      model.doc_topic_mean(d, k) = parse_double(means[k]);
    }
  }

  if (in.next() != "topic_words") throw Error("model file: expected 'topic_words'");
  model.topic_word_counts = Matrix<std::int64_t>(K, V);
  model.topic_word_mean = Matrix<double>(K, V);
  for (std::size_t k = 0; k < K; ++k) {
    auto fields = split_whitespace(in.next());
    if (fields.empty()) throw Error("model file: missing topic row");
    auto nnz = parse_number<std::size_t>(fields[0]);
    if (fields.size() != 1 + 3 * nnz) throw Error("model file: malformed topic row");
    for (std::size_t i = 0; i < nnz; ++i) {
      auto w = parse_number<std::size_t>(fields[1 + 3 * i]);
      if (w >= V) throw Error("model file: word id out of range");
      model.topic_word_counts(k, w) = parse_number<std::int64_t>(fields[2 + 3 * i]);
      model.topic_word_mean(k, w) = parse_double(fields[3 + 3 * i]);
    }
  }
  model.recompute_distributions();
  return model;
}

void save_model(const LdaModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_model(model));
}

LdaModel load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

}  // namespace apptopics
