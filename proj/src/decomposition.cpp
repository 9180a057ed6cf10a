#include "outlook/decomposition.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace outlook
{

void TopicAssignments::validate() const
{
  if (weights.rows() != static_cast<Eigen::Index>(article_ids.size()) ||
      weights.cols() != static_cast<Eigen::Index>(topics.size()))
    throw DimensionError("topic assignments: shape mismatch");
  for (Eigen::Index i = 0; i < weights.rows(); ++i) {
    if ((weights.row(i).array() < 0).any()) throw Error("negative topic weight for article " + std::to_string(article_ids[static_cast<std::size_t>(i)]));
    if (std::abs(weights.row(i).sum() - 1.0) > 1e-9)
      throw Error("topic weights of article " + std::to_string(article_ids[static_cast<std::size_t>(i)]) + " do not sum to 1");
  }
}

std::vector<KeywordTopic> parse_keyword_topics(std::string_view text)
{
  std::vector<KeywordTopic> out;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("topic line " + std::to_string(line_no) + ": expected 'name = terms'");
    KeywordTopic t;
    t.name = trim(line.substr(0, eq));
    if (t.name.empty()) throw Error("topic line " + std::to_string(line_no) + ": empty topic name");
    if (t.name == kOtherTopic) throw Error("topic name 'Other' is reserved");
    for (const auto& item : split(line.substr(eq + 1), ',')) {
      Term term = Term::parse(trim(item));
      if (!term.tokens.empty()) t.terms.push_back(std::move(term));
    }
    if (t.terms.empty()) throw Error("topic '" + t.name + "' has no keywords");
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<KeywordTopic> read_keyword_topics(const std::filesystem::path& path)
{
  return parse_keyword_topics(read_text(path));
}

TopicAssignments assign_keyword(std::span<const Article> articles, std::span<const KeywordTopic> topics)
{
  TopicAssignments out;
  for (const auto& t : topics) {
    if (t.terms.empty()) throw Error("topic '" + t.name + "' has no keywords");
    out.topics.push_back(t.name);
  }
  out.topics.emplace_back(kOtherTopic);
  const auto T = static_cast<Eigen::Index>(out.topics.size());
  out.weights = MatrixX<double>::Zero(static_cast<Eigen::Index>(articles.size()), T);
  for (std::size_t i = 0; i < articles.size(); ++i) {
    const auto tokens = tokenize(articles[i].text());
    Eigen::Index hit = T - 1;
    for (std::size_t j = 0; j < topics.size() && hit == T - 1; ++j)
      for (const auto& term : topics[j].terms)
        if (contains(tokens, term)) {
          hit = static_cast<Eigen::Index>(j);
          break;
        }
    out.weights(static_cast<Eigen::Index>(i), hit) = 1.0;
    out.article_ids.push_back(articles[i].id);
  }
  return out;
}

VectorX<double> truncate_topic_probabilities(const VectorX<double>& p, double mass, std::size_t cap)
{
  if (p.size() == 0) throw Error("empty probability vector");
  if (cap == 0) throw Error("topic cap must be positive");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(p.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return p(a) > p(b); });
  VectorX<double> out = VectorX<double>::Zero(p.size());
  double kept = 0;
  for (std::size_t k = 0; k < order.size() && k < cap; ++k) {
    out(order[k]) = p(order[k]);
    kept += p(order[k]);
    if (kept > mass) break;
  }
  if (!(kept > 0)) throw Error("probability vector has no mass");
  return out / kept;
}

TopicAssignments assign_classified(const TopicModel& model, const MatrixX<double>& X,
                                   const std::vector<std::uint64_t>& article_ids)
{
  if (static_cast<std::size_t>(X.rows()) != article_ids.size()) throw DimensionError("assign_classified: ids/rows mismatch");
  TopicAssignments out;
  out.topics = model.classes;
  out.article_ids = article_ids;
  const MatrixX<double> P = model.probabilities_rows(X);
  out.weights.resize(P.rows(), P.cols());
  for (Eigen::Index i = 0; i < P.rows(); ++i) out.weights.row(i) = truncate_topic_probabilities(P.row(i).transpose()).transpose();
  return out;
}

void PcaReducer::fit(const MatrixX<double>& X, std::uint64_t)
{
  if (X.rows() == 0) throw Error("reducer fit on empty data");
  if (target_ < 1 || target_ > X.cols())
    throw Error("reducer target dimension " + std::to_string(target_) + " outside 1.." + std::to_string(X.cols()));
  mean_ = X.colwise().mean().transpose();
  const MatrixX<double> Xc = X.rowwise() - mean_.transpose();
  const MatrixX<double> C = (Xc.transpose() * Xc) / static_cast<double>(std::max<Eigen::Index>(X.rows() - 1, 1));
  Eigen::SelfAdjointEigenSolver<MatrixX<double>> eig(C);
  if (eig.info() != Eigen::Success) throw Error("eigendecomposition failed");
  const Eigen::Index D = X.cols();
  components_.resize(D, target_);
  for (Eigen::Index k = 0; k < target_; ++k) {
    VectorX<double> v = eig.eigenvectors().col(D - 1 - k);
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    components_.col(k) = v;
  }
}

MatrixX<double> PcaReducer::transform(const MatrixX<double>& X) const
{
  if (X.cols() != mean_.size())
    throw DimensionError("reducer dimension " + std::to_string(mean_.size()) + " vs input " + std::to_string(X.cols()));
  return (X.rowwise() - mean_.transpose()) * components_;
}

void PcaReducer::save(BinaryWriter& w) const
{
  w.u32(static_cast<std::uint32_t>(mean_.size()));
  w.u32(static_cast<std::uint32_t>(target_));
  w.f64s(mean_);
  w.f64s(components_);
}

std::unique_ptr<PcaReducer> PcaReducer::load(BinaryReader& r)
{
  const std::size_t at = r.offset();
  const std::uint32_t D = r.u32();
  const std::uint32_t d = r.u32();
  if (D == 0 || d == 0 || d > D) throw FormatError("invalid PCA shape", at);
  auto p = std::make_unique<PcaReducer>(d);
  p->mean_.resize(D);
  r.f64s(p->mean_);
  p->components_.resize(D, d);
  r.f64s(p->components_);
  return p;
}

int nearest_centroid(const MatrixX<double>& centroids, const VectorX<double>& point)
{
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double d = (centroids.row(c).transpose() - point).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

namespace
{

MatrixX<double> kmeanspp_init(const MatrixX<double>& X, int k, Rng& rng)
{
  const Eigen::Index n = X.rows();
  MatrixX<double> C(k, X.cols());
  C.row(0) = X.row(static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::size_t>(n))));
  VectorX<double> d2 = (X.rowwise() - C.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0) {
      const double target = uniform_real(rng) * total;
      double acc = 0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc > target && d2(i) > 0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::size_t>(n)));
    }
    C.row(c) = X.row(pick);
    d2 = d2.cwiseMin((X.rowwise() - C.row(c)).rowwise().squaredNorm());
  }
  return C;
}

void lloyd(const MatrixX<double>& X, KMeansResult& r, int max_iterations)
{
  const Eigen::Index n = X.rows();
  const int k = static_cast<int>(r.centroids.rows());
  r.labels.assign(static_cast<std::size_t>(n), -1);
  r.converged = false;
  for (int it = 1; it <= max_iterations; ++it) {
    r.iterations = it;
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = nearest_centroid(r.centroids, X.row(i).transpose());
      if (c != r.labels[static_cast<std::size_t>(i)]) {
        r.labels[static_cast<std::size_t>(i)] = c;
        changed = true;
      }
    }
    if (!changed) {
      r.converged = true;
      return;
    }
    MatrixX<double> sums = MatrixX<double>::Zero(k, X.cols());
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(r.labels[static_cast<std::size_t>(i)]) += X.row(i);
      ++counts[static_cast<std::size_t>(r.labels[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0) r.centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
  }
}

std::vector<int> empty_clusters(const KMeansResult& r)
{
  std::vector<int> counts(static_cast<std::size_t>(r.centroids.rows()), 0);
  for (int l : r.labels) ++counts[static_cast<std::size_t>(l)];
  std::vector<int> empty;
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] == 0) empty.push_back(static_cast<int>(c));
  return empty;
}

}  // namespace

KMeansResult kmeans(const MatrixX<double>& points, int k, std::uint64_t seed, int max_iterations)
{
  if (k < 1) throw Error("K must be at least 1");
  if (k > points.rows())
    throw Error("K = " + std::to_string(k) + " exceeds the " + std::to_string(points.rows()) + " points to cluster");
  if (!points.allFinite()) throw Error("non-finite point");
  Rng rng(mix_seed(seed, 0xc105));
  KMeansResult r;
  r.centroids = kmeanspp_init(points, k, rng);
  lloyd(points, r, max_iterations);

  auto empty = empty_clusters(r);
  if (!empty.empty()) {
    r.reseeded = true;
    std::vector<bool> used(static_cast<std::size_t>(points.rows()), false);
    for (int c : empty) {
      Eigen::Index far = -1;
      double far_d = -1;
      for (Eigen::Index i = 0; i < points.rows(); ++i) {
        if (used[static_cast<std::size_t>(i)]) continue;
        const double d = (points.row(i) - r.centroids.row(r.labels[static_cast<std::size_t>(i)])).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      used[static_cast<std::size_t>(far)] = true;
      r.centroids.row(c) = points.row(far);
    }
    lloyd(points, r, max_iterations);
    empty = empty_clusters(r);
    if (!empty.empty())
      r.warnings.push_back(std::to_string(empty.size()) + " cluster(s) empty after re-seeding");
  }
  if (!r.converged) r.warnings.push_back("k-means stopped at the iteration cap of " + std::to_string(max_iterations));
  return r;
}

ClusterModel fit_clusters(const MatrixX<double>& fit_embeddings, int k, Eigen::Index reducer_dimension,
                          std::uint64_t seed, YearMonth fit_month)
{
  if (k < 1) throw Error("K must be at least 1");
  if (k > fit_embeddings.rows())
    throw Error("K = " + std::to_string(k) + " exceeds the " + std::to_string(fit_embeddings.rows()) +
                " articles of the fit month");
  auto reducer = std::make_shared<PcaReducer>(reducer_dimension);
  reducer->fit(fit_embeddings, seed);
  const KMeansResult km = kmeans(reducer->transform(fit_embeddings), k, seed);
  ClusterModel m;
  m.reducer = reducer;
  m.centroids = km.centroids;
  m.fit_month = fit_month;
  m.seed = seed;
  m.warnings = km.warnings;
  return m;
}

TopicAssignments assign_clusters(const ClusterModel& model, const MatrixX<double>& X,
                                 const std::vector<std::uint64_t>& article_ids)
{
  if (static_cast<std::size_t>(X.rows()) != article_ids.size()) throw DimensionError("assign_clusters: ids/rows mismatch");
  TopicAssignments out;
  for (int c = 0; c < model.k(); ++c) out.topics.push_back("cluster_" + std::to_string(c));
  out.article_ids = article_ids;
  out.weights = MatrixX<double>::Zero(X.rows(), model.k());
  if (X.rows() == 0) return out;
  const MatrixX<double> Z = model.reducer->transform(X);
  for (Eigen::Index i = 0; i < Z.rows(); ++i) out.weights(i, nearest_centroid(model.centroids, Z.row(i).transpose())) = 1.0;
  return out;
}

namespace
{
constexpr std::uint32_t kClusVersion = 1;
}

void save_cluster_model(const ClusterModel& m, const std::filesystem::path& path)
{
  BinaryWriter w;
  w.magic("CLUS");
  w.u32(kClusVersion);
  w.i32(m.fit_month.year);
  w.u32(m.fit_month.month);
  w.u64(m.seed);
  w.str(m.reducer->kind());
  m.reducer->save(w);
  w.u32(static_cast<std::uint32_t>(m.centroids.rows()));
  w.u32(static_cast<std::uint32_t>(m.centroids.cols()));
  w.f64s(m.centroids);
  w.save(path);
}

ClusterModel load_cluster_model(const std::filesystem::path& path)
{
  auto r = BinaryReader::open(path);
  r.expect_magic("CLUS");
  if (const auto v = r.u32(); v != kClusVersion) throw FormatError("unsupported CLUS version " + std::to_string(v), 4);
  ClusterModel m;
  m.fit_month.year = r.i32();
  m.fit_month.month = r.u32();
  m.seed = r.u64();
  const std::size_t kind_at = r.offset();
  const std::string kind = r.str();
  if (kind != "pca") throw FormatError("unknown reducer kind '" + kind + "'", kind_at);
  std::shared_ptr<const Reducer> reducer = PcaReducer::load(r);
  const std::size_t shape_at = r.offset();
  const std::uint32_t k = r.u32();
  const std::uint32_t d = r.u32();
  if (k == 0 || static_cast<Eigen::Index>(d) != reducer->output_dimension()) throw FormatError("invalid centroid shape", shape_at);
  m.centroids.resize(k, d);
  r.f64s(m.centroids);
  r.expect_end();
  if (!m.centroids.allFinite()) throw FormatError("non-finite centroid", shape_at);
  m.reducer = std::move(reducer);
  return m;
}

namespace
{

struct MonthGroup
{
  std::vector<std::size_t> members;  // indices into scored
};

std::map<YearMonth, MonthGroup> group_by_month(std::span<const ScoredArticle> scored)
{
  std::map<YearMonth, MonthGroup> g;
  for (std::size_t i = 0; i < scored.size(); ++i) g[YearMonth::of(scored[i].date)].members.push_back(i);
  return g;
}

std::unordered_map<std::uint64_t, Eigen::Index> row_index(const TopicAssignments& a)
{
  std::unordered_map<std::uint64_t, Eigen::Index> m;
  for (std::size_t i = 0; i < a.article_ids.size(); ++i) m.emplace(a.article_ids[i], static_cast<Eigen::Index>(i));
  return m;
}

double article_share(double prob, std::size_t n, const std::optional<Standardization>& s)
{
  const auto nt = static_cast<double>(n);
  return s ? (prob - s->mean) / (s->stdev * nt) : prob / nt;
}

}  // namespace

ContributionSeries contributions(const TopicAssignments& assignments, std::span<const ScoredArticle> scored,
                                 const std::optional<Standardization>& standardization)
{
  if (standardization && !(standardization->stdev > 0)) throw Error("standardization stdev must be positive");
  const auto rows = row_index(assignments);
  const auto groups = group_by_month(scored);
  ContributionSeries out;
  out.topics = assignments.topics;
  out.standardized = standardization.has_value();
  const auto T = static_cast<Eigen::Index>(assignments.topics.size());
  out.values = MatrixX<double>::Zero(static_cast<Eigen::Index>(groups.size()), T);
  out.totals.resize(static_cast<Eigen::Index>(groups.size()));
  Eigen::Index t = 0;
  for (const auto& [month, group] : groups) {
    out.periods.push_back(month);
    const std::size_t n = group.members.size();
    std::vector<double> probs;
    for (auto i : group.members) {
      const auto it = rows.find(scored[i].article_id);
      if (it == rows.end()) throw Error("article " + std::to_string(scored[i].article_id) + " has no topic assignment");
      const double x = article_share(scored[i].prob, n, standardization);
      out.values.row(t) += x * assignments.weights.row(it->second);
      probs.push_back(scored[i].prob);
    }
    const double mean = order_free_mean(std::move(probs));
    out.totals(t) = standardization ? (mean - standardization->mean) / standardization->stdev : mean;
    ++t;
  }
  return out;
}

ContributionSeries fold_minor_topics(const ContributionSeries& series, double threshold)
{
  ContributionSeries out;
  out.periods = series.periods;
  out.totals = series.totals;
  out.standardized = series.standardized;
  std::vector<Eigen::Index> kept;
  VectorX<double> other = VectorX<double>::Zero(static_cast<Eigen::Index>(series.periods.size()));
  bool any_other = false;
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(series.topics.size()); ++j) {
    const bool is_other = series.topics[static_cast<std::size_t>(j)] == kOtherTopic;
    const bool major = series.values.rows() > 0 && series.values.col(j).cwiseAbs().maxCoeff() > threshold;
    if (major && !is_other) {
      kept.push_back(j);
    } else {
      other += series.values.col(j);
      any_other = true;
    }
  }
  out.values.resize(series.values.rows(), static_cast<Eigen::Index>(kept.size()) + (any_other ? 1 : 0));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    out.topics.push_back(series.topics[static_cast<std::size_t>(kept[k])]);
    out.values.col(static_cast<Eigen::Index>(k)) = series.values.col(kept[k]);
  }
  if (any_other) {
    out.topics.emplace_back(kOtherTopic);
    out.values.col(out.values.cols() - 1) = other;
  }
  return out;
}

RankingMode parse_ranking_mode(std::string_view s)
{
  if (s == "most_positive") return RankingMode::most_positive;
  if (s == "most_negative") return RankingMode::most_negative;
  if (s == "highest_topic_prob") return RankingMode::highest_topic_prob;
  if (s == "largest_abs_contribution") return RankingMode::largest_abs_contribution;
  throw Error("unknown ranking mode '" + std::string(s) + "'");
}

std::vector<std::uint64_t> top_articles(std::span<const ScoredArticle> scored, const TopicAssignments& assignments,
                                        std::string_view topic, YearMonth period, RankingMode mode, std::size_t k,
                                        const std::optional<Standardization>& standardization)
{
  const auto topic_it = std::find(assignments.topics.begin(), assignments.topics.end(), topic);
  if (topic_it == assignments.topics.end()) throw Error("unknown topic '" + std::string(topic) + "'");
  const auto j = static_cast<Eigen::Index>(topic_it - assignments.topics.begin());
  const auto rows = row_index(assignments);

  std::size_t n_month = 0;
  for (const auto& s : scored)
    if (YearMonth::of(s.date) == period) ++n_month;

  std::vector<std::pair<double, std::uint64_t>> ranked;  // key: larger is better
  for (const auto& s : scored) {
    if (YearMonth::of(s.date) != period) continue;
    const auto it = rows.find(s.article_id);
    if (it == rows.end()) throw Error("article " + std::to_string(s.article_id) + " has no topic assignment");
    const double w = assignments.weights(it->second, j);
    if (!(w > 0)) continue;
    double key = 0;
    switch (mode) {
      case RankingMode::most_positive: key = s.prob; break;
      case RankingMode::most_negative: key = -s.prob; break;
      case RankingMode::highest_topic_prob: key = w; break;
      case RankingMode::largest_abs_contribution: key = std::abs(w * article_share(s.prob, n_month, standardization)); break;
    }
    ranked.emplace_back(key, s.article_id);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::uint64_t> out;
  for (std::size_t r = 0; r < ranked.size() && r < k; ++r) out.push_back(ranked[r].second);
  return out;
}

namespace
{

std::vector<std::pair<std::string, std::size_t>> rank_counts(const std::map<std::string, std::size_t>& counts,
                                                             std::size_t top_n)
{
  std::vector<std::pair<std::string, std::size_t>> v(counts.begin(), counts.end());
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (v.size() > top_n) v.resize(top_n);
  return v;
}

}  // namespace

std::vector<std::pair<std::string, std::size_t>> term_frequencies(std::span<const std::string> texts,
                                                                  const std::set<std::string>& stopwords,
                                                                  std::size_t top_n)
{
  std::set<std::string> stop;
  for (const auto& s : stopwords) stop.insert(fold_case(s));
  std::map<std::string, std::size_t> counts;
  for (const auto& t : texts)
    for (auto& tok : tokenize(t))
      if (!stop.count(tok)) ++counts[tok];
  return rank_counts(counts, top_n);
}

std::vector<std::pair<std::string, std::size_t>> term_frequencies(std::span<const Article> articles,
                                                                  const std::map<Language, std::set<std::string>>& stopwords,
                                                                  std::size_t top_n)
{
  std::map<Language, std::set<std::string>> stop;
  for (const auto& [lang, words] : stopwords)
    for (const auto& w : words) stop[lang].insert(fold_case(w));
  std::map<std::string, std::size_t> counts;
  for (const auto& a : articles) {
    const auto it = stop.find(a.language);
    for (auto& tok : tokenize(a.text()))
      if (it == stop.end() || !it->second.count(tok)) ++counts[tok];
  }
  return rank_counts(counts, top_n);
}

std::set<std::string> read_stopwords(const std::filesystem::path& path)
{
  std::set<std::string> out;
  for (const auto& line : split(read_text(path), '\n')) {
    const auto body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    std::istringstream words(body);
    for (std::string w; words >> w;) out.insert(fold_case(w));
  }
  return out;
}

void write_contributions_csv(const ContributionSeries& series, const std::filesystem::path& path)
{
  std::string out = "period,topic,contribution\n";
  for (std::size_t t = 0; t < series.periods.size(); ++t)
    for (std::size_t j = 0; j < series.topics.size(); ++j)
      out += format_year_month(series.periods[t]) + "," + csv_escape(series.topics[j]) + "," +
             format_double(series.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j))) + "\n";
  write_text(path, out);
}

void write_assignments_csv(const TopicAssignments& assignments, const std::filesystem::path& path)
{
  std::string out = "article_id,topic,weight\n";
  for (std::size_t i = 0; i < assignments.size(); ++i)
    for (std::size_t j = 0; j < assignments.topics.size(); ++j) {
      const double w = assignments.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (w != 0)
        out += std::to_string(assignments.article_ids[i]) + "," + csv_escape(assignments.topics[j]) + "," + format_double(w) + "\n";
    }
  write_text(path, out);
}

}  // namespace outlook
