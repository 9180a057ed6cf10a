#ifndef OUTLOOK_DECOMPOSITION_HPP_
#define OUTLOOK_DECOMPOSITION_HPP_

#include "outlook/corpus.hpp"
#include "outlook/indicator.hpp"
#include "outlook/io.hpp"
#include "outlook/sentiment.hpp"
#include "outlook/text.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace outlook
{

inline constexpr const char* kOtherTopic = "Other";

/// Row i holds the topic weights of article_ids[i]; rows are non-negative and sum to 1.
struct TopicAssignments
{
  std::vector<std::string> topics;
  std::vector<std::uint64_t> article_ids;
  MatrixX<double> weights;

  std::size_t size() const { return article_ids.size(); }
  /// Throws unless shapes agree and every row is a probability vector within 1e-9.
  void validate() const;
};

struct KeywordTopic
{
  std::string name;
  std::vector<Term> terms;
};

/// One topic per line, `name = term, term, ...`; `#` starts a comment. A trailing `*` on a
/// term matches any continuation of its last word.
std::vector<KeywordTopic> parse_keyword_topics(std::string_view text);
std::vector<KeywordTopic> read_keyword_topics(const std::filesystem::path& path);

/// One-hot on the first topic (in list order) with a whole-word match in the article text,
/// else on the trailing "Other" topic.
TopicAssignments assign_keyword(std::span<const Article> articles, std::span<const KeywordTopic> topics);

inline constexpr double kCumulativeMass = 0.7;
inline constexpr std::size_t kMaxTopics = 3;

/// Topics in decreasing probability (ties by index) until the kept mass exceeds
/// `mass` or `cap` topics are kept; kept weights are rescaled to sum to 1.
VectorX<double> truncate_topic_probabilities(const VectorX<double>& p, double mass = kCumulativeMass,
                                             std::size_t cap = kMaxTopics);

TopicAssignments assign_classified(const TopicModel& model, const MatrixX<double>& X,
                                   const std::vector<std::uint64_t>& article_ids);

/// Seeded fit/transform dimensionality reduction.
class Reducer
{
 public:
  virtual ~Reducer() = default;
  virtual std::string kind() const = 0;
  virtual Eigen::Index input_dimension() const = 0;
  virtual Eigen::Index output_dimension() const = 0;
  virtual void fit(const MatrixX<double>& X, std::uint64_t seed) = 0;
  virtual MatrixX<double> transform(const MatrixX<double>& X) const = 0;
  virtual void save(BinaryWriter& w) const = 0;
};

/// Projection onto the leading principal axes of the fit data. Each axis is signed so that
/// its largest-magnitude coordinate is positive.
class PcaReducer : public Reducer
{
 public:
  explicit PcaReducer(Eigen::Index target_dimension = 10) : target_(target_dimension) {}

  std::string kind() const override { return "pca"; }
  Eigen::Index input_dimension() const override { return mean_.size(); }
  Eigen::Index output_dimension() const override { return target_; }
  void fit(const MatrixX<double>& X, std::uint64_t seed) override;
  MatrixX<double> transform(const MatrixX<double>& X) const override;
  void save(BinaryWriter& w) const override;
  static std::unique_ptr<PcaReducer> load(BinaryReader& r);

  const VectorX<double>& mean() const { return mean_; }
  const MatrixX<double>& components() const { return components_; }  // D x d

 private:
  Eigen::Index target_;
  VectorX<double> mean_;
  MatrixX<double> components_;
};

struct KMeansResult
{
  MatrixX<double> centroids;  // K x d
  std::vector<int> labels;
  int iterations = 0;
  bool converged = false;
  bool reseeded = false;
  std::vector<std::string> warnings;
};

inline constexpr int kKMeansMaxIterations = 300;

/// Lloyd iterations from k-means++ seeding until assignments are stable. Nearest centroid by
/// squared distance, ties to the lower index. A cluster left empty is re-seeded once at the
/// point farthest from its centroid; if one is still empty the result carries a warning.
KMeansResult kmeans(const MatrixX<double>& points, int k, std::uint64_t seed, int max_iterations = kKMeansMaxIterations);

/// Index of the nearest centroid row, ties to the lower index.
int nearest_centroid(const MatrixX<double>& centroids, const VectorX<double>& point);

struct ClusterModel
{
  std::shared_ptr<const Reducer> reducer;
  MatrixX<double> centroids;
  YearMonth fit_month;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;

  int k() const { return static_cast<int>(centroids.rows()); }
};

ClusterModel fit_clusters(const MatrixX<double>& fit_embeddings, int k, Eigen::Index reducer_dimension,
                          std::uint64_t seed, YearMonth fit_month);
TopicAssignments assign_clusters(const ClusterModel& model, const MatrixX<double>& X,
                                 const std::vector<std::uint64_t>& article_ids);

// "CLUS": u32 version, i32 fit year, u32 fit month, u64 seed, reducer kind (length-prefixed),
// reducer state, u32 K, u32 d, K x d f64 centroids (column-major).
// PCA state: u32 D, u32 d, D f64 mean, D x d f64 components (column-major).
void save_cluster_model(const ClusterModel& m, const std::filesystem::path& path);
ClusterModel load_cluster_model(const std::filesystem::path& path);

struct ContributionSeries
{
  std::vector<std::string> topics;
  std::vector<YearMonth> periods;
  MatrixX<double> values;  // periods x topics
  VectorX<double> totals;  // indicator value per period
  bool standardized = false;
};

/// c[t, j] = sum over articles i of month t of p[i, j] x[t, i] with x[t, i] = prob_i / N_t, or
/// (prob_i - mean) / (stdev N_t) under a standardization; row sums equal the (standardized)
/// monthly mean.
ContributionSeries contributions(const TopicAssignments& assignments, std::span<const ScoredArticle> scored,
                                 const std::optional<Standardization>& standardization = std::nullopt);

inline constexpr double kMinorTopicThreshold = 0.2;

/// Keeps topics whose |contribution| exceeds `threshold` in some period; sums the rest into
/// "Other". Row sums are unchanged.
ContributionSeries fold_minor_topics(const ContributionSeries& series, double threshold = kMinorTopicThreshold);

enum class RankingMode { most_positive, most_negative, highest_topic_prob, largest_abs_contribution };

RankingMode parse_ranking_mode(std::string_view s);

/// Articles of `period` with positive weight on `topic`, best first, ties by ascending id.
std::vector<std::uint64_t> top_articles(std::span<const ScoredArticle> scored, const TopicAssignments& assignments,
                                        std::string_view topic, YearMonth period, RankingMode mode, std::size_t k,
                                        const std::optional<Standardization>& standardization = std::nullopt);

/// Case-folded token counts without stopwords; by count descending, then term ascending.
std::vector<std::pair<std::string, std::size_t>> term_frequencies(std::span<const std::string> texts,
                                                                  const std::set<std::string>& stopwords,
                                                                  std::size_t top_n);
/// Per-language stopword sets; languages without an entry use no stopwords.
std::vector<std::pair<std::string, std::size_t>> term_frequencies(std::span<const Article> articles,
                                                                  const std::map<Language, std::set<std::string>>& stopwords,
                                                                  std::size_t top_n);

std::set<std::string> read_stopwords(const std::filesystem::path& path);

/// period,topic,contribution
void write_contributions_csv(const ContributionSeries& series, const std::filesystem::path& path);
/// article_id,topic,weight (non-zero weights only)
void write_assignments_csv(const TopicAssignments& assignments, const std::filesystem::path& path);

}  // namespace outlook

#endif  // OUTLOOK_DECOMPOSITION_HPP_
