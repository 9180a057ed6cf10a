#ifndef OUTLOOK_SENTIMENT_HPP_
#define OUTLOOK_SENTIMENT_HPP_

#include "outlook/embedding.hpp"
#include "outlook/indicator.hpp"
#include "outlook/logistic.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace outlook
{

using SentimentModel = LogisticModel<double>;
using TopicModel = MultinomialModel<double>;

/// Difference-of-centroids scorer: score(x) = x.(p - n), with p and n the mean positive and
/// negative anchor embeddings. For unit-norm anchors this equals the mean cosine to the
/// positives minus the mean cosine to the negatives.
class CosineScorer
{
 public:
  /// Rows of `anchors` must be unit-norm (within 1e-6); labels are 1 (positive) / 0.
  CosineScorer(const MatrixX<double>& anchors, const Eigen::VectorXi& labels);

  const VectorX<double>& positive_centroid() const { return p_; }
  const VectorX<double>& negative_centroid() const { return n_; }
  VectorX<double> direction() const { return p_ - n_; }

  /// With `strict`, throws unless ||v|| = 1 within 1e-6.
  double score(const VectorX<double>& v, bool strict = false) const;
  VectorX<double> scores(const MatrixX<double>& X) const;

 private:
  VectorX<double> p_;
  VectorX<double> n_;
};

struct EquivalenceReport
{
  std::size_t sample_size = 0;
  bool sufficient = false;  // false when correlations are undefined
  std::optional<double> pearson;
  std::optional<double> spearman;
  double direction_cosine = 0;  // cos angle(w, p - n)
};

EquivalenceReport equivalence_report(const SentimentModel& logistic, const CosineScorer& scorer, const MatrixX<double>& sample);

/// Probability per joined article.
std::vector<ScoredArticle> score_articles(const SentimentModel& model, const JoinedCorpus& corpus);

// Model blobs. "SENT": u32 version, u32 D, f64 lambda, f64 bias, D f64 weights.
// "MNOM": u32 version, u32 D, u32 T, f64 lambda, T length-prefixed class names, T f64 biases,
// then D x T f64 weights (column-major).
void save_sentiment_model(const SentimentModel& m, const std::filesystem::path& path);
SentimentModel load_sentiment_model(const std::filesystem::path& path);
void save_topic_model(const TopicModel& m, const std::filesystem::path& path);
TopicModel load_topic_model(const std::filesystem::path& path);

}  // namespace outlook

#endif  // OUTLOOK_SENTIMENT_HPP_
