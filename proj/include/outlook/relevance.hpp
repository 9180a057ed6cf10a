#ifndef OUTLOOK_RELEVANCE_HPP_
#define OUTLOOK_RELEVANCE_HPP_

#include "outlook/calendar.hpp"
#include "outlook/corpus.hpp"
#include "outlook/embedding.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace outlook
{

inline constexpr double kDefaultRelevanceThreshold = 0.80;

/// Section-derived labels; 1 = relevant.
struct RelevanceLabelSet
{
  std::vector<std::uint64_t> article_ids;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  std::size_t relevant() const;
  std::size_t irrelevant() const { return size() - relevant(); }
};

/// Relevant: section in the allowlist (case-insensitive). Irrelevant: section present and
/// not listed. Articles without a section are skipped. The larger class is subsampled to
/// the size of the smaller with a seeded draw; output is ordered by article id.
RelevanceLabelSet build_labels(std::span<const Article> articles, const std::set<std::string>& section_allowlist,
                               std::uint64_t seed);

struct TrainTestSplit
{
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified seeded split; indices ascending within each part.
TrainTestSplit split_labels(const std::vector<int>& labels, double test_fraction, std::uint64_t seed);

enum class RelevanceArchitecture { linear, mlp };

RelevanceArchitecture parse_architecture(std::string_view s);
std::string to_string(RelevanceArchitecture a);

struct RelevanceConfig
{
  RelevanceArchitecture architecture = RelevanceArchitecture::linear;
  int hidden_width = 64;
  double lambda = 1.0;
  double threshold = kDefaultRelevanceThreshold;
  double test_fraction = 1.0 / 3.0;
  int max_iterations = 500;
  double relative_tolerance = 1e-8;
  std::uint64_t seed = 0;
};

struct RelevanceModel
{
  RelevanceArchitecture architecture = RelevanceArchitecture::linear;
  double threshold = kDefaultRelevanceThreshold;
  // linear: weights (D) and bias. mlp: tanh hidden layer W1 (H x D), b1 (H), then output
  // weights (H) and bias.
  VectorX<double> weights;
  double bias = 0;
  MatrixX<double> hidden_weights;
  VectorX<double> hidden_bias;

  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::uint64_t seed = 0;
  double lambda = 0;
  int iterations = 0;
  bool converged = false;

  Eigen::Index dimension() const;
  VectorX<double> probabilities(const MatrixX<double>& X) const;
  double probability(const VectorX<double>& x) const;
  bool keeps(double prob) const { return prob >= threshold; }
};

struct ClassificationMetrics
{
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  double accuracy() const;
  std::optional<double> precision() const;  // undefined without positive predictions
  std::optional<double> recall() const;     // undefined without positive labels
};

ClassificationMetrics classify(const VectorX<double>& probs, const std::vector<int>& labels, double threshold);

struct RelevanceTraining
{
  RelevanceModel model;
  ClassificationMetrics holdout;
};

/// Rows of X align with labels. Throws unless both classes hold at least two examples.
RelevanceTraining train_relevance(const MatrixX<double>& X, const std::vector<int>& labels, const RelevanceConfig& config);

struct RelevanceOutput
{
  JoinedCorpus kept;
  std::vector<double> kept_probs;
  std::map<YearMonth, std::size_t> kept_per_month;
  std::size_t dropped = 0;
};

RelevanceOutput apply_relevance(const RelevanceModel& model, const JoinedCorpus& corpus);

// "RELV": u32 version, u32 D, f64 threshold, u8 architecture, u32 H, u64 seed, u64 train size,
// u64 test size, f64 lambda, then linear: D weights, bias; mlp: H x D W1 (column-major), H b1,
// H output weights, output bias.
void save_relevance_model(const RelevanceModel& m, const std::filesystem::path& path);
RelevanceModel load_relevance_model(const std::filesystem::path& path);

}  // namespace outlook

#endif  // OUTLOOK_RELEVANCE_HPP_
