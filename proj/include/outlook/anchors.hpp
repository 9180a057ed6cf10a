#ifndef OUTLOOK_ANCHORS_HPP_
#define OUTLOOK_ANCHORS_HPP_

#include "outlook/embedding.hpp"
#include "outlook/indicator.hpp"
#include "outlook/sentiment.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace outlook
{

enum class Sector {
  general,
  financial_markets,
  labor_market,
  real_estate,
  international_trade,
  consumption,
  business_situation,
  macro_outlook
};

inline constexpr std::array<Sector, 8> kAllSectors{Sector::general,
                                                   Sector::financial_markets,
                                                   Sector::labor_market,
                                                   Sector::real_estate,
                                                   Sector::international_trade,
                                                   Sector::consumption,
                                                   Sector::business_situation,
                                                   Sector::macro_outlook};

Sector parse_sector(std::string_view s);
std::string to_string(Sector s);

/// Collections smaller than this per class trigger a warning.
inline constexpr std::size_t kStabilitySize = 32;

struct AnchorArticle
{
  std::uint64_t id = 0;
  int polarity = 0;  // 1 positive outlook
  Sector sector = Sector::general;
  std::string text;
};

/// One JSON object per line: {"id", "polarity", "sector", "text"}.
std::vector<AnchorArticle> read_anchor_records(const std::filesystem::path& path);
void write_anchor_records(const std::filesystem::path& path, std::span<const AnchorArticle> anchors);

struct AnchorCollection
{
  std::vector<AnchorArticle> anchors;
  MatrixX<double> embeddings;  // row k belongs to anchors[k]
  std::vector<std::string> warnings;

  std::size_t size() const { return anchors.size(); }
  std::size_t positives() const;
  std::size_t negatives() const { return size() - positives(); }
  Eigen::VectorXi labels() const;
  std::map<std::pair<int, Sector>, std::size_t> counts() const;
  AnchorCollection subset(const std::vector<std::size_t>& rows) const;
};

/// Every anchor must have an embedding in `store`.
AnchorCollection attach_embeddings(std::vector<AnchorArticle> anchors, const EmbeddingStore& store);
AnchorCollection load_anchors(const std::filesystem::path& path, const EmbeddingStore& store);

SentimentModel train_sentiment(const AnchorCollection& anchors, const LogisticOptions& options = {});

/// Multinomial sector model over anchors; class order follows kAllSectors, restricted to the
/// sectors present.
TopicModel train_sector_model(const AnchorCollection& anchors, const LogisticOptions& options = {});

/// Maps a trained sentiment model to a monthly indicator on a fixed reference corpus.
using IndicatorFunction = std::function<VectorX<double>(const SentimentModel&)>;

struct StabilityRow
{
  std::size_t size = 0;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  double correlation = 0;  // against the full-anchor indicator
};

struct StabilitySize
{
  std::size_t size = 0;
  double dispersion = 0;  // mean over months of the cross-repeat standard deviation
};

struct StabilityReport
{
  std::vector<StabilityRow> rows;
  std::vector<StabilitySize> sizes;
  VectorX<double> reference;
};

/// For each size s (per class), `repeats` seeded balanced subsamples of s positive and s
/// negative anchors; each retrains the sentiment model and recomputes the indicator.
StabilityReport stability_experiment(const AnchorCollection& anchors, const IndicatorFunction& indicator,
                                     const std::vector<std::size_t>& sizes, std::size_t repeats, std::uint64_t seed,
                                     const LogisticOptions& options = {});

/// size,repeat,seed,correlation,dispersion
void write_stability_csv(const StabilityReport& report, const std::filesystem::path& path);

/// Top-k and bottom-k scored articles of `year` as positive and negative anchors (sector
/// general). Ties go to the lower article id on both sides. Embeddings come from `corpus`.
AnchorCollection anchors_from_extremes(std::span<const ScoredArticle> scored, const JoinedCorpus& corpus, int year,
                                       std::size_t k_per_side = 128);

}  // namespace outlook

#endif  // OUTLOOK_ANCHORS_HPP_
