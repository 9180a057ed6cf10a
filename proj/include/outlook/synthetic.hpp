#ifndef OUTLOOK_SYNTHETIC_HPP_
#define OUTLOOK_SYNTHETIC_HPP_

#include "outlook/anchors.hpp"
#include "outlook/corpus.hpp"
#include "outlook/embedding.hpp"
#include "outlook/forecast.hpp"

#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace outlook
{

// Deterministic synthetic news world: a latent monthly outlook drives the share of positive
// words in economic articles; embeddings come from the hash-based pseudo-embedder.

struct SyntheticOptions
{
  std::size_t articles = 500;
  YearMonth start{2010, 1};
  int months = 12;
  Eigen::Index dimension = 64;
  std::uint64_t seed = 42;
  double irrelevant_share = 0.2;
  double french_share = 0.15;
  double missing_section_share = 0.1;
  double section_noise = 0.05;  // economic article filed under a non-economic section, and vice versa
  std::size_t anchors_per_sector_class = 16;
};

struct SyntheticWorld
{
  SyntheticOptions options;
  std::vector<Article> articles;
  EmbeddingStore embeddings;
  std::vector<AnchorArticle> anchors;
  EmbeddingStore anchor_embeddings;
  GdpSeries gdp;
  std::vector<double> outlook;            // latent value per month
  std::vector<int> economic;              // ground truth per article
  std::vector<Sector> sectors;            // main sector per article (general for non-economic)
  std::vector<double> article_polarity;   // share of positive sentiment words drawn

  JoinedCorpus joined() const;
  JoinedCorpus joined_economic() const;
};

SyntheticWorld make_synthetic_world(const SyntheticOptions& options = {});

std::set<std::string> synthetic_economic_sections();
const std::vector<std::string>& synthetic_positive_words();
const std::vector<std::string>& synthetic_negative_words();
const std::vector<std::string>& synthetic_stopwords(Language language);

/// Demonstration lexicon (term<TAB>polarity) and keyword topics in the library formats.
std::string synthetic_lexicon_text();
std::string synthetic_topics_text();

/// Writes corpus.jsonl, embeddings.emb, anchors.jsonl, anchor_embeddings.emb, gdp.csv,
/// lexicon_de.tsv, topics.txt, stopwords_de.txt, stopwords_fr.txt and config.ini.
void write_synthetic_fixture(const SyntheticWorld& world, const std::filesystem::path& dir);

}  // namespace outlook

#endif  // OUTLOOK_SYNTHETIC_HPP_
