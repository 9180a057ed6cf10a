#ifndef OUTLOOK_PIPELINE_HPP_
#define OUTLOOK_PIPELINE_HPP_

#include "outlook/forecast.hpp"
#include "outlook/relevance.hpp"

#include <filesystem>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace outlook
{

/// Pipeline settings. Relative paths resolve against the directory of the config file.
struct PipelineConfig
{
  std::filesystem::path corpus, embeddings, anchors, anchor_embeddings, gdp, lexicon, topics, stopwords_de,
      stopwords_fr, output;
  std::string corpus_filter;

  std::set<std::string> sections;
  double relevance_threshold = kDefaultRelevanceThreshold;
  double relevance_lambda = 1.0;
  RelevanceArchitecture architecture = RelevanceArchitecture::linear;
  int hidden_width = 64;

  double sentiment_lambda = 1.0;

  std::string decompose_method = "keyword";  // keyword, classified, cluster
  int clusters = 8;
  int reducer_dim = 10;
  std::size_t top_terms = 20;

  ForecastConfig forecast;
  std::uint64_t seed = 0;

  /// INI file; each override is `section.key=value` and replaces the file's value.
  static PipelineConfig load(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
  /// Same keys as the INI file, from `section.key=value` entries only.
  static PipelineConfig from_entries(const std::vector<std::string>& entries, const std::filesystem::path& base_dir);
};

enum class Stage { ingest, filter, train, score, aggregate, decompose, evaluate };

Stage parse_stage(std::string_view s);
std::string to_string(Stage s);
/// Comma list or "all"; returned in pipeline order without duplicates.
std::vector<Stage> parse_stages(std::string_view s);

struct StageRecord
{
  Stage stage;
  std::map<std::string, std::string> inputs;   // path -> FNV-1a fingerprint
  std::map<std::string, std::string> outputs;
  double seconds = 0;
};

/// Runs the stages in order, writing artifacts and manifest.json into the output directory.
/// A stage whose inputs are missing throws, naming the stage to run first.
std::vector<StageRecord> run_pipeline(const PipelineConfig& config, const std::vector<Stage>& stages, std::ostream& log);

}  // namespace outlook

#endif  // OUTLOOK_PIPELINE_HPP_
