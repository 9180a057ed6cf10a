#include "outlook/pipeline.hpp"

#include "outlook/anchors.hpp"
#include "outlook/corpus.hpp"
#include "outlook/decomposition.hpp"
#include "outlook/embedding.hpp"
#include "outlook/indicator.hpp"
#include "outlook/io.hpp"
#include "outlook/lexicon.hpp"
#include "outlook/sentiment.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <chrono>
#include <unordered_set>

namespace outlook
{

namespace pt = boost::property_tree;

namespace
{

void apply_override(pt::ptree& tree, const std::string& entry)
{
  const auto eq = entry.find('=');
  if (eq == std::string::npos) throw Error("override '" + entry + "' is not section.key=value");
  const std::string key = trim(entry.substr(0, eq));
  if (key.find('.') == std::string::npos) throw Error("override key '" + key + "' needs a section, as in relevance.threshold");
  tree.put(pt::ptree::path_type(key, '.'), trim(entry.substr(eq + 1)));
}

std::vector<int> parse_int_list(const std::string& s)
{
  std::vector<int> out;
  for (const auto& v : split(s, ',')) {
    const auto t = trim(v);
    if (!t.empty()) out.push_back(static_cast<int>(std::stol(t)));
  }
  return out;
}

const std::set<std::string> kKnownKeys{
    "paths.corpus",         "paths.embeddings",        "paths.anchors",          "paths.anchor_embeddings",
    "paths.gdp",            "paths.lexicon",           "paths.topics",           "paths.stopwords_de",
    "paths.stopwords_fr",   "paths.output",            "corpus.filter",          "relevance.sections",
    "relevance.threshold",  "relevance.lambda",        "relevance.architecture", "relevance.hidden_width",
    "sentiment.lambda",     "decompose.method",        "decompose.clusters",     "decompose.reducer_dim",
    "decompose.top_terms",  "forecast.month",          "forecast.horizons",      "forecast.initial_window",
    "forecast.hac_lag",     "forecast.small_sample",   "seeds.seed"};

PipelineConfig from_tree(const pt::ptree& tree, const std::filesystem::path& base)
{
  for (const auto& [section, body] : tree)
    for (const auto& [key, value] : body) {
      (void)value;
      if (!kKnownKeys.count(section + "." + key)) throw Error("unknown config key '" + section + "." + key + "'");
    }

  auto path = [&](const char* key) -> std::filesystem::path {
    const auto v = tree.get_optional<std::string>(pt::ptree::path_type(std::string("paths.") + key, '.'));
    if (!v || trim(*v).empty()) return {};
    std::filesystem::path p(trim(*v));
    return p.is_absolute() ? p : base / p;
  };
  auto get = [&](const std::string& key) { return tree.get_optional<std::string>(pt::ptree::path_type(key, '.')); };

  PipelineConfig c;
  c.corpus = path("corpus");
  c.embeddings = path("embeddings");
  c.anchors = path("anchors");
  c.anchor_embeddings = path("anchor_embeddings");
  c.gdp = path("gdp");
  c.lexicon = path("lexicon");
  c.topics = path("topics");
  c.stopwords_de = path("stopwords_de");
  c.stopwords_fr = path("stopwords_fr");
  c.output = path("output");
  if (c.output.empty()) c.output = base / "out";
  if (auto v = get("corpus.filter")) c.corpus_filter = *v;
  if (auto v = get("relevance.sections"))
    for (const auto& s : split(*v, ','))
      if (!trim(s).empty()) c.sections.insert(trim(s));
  if (auto v = get("relevance.threshold")) c.relevance_threshold = parse_double(*v);
  if (auto v = get("relevance.lambda")) c.relevance_lambda = parse_double(*v);
  if (auto v = get("relevance.architecture")) c.architecture = parse_architecture(trim(*v));
  if (auto v = get("relevance.hidden_width")) c.hidden_width = static_cast<int>(parse_u64(*v));
  if (auto v = get("sentiment.lambda")) c.sentiment_lambda = parse_double(*v);
  if (auto v = get("decompose.method")) c.decompose_method = trim(*v);
  if (auto v = get("decompose.clusters")) c.clusters = static_cast<int>(parse_u64(*v));
  if (auto v = get("decompose.reducer_dim")) c.reducer_dim = static_cast<int>(parse_u64(*v));
  if (auto v = get("decompose.top_terms")) c.top_terms = parse_u64(*v);
  if (auto v = get("forecast.month")) c.forecast.month = static_cast<int>(parse_u64(*v));
  if (auto v = get("forecast.horizons")) c.forecast.horizons = parse_int_list(*v);
  if (auto v = get("forecast.initial_window")) c.forecast.initial_window = static_cast<int>(parse_u64(*v));
  if (auto v = get("forecast.hac_lag")) c.forecast.hac_lag = static_cast<int>(parse_u64(*v));
  if (auto v = get("forecast.small_sample")) c.forecast.small_sample = trim(*v) == "true" || trim(*v) == "1";
  if (auto v = get("seeds.seed")) c.seed = parse_u64(*v);

  if (!(c.relevance_threshold > 0 && c.relevance_threshold < 1)) throw Error("relevance.threshold must lie in (0, 1)");
  if (c.decompose_method != "keyword" && c.decompose_method != "classified" && c.decompose_method != "cluster")
    throw Error("decompose.method must be keyword, classified or cluster");
  if (c.forecast.month < 1 || c.forecast.month > 3) throw Error("forecast.month must be 1, 2 or 3");
  return c;
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::filesystem::path& path, const std::vector<std::string>& overrides)
{
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error("cannot read config: " + std::string(e.what()));
  }
  for (const auto& o : overrides) apply_override(tree, o);
  return from_tree(tree, std::filesystem::absolute(path).parent_path());
}

PipelineConfig PipelineConfig::from_entries(const std::vector<std::string>& entries, const std::filesystem::path& base_dir)
{
  pt::ptree tree;
  for (const auto& e : entries) apply_override(tree, e);
  return from_tree(tree, base_dir);
}

Stage parse_stage(std::string_view s)
{
  for (auto st : {Stage::ingest, Stage::filter, Stage::train, Stage::score, Stage::aggregate, Stage::decompose, Stage::evaluate})
    if (to_string(st) == s) return st;
  throw Error("unknown stage '" + std::string(s) + "'");
}

std::string to_string(Stage s)
{
  switch (s) {
    case Stage::ingest: return "ingest";
    case Stage::filter: return "filter";
    case Stage::train: return "train";
    case Stage::score: return "score";
    case Stage::aggregate: return "aggregate";
    case Stage::decompose: return "decompose";
    case Stage::evaluate: return "evaluate";
  }
  return "ingest";
}

std::vector<Stage> parse_stages(std::string_view s)
{
  std::set<Stage> picked;
  if (trim(s) == "all") {
    for (auto st : {Stage::ingest, Stage::filter, Stage::train, Stage::score, Stage::aggregate, Stage::decompose, Stage::evaluate})
      picked.insert(st);
  } else {
    for (const auto& part : split(s, ','))
      if (!trim(part).empty()) picked.insert(parse_stage(trim(part)));
  }
  if (picked.empty()) throw Error("no stages selected");
  return {picked.begin(), picked.end()};
}

namespace
{

namespace fs = std::filesystem;

struct Runner
{
  const PipelineConfig& c;
  std::ostream& log;
  StageRecord* record = nullptr;

  fs::path out(const std::string& name) const { return c.output / name; }

  // Artifact produced by an earlier stage.
  fs::path artifact(const std::string& name, Stage producer)
  {
    const fs::path p = out(name);
    if (!fs::exists(p))
      throw Error("stage '" + to_string(record->stage) + "' needs " + name + "; run stage '" + to_string(producer) + "' first");
    record->inputs[p.filename().string()] = file_fingerprint(p);
    return p;
  }

  // External input named in the configuration.
  fs::path input(const fs::path& p, const char* key)
  {
    if (p.empty()) throw Error("stage '" + to_string(record->stage) + "' needs paths." + key + " in the configuration");
    if (!fs::exists(p)) throw Error("paths." + std::string(key) + " does not exist: " + p.string());
    record->inputs[p.lexically_relative(c.output).generic_string()] = file_fingerprint(p);
    return p;
  }

  void produced(const fs::path& p) { record->outputs[p.filename().string()] = file_fingerprint(p); }

  std::vector<Article> relevant_articles()
  {
    const auto articles = ingest_all(artifact("corpus.clean.jsonl", Stage::ingest), CorpusFilter::parse("date_from=none"));
    std::unordered_set<std::uint64_t> keep;
    for (const auto& s : read_scores_csv(artifact("relevant.csv", Stage::filter))) keep.insert(s.article_id);
    std::vector<Article> out;
    for (const auto& a : articles)
      if (keep.count(a.id)) out.push_back(a);
    return out;
  }

  void ingest()
  {
    IngestStats stats;
    const auto articles = ingest_all(input(c.corpus, "corpus"), CorpusFilter::parse(c.corpus_filter), &stats);
    for (const auto& m : stats.messages) log << "ingest: skipped " << m << "\n";
    log << "ingest: " << stats.kept << " kept, " << stats.filtered_out << " filtered, " << stats.skipped_malformed
        << " malformed\n";
    write_corpus(out("corpus.clean.jsonl"), articles);
    produced(out("corpus.clean.jsonl"));
  }

  void filter()
  {
    const auto articles = ingest_all(artifact("corpus.clean.jsonl", Stage::ingest), CorpusFilter::parse("date_from=none"));
    const EmbeddingStore store = read_store(input(c.embeddings, "embeddings"));
    if (c.sections.empty()) throw Error("relevance.sections is empty");
    const RelevanceLabelSet labels = build_labels(articles, c.sections, c.seed);
    MatrixX<double> X(static_cast<Eigen::Index>(labels.size()), store.dimension());
    std::vector<int> y;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto row = store.find(labels.article_ids[i]);
      if (!row) throw Error("labeled article " + std::to_string(labels.article_ids[i]) + " has no embedding");
      X.row(static_cast<Eigen::Index>(i)) = store.values().row(*row).cast<double>();
      y.push_back(labels.labels[i]);
    }
    RelevanceConfig rc;
    rc.architecture = c.architecture;
    rc.hidden_width = c.hidden_width;
    rc.lambda = c.relevance_lambda;
    rc.threshold = c.relevance_threshold;
    rc.seed = c.seed;
    const auto trained = train_relevance(X, y, rc);
    log << "filter: " << labels.relevant() << " relevant / " << labels.irrelevant() << " irrelevant labels, hold-out accuracy "
        << trained.holdout.accuracy() << "\n";
    save_relevance_model(trained.model, out("relevance.relv"));
    produced(out("relevance.relv"));

    auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    write_text(out("relevance_metrics.csv"),
               "train_size,test_size,accuracy,precision,recall,threshold\n" + std::to_string(trained.model.train_size) + "," +
                   std::to_string(trained.model.test_size) + "," + format_double(trained.holdout.accuracy()) + "," +
                   cell(trained.holdout.precision()) + "," + cell(trained.holdout.recall()) + "," +
                   format_double(trained.model.threshold) + "\n");
    produced(out("relevance_metrics.csv"));

    const JoinedCorpus joined = join(articles, store);
    const RelevanceOutput kept = apply_relevance(trained.model, joined);
    log << "filter: kept " << kept.kept.size() << ", dropped " << kept.dropped << "\n";
    std::vector<ScoredArticle> rel;
    for (std::size_t i = 0; i < kept.kept.size(); ++i) rel.push_back({kept.kept.articles[i].id, kept.kept.articles[i].date, kept.kept_probs[i]});
    write_scores_csv(rel, out("relevant.csv"));
    produced(out("relevant.csv"));
    std::string per_month = "month,kept\n";
    for (const auto& [ym, n] : kept.kept_per_month) per_month += format_year_month(ym) + "," + std::to_string(n) + "\n";
    write_text(out("kept_per_month.csv"), per_month);
    produced(out("kept_per_month.csv"));
  }

  void train()
  {
    const EmbeddingStore store = read_store(input(c.anchor_embeddings, "anchor_embeddings"));
    const AnchorCollection anchors = load_anchors(input(c.anchors, "anchors"), store);
    for (const auto& w : anchors.warnings) log << "train: warning: " << w << "\n";
    log << "train: " << anchors.positives() << " positive, " << anchors.negatives() << " negative anchors\n";
    LogisticOptions opts;
    opts.lambda = c.sentiment_lambda;
    opts.seed = c.seed;
    save_sentiment_model(train_sentiment(anchors, opts), out("sentiment.sent"));
    produced(out("sentiment.sent"));
    save_topic_model(train_sector_model(anchors, opts), out("sectors.mnom"));
    produced(out("sectors.mnom"));
  }

  void score()
  {
    const SentimentModel model = load_sentiment_model(artifact("sentiment.sent", Stage::train));
    const EmbeddingStore store = read_store(input(c.embeddings, "embeddings"));
    const JoinedCorpus joined = join(relevant_articles(), store);
    write_scores_csv(score_articles(model, joined), out("scores.csv"));
    produced(out("scores.csv"));
  }

  void aggregate()
  {
    const auto scored = read_scores_csv(artifact("scores.csv", Stage::score));
    const IndicatorSeries monthly = outlook::aggregate(scored, Frequency::monthly);
    for (const auto& ym : monthly.omitted_months) log << "aggregate: no articles in " << format_year_month(ym) << "\n";
    auto emit = [&](const IndicatorSeries& s, const std::string& name) {
      write_indicator_csv(s, out(name));
      produced(out(name));
    };
    emit(monthly, "indicator_monthly.csv");
    emit(outlook::aggregate(scored, Frequency::first7), "indicator_first7.csv");
    emit(outlook::aggregate(scored, Frequency::first14), "indicator_first14.csv");
    emit(outlook::aggregate(scored, Frequency::first21), "indicator_first21.csv");
    emit(outlook::aggregate(scored, Frequency::daily_mtd), "indicator_mtd.csv");
    const IndicatorSeries z = standardize(monthly);
    emit(z, "indicator_standardized.csv");
    write_standardization_sidecar(*z.standardization, out("indicator_standardized.std"));
    produced(out("indicator_standardized.std"));

    if (!c.lexicon.empty()) {
      const SentimentLexicon lex = read_lexicon(input(c.lexicon, "lexicon"), Language::de);
      const auto articles = relevant_articles();
      const LexiconScores ls = lexicon_scores(articles, lex);
      log << "aggregate: lexicon skipped " << ls.skipped_language << " articles in other languages\n";
      emit(outlook::aggregate(ls.scored, Frequency::monthly), "lexicon_indicator.csv");
    }
  }

  void decompose()
  {
    const auto scored = read_scores_csv(artifact("scores.csv", Stage::score));
    const Standardization st = read_standardization_sidecar(artifact("indicator_standardized.std", Stage::aggregate));
    const auto articles = relevant_articles();
    TopicAssignments assignments;
    if (c.decompose_method == "keyword") {
      assignments = assign_keyword(articles, read_keyword_topics(input(c.topics, "topics")));
    } else {
      const EmbeddingStore store = read_store(input(c.embeddings, "embeddings"));
      const JoinedCorpus joined = join(articles, store);
      std::vector<std::uint64_t> ids;
      for (const auto& a : joined.articles) ids.push_back(a.id);
      if (c.decompose_method == "classified") {
        assignments = assign_classified(load_topic_model(artifact("sectors.mnom", Stage::train)), joined.embeddings, ids);
      } else {
        if (joined.size() == 0) throw Error("no articles to cluster");
        const YearMonth fit_month = YearMonth::of(joined.articles.back().date);
        std::vector<Eigen::Index> rows;
        for (std::size_t i = 0; i < joined.size(); ++i)
          if (YearMonth::of(joined.articles[i].date) == fit_month) rows.push_back(static_cast<Eigen::Index>(i));
        MatrixX<double> fit(static_cast<Eigen::Index>(rows.size()), joined.embeddings.cols());
        for (std::size_t k = 0; k < rows.size(); ++k) fit.row(static_cast<Eigen::Index>(k)) = joined.embeddings.row(rows[k]);
        const ClusterModel model = fit_clusters(fit, c.clusters, c.reducer_dim, c.seed, fit_month);
        for (const auto& w : model.warnings) log << "decompose: warning: " << w << "\n";
        save_cluster_model(model, out("clusters.clus"));
        produced(out("clusters.clus"));
        assignments = assign_clusters(model, joined.embeddings, ids);
      }
    }
    write_assignments_csv(assignments, out("assignments.csv"));
    produced(out("assignments.csv"));
    const ContributionSeries raw = contributions(assignments, scored);
    write_contributions_csv(raw, out("contributions.csv"));
    produced(out("contributions.csv"));
    const ContributionSeries standardized = contributions(assignments, scored, st);
    write_contributions_csv(standardized, out("contributions_standardized.csv"));
    produced(out("contributions_standardized.csv"));
    write_contributions_csv(fold_minor_topics(standardized), out("contributions_display.csv"));
    produced(out("contributions_display.csv"));

    std::map<Language, std::set<std::string>> stop;
    if (!c.stopwords_de.empty()) stop[Language::de] = read_stopwords(input(c.stopwords_de, "stopwords_de"));
    if (!c.stopwords_fr.empty()) stop[Language::fr] = read_stopwords(input(c.stopwords_fr, "stopwords_fr"));
    std::string terms = "topic,term,count\n";
    if (!articles.empty()) {
      YearMonth latest = YearMonth::of(articles.front().date);
      for (const auto& a : articles) latest = std::max(latest, YearMonth::of(a.date));
      std::unordered_map<std::uint64_t, Eigen::Index> row;
      for (std::size_t i = 0; i < assignments.size(); ++i) row.emplace(assignments.article_ids[i], static_cast<Eigen::Index>(i));
      for (std::size_t j = 0; j < assignments.topics.size(); ++j) {
        std::vector<Article> members;
        for (const auto& a : articles) {
          if (YearMonth::of(a.date) != latest) continue;
          const auto it = row.find(a.id);
          if (it == row.end()) continue;
          Eigen::Index best;
          assignments.weights.row(it->second).maxCoeff(&best);
          if (best == static_cast<Eigen::Index>(j)) members.push_back(a);
        }
        for (const auto& [term, n] : term_frequencies(members, stop, c.top_terms))
          terms += csv_escape(assignments.topics[j]) + "," + csv_escape(term) + "," + std::to_string(n) + "\n";
      }
    }
    write_text(out("term_frequencies.csv"), terms);
    produced(out("term_frequencies.csv"));
  }

  void evaluate()
  {
    const IndicatorSeries z = read_indicator_csv(artifact("indicator_standardized.csv", Stage::aggregate));
    const GdpSeries gdp = read_gdp_csv(input(c.gdp, "gdp"));
    const QuarterlySeries x = monthly_to_quarterly(z, c.forecast.mode, c.forecast.month);
    const auto report = evaluate_forecasts(gdp.yoy, x, c.forecast);
    for (const auto& r : report) {
      log << "evaluate: h=" << r.h << " n=" << r.n << " ratio=" << r.ratio;
      if (r.dm) log << " dm_p=" << r.dm->p_value;
      log << "\n";
    }
    write_forecast_report_csv(report, out("forecast_report.csv"));
    produced(out("forecast_report.csv"));
    write_forecasts_csv(report, out("forecasts.csv"));
    produced(out("forecasts.csv"));
    write_crisis_csv(report, out("crisis.csv"));
    produced(out("crisis.csv"));
    write_correlations_csv(lag_correlations(gdp.yoy, monthly_to_quarterly(z, QuarterlyMode::three_month_mean), 4),
                           out("correlations.csv"));
    produced(out("correlations.csv"));
  }
};

}  // namespace

std::vector<StageRecord> run_pipeline(const PipelineConfig& config, const std::vector<Stage>& stages, std::ostream& log)
{
  fs::create_directories(config.output);
  const fs::path manifest_path = config.output / "manifest.json";
  nlohmann::ordered_json manifest;
  if (fs::exists(manifest_path)) {
    try {
      manifest = nlohmann::ordered_json::parse(read_text(manifest_path));
    } catch (const nlohmann::json::exception&) {
      manifest = nlohmann::ordered_json::object();
    }
  }
  if (!manifest.is_object()) manifest = nlohmann::ordered_json::object();

  Runner runner{config, log};
  std::vector<StageRecord> records;
  for (Stage s : stages) {
    StageRecord rec{s, {}, {}, 0};
    runner.record = &rec;
    log << "stage " << to_string(s) << "\n";
    const auto t0 = std::chrono::steady_clock::now();
    switch (s) {
      case Stage::ingest: runner.ingest(); break;
      case Stage::filter: runner.filter(); break;
      case Stage::train: runner.train(); break;
      case Stage::score: runner.score(); break;
      case Stage::aggregate: runner.aggregate(); break;
      case Stage::decompose: runner.decompose(); break;
      case Stage::evaluate: runner.evaluate(); break;
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    nlohmann::ordered_json entry;
    entry["inputs"] = rec.inputs;
    entry["outputs"] = rec.outputs;
    entry["seed"] = config.seed;
    entry["seconds"] = rec.seconds;
    manifest[to_string(s)] = entry;
    nlohmann::ordered_json ordered = nlohmann::ordered_json::object();
    for (auto st : {Stage::ingest, Stage::filter, Stage::train, Stage::score, Stage::aggregate, Stage::decompose, Stage::evaluate})
      if (manifest.contains(to_string(st))) ordered[to_string(st)] = manifest[to_string(st)];
    write_text(manifest_path, ordered.dump(2) + "\n");
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace outlook
