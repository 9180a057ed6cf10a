#include "outlook/anchors.hpp"
#include "outlook/corpus.hpp"
#include "outlook/decomposition.hpp"
#include "outlook/embedding.hpp"
#include "outlook/exchange.hpp"
#include "outlook/forecast.hpp"
#include "outlook/indicator.hpp"
#include "outlook/io.hpp"
#include "outlook/lexicon.hpp"
#include "outlook/pipeline.hpp"
#include "outlook/pseudo_embedder.hpp"
#include "outlook/relevance.hpp"
#include "outlook/sentiment.hpp"
#include "outlook/synthetic.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <deque>
#include <functional>
#include <iostream>
#include <unordered_set>

using namespace outlook;
namespace fs = std::filesystem;

namespace
{

std::ostream& log() { return std::cerr; }

std::vector<int> parse_ints(const std::string& s)
{
  std::vector<int> out;
  for (const auto& part : split(s, ',')) {
    const auto t = trim(part);
    if (t.empty()) continue;
    const auto dots = t.find("..");
    if (dots != std::string::npos) {
      const int lo = static_cast<int>(parse_u64(t.substr(0, dots)));
      const int hi = static_cast<int>(parse_u64(t.substr(dots + 2)));
      if (hi < lo) throw Error("empty range '" + t + "'");
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(static_cast<int>(parse_u64(t)));
    }
  }
  return out;
}

std::set<std::string> parse_set(const std::string& s)
{
  std::set<std::string> out;
  for (const auto& part : split(s, ','))
    if (!trim(part).empty()) out.insert(trim(part));
  return out;
}

EmbeddingStore read_any_store(const fs::path& p)
{
  return p.extension() == ".csv" ? read_store_csv(p) : read_store(p);
}

std::vector<Article> read_corpus(const fs::path& p) { return ingest_all(p, CorpusFilter::parse("date_from=none")); }

// Corpus restricted to the ids listed in an article_id,date,prob file, when given.
std::vector<Article> read_corpus_subset(const fs::path& corpus, const std::string& relevant)
{
  auto articles = read_corpus(corpus);
  if (relevant.empty()) return articles;
  std::unordered_set<std::uint64_t> keep;
  for (const auto& s : read_scores_csv(relevant)) keep.insert(s.article_id);
  std::erase_if(articles, [&](const Article& a) { return !keep.count(a.id); });
  return articles;
}

JoinedCorpus joined_corpus(const fs::path& corpus, const fs::path& embeddings, const std::string& relevant)
{
  auto joined = join(read_corpus_subset(corpus, relevant), read_any_store(embeddings));
  if (joined.unmatched_articles)
    log() << "warning: " << joined.unmatched_articles << " articles have no embedding and were left out\n";
  return joined;
}

struct Subcommand
{
  CLI::App* app;
  std::function<void()> run;
};

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"News-based economic outlook indicator pipeline"};
  app.require_subcommand(1);
  int jobs = 1;
  app.add_option("--jobs", jobs, "Worker cap (stages run single-threaded)")->check(CLI::PositiveNumber);
  std::deque<Subcommand> commands;  // stable addresses
  auto add = [&](const std::string& name, const std::string& help) {
    commands.push_back({app.add_subcommand(name, help), {}});
    return &commands.back();
  };

  // run
  {
    auto* c = add("run", "Run pipeline stages from a configuration file");
    static std::string config, stages = "all";
    static std::vector<std::string> overrides;
    c->app->add_option("--config", config, "INI configuration")->required()->check(CLI::ExistingFile);
    c->app->add_option("--stages", stages, "all, or a comma list of ingest,filter,train,score,aggregate,decompose,evaluate");
    c->app->add_option("--set", overrides, "Override section.key=value");
    c->run = [&] {
      const auto cfg = PipelineConfig::load(config, overrides);
      run_pipeline(cfg, parse_stages(stages), log());
      log() << "artifacts in " << cfg.output.string() << "\n";
    };
  }

  // ingest
  {
    auto* c = add("ingest", "Clean and filter a raw corpus");
    static std::string in, out, filter;
    c->app->add_option("--in", in)->required()->check(CLI::ExistingFile);
    c->app->add_option("--out", out)->required();
    c->app->add_option("--corpus-filter", filter, "key=value pairs: date_from, date_to, languages, pubtypes, outlets");
    c->run = [&] {
      IngestStats stats;
      const auto articles = ingest_all(in, CorpusFilter::parse(filter), &stats);
      for (const auto& m : stats.messages) log() << "skipped " << m << "\n";
      write_corpus(out, articles);
      log() << stats.kept << " kept, " << stats.filtered_out << " filtered, " << stats.skipped_malformed << " malformed\n";
    };
  }

  // export-texts
  {
    auto* c = add("export-texts", "Write embedding requests for an external embedder");
    static std::string corpus, out;
    c->app->add_option("--corpus", corpus)->required()->check(CLI::ExistingFile);
    c->app->add_option("--out", out)->required();
    c->run = [&] {
      const auto articles = read_corpus(corpus);
      write_embed_requests(out, embed_requests(articles));
      log() << articles.size() << " requests\n";
    };
  }

  // pseudo-embed
  {
    auto* c = add("pseudo-embed", "Embed requests with the deterministic hash-based embedder");
    static std::string in, out;
    static Eigen::Index dim = 64;
    static std::uint64_t seed = 0;
    c->app->add_option("--in", in, "Embedding requests (JSON lines)")->required()->check(CLI::ExistingFile);
    c->app->add_option("--out", out)->required();
    c->app->add_option("--dim", dim)->check(CLI::PositiveNumber);
    c->app->add_option("--seed", seed);
    c->run = [&] {
      std::vector<std::pair<std::uint64_t, std::string>> texts;
      for (auto& r : read_embed_requests(in)) texts.emplace_back(r.article_id, std::move(r.text));
      const auto store = PseudoEmbedder(dim, seed).embed_all(texts);
      if (fs::path(out).extension() == ".csv")
        write_store_csv(store, out);
      else
        write_store(store, out);
      log() << store.size() << " vectors of dimension " << dim << "\n";
    };
  }

  // embed-adapter
  {
    auto* c = add("embed-adapter", "Pass arguments to the external embedding adapter");
    c->app->allow_extras();
    c->app->prefix_command();
    c->run = [c] {
      const char* env = std::getenv("OUTLOOK_ADAPTER");
      std::string cmd = env && *env ? env : "python3 -m embedder_adapter";
      for (const auto& a : c->app->remaining()) {
        std::string quoted = "'";
        for (char ch : a) quoted += ch == '\'' ? std::string("'\\''") : std::string(1, ch);
        cmd += " " + quoted + "'";
      }
      const int status = std::system(cmd.c_str());
      if (status != 0) throw Error("adapter exited with status " + std::to_string(status));
    };
  }

  // train-relevance
  {
    auto* c = add("train-relevance", "Train the relevance classifier on section labels");
    static std::string corpus, embeddings, sections, out, metrics, arch = "linear";
    static double lambda = 1.0, threshold = kDefaultRelevanceThreshold;
    static int hidden = 64;
    static std::uint64_t seed = 0;
    c->app->add_option("--corpus", corpus)->required()->check(CLI::ExistingFile);
    c->app->add_option("--embeddings", embeddings)->required()->check(CLI::ExistingFile);
    c->app->add_option("--sections", sections, "Comma list of economic sections")->required();
    c->app->add_option("--out", out)->required();
    c->app->add_option("--metrics", metrics, "Hold-out metrics CSV");
    c->app->add_option("--architecture", arch, "linear or mlp");
    c->app->add_option("--hidden-width", hidden)->check(CLI::PositiveNumber);
    c->app->add_option("--lambda", lambda)->check(CLI::NonNegativeNumber);
    c->app->add_option("--threshold", threshold)->check(CLI::Range(0.0, 1.0));
    c->app->add_option("--seed", seed);
    c->run = [&] {
      const auto articles = read_corpus(corpus);
      const auto store = read_any_store(embeddings);
      const auto labels = build_labels(articles, parse_set(sections), seed);
      MatrixX<double> X(static_cast<Eigen::Index>(labels.size()), store.dimension());
      for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto row = store.find(labels.article_ids[i]);
        if (!row) throw Error("labeled article " + std::to_string(labels.article_ids[i]) + " has no embedding");
        X.row(static_cast<Eigen::Index>(i)) = store.values().row(*row).cast<double>();
      }
      RelevanceConfig rc;
      rc.architecture = parse_architecture(arch);
      rc.hidden_width = hidden;
      rc.lambda = lambda;
      rc.threshold = threshold;
      rc.seed = seed;
      const auto trained = train_relevance(X, labels.labels, rc);
      save_relevance_model(trained.model, out);
      const auto& m = trained.holdout;
      log() << labels.relevant() << " relevant / " << labels.irrelevant() << " irrelevant labels; hold-out accuracy "
            << m.accuracy();
      if (m.precision()) log() << ", precision " << *m.precision();
      if (m.recall()) log() << ", recall " << *m.recall();
      log() << "\n";
      if (!metrics.empty()) {
        auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
        write_text(metrics, "train_size,test_size,accuracy,precision,recall,threshold\n" +
                                std::to_string(trained.model.train_size) + "," + std::to_string(trained.model.test_size) +
                                "," + format_double(m.accuracy()) + "," + cell(m.precision()) + "," + cell(m.recall()) +
                                "," + format_double(threshold) + "\n");
      }
    };
  }

  // apply-relevance
  {
    auto* c = add("apply-relevance", "Keep articles whose relevance probability reaches the threshold");
    static std::string model, corpus, embeddings, out;
    static double threshold = -1;
    c->app->add_option("--model", model)->required()->check(CLI::ExistingFile);
    c->app->add_option("--corpus", corpus)->required()->check(CLI::ExistingFile);
    c->app->add_option("--embeddings", embeddings)->required()->check(CLI::ExistingFile);
    c->app->add_option("--threshold", threshold, "Overrides the stored threshold")->check(CLI::Range(0.0, 1.0));
    c->app->add_option("--out", out, "article_id,date,prob of kept articles")->required();
    c->run = [&] {
      auto m = load_relevance_model(model);
      if (threshold >= 0) m.threshold = threshold;
      const auto kept = apply_relevance(m, joined_corpus(corpus, embeddings, ""));
      std::vector<ScoredArticle> rows;
      for (std::size_t i = 0; i < kept.kept.size(); ++i)
        rows.push_back({kept.kept.articles[i].id, kept.kept.articles[i].date, kept.kept_probs[i]});
      write_scores_csv(rows, out);
      log() << "kept " << rows.size() << ", dropped " << kept.dropped << "\n";
    };
  }

  // train-sentiment
  {
    auto* c = add("train-sentiment", "Fit the sentiment model on anchor articles");
    static std::string anchors, embeddings, out, sectors_out;
    static double lambda = 1.0;
    c->app->add_option("--anchors", anchors)->required()->check(CLI::ExistingFile);
    c->app->add_option("--embeddings", embeddings, "Anchor embeddings")->required()->check(CLI::ExistingFile);
    c->app->add_option("--out", out)->required();
    c->app->add_option("--sector-model", sectors_out, "Also fit the multinomial sector model");
    c->app->add_option("--lambda", lambda)->check(CLI::NonNegativeNumber);
    static bool cv = false;
    static std::uint64_t seed = 0;
    c->app->add_flag("--cv", cv, "Pick lambda by 5-fold cross-validation over 1e-3..1e3");
    c->app->add_option("--seed", seed, "Fold assignment seed");
    c->run = [&] {
      const auto coll = load_anchors(anchors, read_any_store(embeddings));
      for (const auto& w : coll.warnings) log() << "warning: " << w << "\n";
      LogisticOptions opts;
      opts.lambda = lambda;
      if (cv) {
        const auto sel = select_lambda_cv<double>(coll.embeddings, coll.labels(), {1e-3, 1e-2, 1e-1, 1, 1e1, 1e2, 1e3}, 5, seed);
        for (std::size_t i = 0; i < sel.grid.size(); ++i)
          log() << "lambda " << sel.grid[i] << ": held-out log loss " << sel.mean_log_loss[i] << "\n";
        opts.lambda = sel.lambda;
        log() << "selected lambda " << sel.lambda << "\n";
      }
      save_sentiment_model(train_sentiment(coll, opts), out);
      if (!sectors_out.empty()) save_topic_model(train_sector_model(coll, opts), sectors_out);
      log() << coll.positives() << " positive, " << coll.negatives() << " negative anchors\n";
    };
  }

  // score
  {
    auto* c = add("score", "Score articles with a sentiment model");
    static std::string model, corpus, embeddings, relevant, out;
    c->app->add_option("--model", model)->required()->check(CLI::ExistingFile);
    c->app->add_option("--corpus", corpus)->required()->check(CLI::ExistingFile);
    c->app->add_option("--embeddings", embeddings)->required()->check(CLI::ExistingFile);
    c->app->add_option("--relevant", relevant, "Restrict to ids in this file")->check(CLI::ExistingFile);
    c->app->add_option("--out", out)->required();
    c->run = [&] {
      const auto scored = score_articles(load_sentiment_model(model), joined_corpus(corpus, embeddings, relevant));
      write_scores_csv(scored, out);
      log() << scored.size() << " articles scored\n";
    };
  }

  // build-indicator
  {
    auto* c = add("build-indicator", "Aggregate article scores into an indicator series");
    static std::string scores, out, frequency = "monthly";
    static bool standardized = false;
    c->app->add_option("--scores", scores)->required()->check(CLI::ExistingFile);
    c->app->add_option("--frequency", frequency, "monthly, first7, first14, first21 or daily-mtd");
    c->app->add_option("--out", out)->required();
    c->app->add_flag("--standardize", standardized, "z-score the series; writes <out>.std");
    c->run = [&] {
      auto series = aggregate(read_scores_csv(scores), parse_frequency(frequency));
      for (const auto& ym : series.omitted_months) log() << "no articles in " << format_year_month(ym) << "\n";
      if (standardized) {
        series = standardize(series);
        write_standardization_sidecar(*series.standardization, out + ".std");
      }
      write_indicator_csv(series, out);
    };
  }

  // decompose
  {
    auto* c = add("decompose", "Split the indicator into additive topic contributions");
    static std::string method = "keyword", scores, corpus, embeddings, topics, sector_model, standardization, out,
                       assignments_out, cluster_out, fit_month, stopwords_de, stopwords_fr, terms_out;
    static int clusters = 8, reducer_dim = 10;
    static std::uint64_t seed = 0;
    static std::size_t top_terms = 20;
    static bool fold = false;
    c->app->add_option("--method", method, "keyword, classified or cluster");
    c->app->add_option("--scores", scores)->required()->check(CLI::ExistingFile);
    c->app->add_option("--corpus", corpus)->required()->check(CLI::ExistingFile);
    c->app->add_option("--embeddings", embeddings)->check(CLI::ExistingFile);
    c->app->add_option("--topics", topics, "Keyword topic file")->check(CLI::ExistingFile);
    c->app->add_option("--sector-model", sector_model)->check(CLI::ExistingFile);
    c->app->add_option("--clusters", clusters)->check(CLI::PositiveNumber);
    c->app->add_option("--reducer-dim", reducer_dim)->check(CLI::PositiveNumber);
    c->app->add_option("--fit-month", fit_month, "YYYY-MM; default latest scored month");
    c->app->add_option("--seed", seed);
    c->app->add_option("--standardization", standardization, "Sidecar of a standardized indicator")->check(CLI::ExistingFile);
    c->app->add_flag("--fold-minor", fold, "Fold topics never above 0.2 in absolute value into Other");
    c->app->add_option("--out", out, "period,topic,contribution")->required();
    c->app->add_option("--assignments-out", assignments_out);
    c->app->add_option("--cluster-model-out", cluster_out);
    c->app->add_option("--terms-out", terms_out, "Term frequencies per topic for the latest month");
    c->app->add_option("--top-terms", top_terms);
    c->app->add_option("--stopwords-de", stopwords_de)->check(CLI::ExistingFile);
    c->app->add_option("--stopwords-fr", stopwords_fr)->check(CLI::ExistingFile);
    c->run = [&] {
      const auto scored = read_scores_csv(scores);
      const auto articles = read_corpus_subset(corpus, scores);
      TopicAssignments a;
      if (method == "keyword") {
        if (topics.empty()) throw Error("--topics is required for keyword assignment");
        a = assign_keyword(articles, read_keyword_topics(topics));
      } else {
        if (embeddings.empty()) throw Error("--embeddings is required for " + method + " assignment");
        const auto joined = join(articles, read_any_store(embeddings));
        std::vector<std::uint64_t> ids;
        for (const auto& art : joined.articles) ids.push_back(art.id);
        if (method == "classified") {
          if (sector_model.empty()) throw Error("--sector-model is required for classified assignment");
          a = assign_classified(load_topic_model(sector_model), joined.embeddings, ids);
        } else if (method == "cluster") {
          if (joined.size() == 0) throw Error("no articles to cluster");
          const YearMonth fm = fit_month.empty() ? YearMonth::of(joined.articles.back().date) : parse_year_month(fit_month);
          std::vector<Eigen::Index> rows;
          for (std::size_t i = 0; i < joined.size(); ++i)
            if (YearMonth::of(joined.articles[i].date) == fm) rows.push_back(static_cast<Eigen::Index>(i));
          MatrixX<double> fit(static_cast<Eigen::Index>(rows.size()), joined.embeddings.cols());
          for (std::size_t k = 0; k < rows.size(); ++k) fit.row(static_cast<Eigen::Index>(k)) = joined.embeddings.row(rows[k]);
          const auto model = fit_clusters(fit, clusters, reducer_dim, seed, fm);
          for (const auto& w : model.warnings) log() << "warning: " << w << "\n";
          if (!cluster_out.empty()) save_cluster_model(model, cluster_out);
          a = assign_clusters(model, joined.embeddings, ids);
        } else {
          throw Error("unknown method '" + method + "'");
        }
      }
      std::optional<Standardization> st;
      if (!standardization.empty()) st = read_standardization_sidecar(standardization);
      auto series = contributions(a, scored, st);
      if (fold) series = fold_minor_topics(series);
      write_contributions_csv(series, out);
      if (!assignments_out.empty()) write_assignments_csv(a, assignments_out);
      if (!terms_out.empty() && !articles.empty()) {
        std::map<Language, std::set<std::string>> stop;
        if (!stopwords_de.empty()) stop[Language::de] = read_stopwords(stopwords_de);
        if (!stopwords_fr.empty()) stop[Language::fr] = read_stopwords(stopwords_fr);
        YearMonth latest = YearMonth::of(articles.front().date);
        for (const auto& art : articles) latest = std::max(latest, YearMonth::of(art.date));
        std::unordered_map<std::uint64_t, Eigen::Index> row;
        for (std::size_t i = 0; i < a.size(); ++i) row.emplace(a.article_ids[i], static_cast<Eigen::Index>(i));
        std::string text = "topic,term,count\n";
        for (std::size_t j = 0; j < a.topics.size(); ++j) {
          std::vector<Article> members;
          for (const auto& art : articles) {
            const auto it = row.find(art.id);
            if (YearMonth::of(art.date) != latest || it == row.end()) continue;
            Eigen::Index best;
            a.weights.row(it->second).maxCoeff(&best);
            if (best == static_cast<Eigen::Index>(j)) members.push_back(art);
          }
          for (const auto& [term, n] : term_frequencies(members, stop, top_terms))
            text += csv_escape(a.topics[j]) + "," + csv_escape(term) + "," + std::to_string(n) + "\n";
        }
        write_text(terms_out, text);
      }
    };
  }

  // top-articles
  {
    auto* c = add("top-articles", "Rank the articles of one topic and month");
    static std::string scores, assignments, topic, period, mode = "most_positive", standardization;
    static std::size_t k = 10;
    c->app->add_option("--scores", scores)->required()->check(CLI::ExistingFile);
    c->app->add_option("--assignments", assignments, "article_id,topic,weight")->required()->check(CLI::ExistingFile);
    c->app->add_option("--topic", topic)->required();
    c->app->add_option("--period", period, "YYYY-MM")->required();
    c->app->add_option("--mode", mode, "most_positive, most_negative, highest_topic_prob or largest_abs_contribution");
    c->app->add_option("--k", k);
    c->app->add_option("--standardization", standardization)->check(CLI::ExistingFile);
    c->run = [&] {
      const auto table = read_csv(assignments);
      const auto ci = table.column("article_id"), ct = table.column("topic"), cw = table.column("weight");
      TopicAssignments a;
      std::map<std::uint64_t, std::map<std::string, double>> rows;
      for (const auto& row : table.rows) {
        rows[parse_u64(row.at(ci))][row.at(ct)] = parse_double(row.at(cw));
        if (std::find(a.topics.begin(), a.topics.end(), row.at(ct)) == a.topics.end()) a.topics.push_back(row.at(ct));
      }
      a.weights = MatrixX<double>::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(a.topics.size()));
      Eigen::Index r = 0;
      for (const auto& [id, w] : rows) {
        a.article_ids.push_back(id);
        for (const auto& [name, v] : w)
          a.weights(r, std::find(a.topics.begin(), a.topics.end(), name) - a.topics.begin()) = v;
        ++r;
      }
      std::optional<Standardization> st;
      if (!standardization.empty()) st = read_standardization_sidecar(standardization);
      std::cout << "article_id\n";
      for (auto id : top_articles(read_scores_csv(scores), a, topic, parse_year_month(period), parse_ranking_mode(mode), k, st))
        std::cout << id << "\n";
    };
  }

  // evaluate-forecast
  {
    auto* c = add("evaluate-forecast", "Pseudo-out-of-sample comparison against the AR(1) benchmark");
    static std::string gdp, indicator, horizons = "0,1,2", mode = "month_m", out, forecasts_out, crisis_out,
                       target = "yoy";
    static int m = 2, window = 8, hac_lag = 0;
    static bool small_sample = false;
    c->app->add_option("--gdp", gdp)->required()->check(CLI::ExistingFile);
    c->app->add_option("--indicator", indicator, "Monthly indicator CSV")->required()->check(CLI::ExistingFile);
    c->app->add_option("--m", m, "Month of the quarter used")->check(CLI::Range(1, 3));
    c->app->add_option("--mode", mode, "month_m or three_month_mean");
    c->app->add_option("--horizons", horizons);
    c->app->add_option("--initial-window", window)->check(CLI::PositiveNumber);
    c->app->add_option("--hac-lag", hac_lag, "0 picks max(h, 1)");
    c->app->add_flag("--small-sample", small_sample, "Harvey-Leybourne-Newbold correction");
    c->app->add_option("--target", target, "yoy or qoq");
    c->app->add_option("--out", out)->required();
    c->app->add_option("--forecasts-out", forecasts_out);
    c->app->add_option("--crisis-out", crisis_out);
    c->run = [&] {
      ForecastConfig fc;
      fc.horizons = parse_ints(horizons);
      fc.month = m;
      fc.mode = parse_quarterly_mode(mode);
      fc.initial_window = window;
      fc.hac_lag = hac_lag;
      fc.small_sample = small_sample;
      const auto g = read_gdp_csv(gdp);
      if (target != "yoy" && target != "qoq") throw Error("--target must be yoy or qoq");
      const auto x = monthly_to_quarterly(read_indicator_csv(indicator), fc.mode, fc.month);
      const auto report = evaluate_forecasts(target == "yoy" ? g.yoy : g.qoq, x, fc);
      for (const auto& r : report) {
        log() << "h=" << r.h << " n=" << r.n << " ratio=" << r.ratio;
        if (r.dm) {
          log() << " dm=" << r.dm->statistic << " p=" << r.dm->p_value;
          if (!r.dm->warning.empty()) log() << " (" << r.dm->warning << ")";
        }
        log() << "\n";
      }
      write_forecast_report_csv(report, out);
      if (!forecasts_out.empty()) write_forecasts_csv(report, forecasts_out);
      if (!crisis_out.empty()) write_crisis_csv(report, crisis_out);
    };
  }

  // correlations
  {
    auto* c = add("correlations", "Correlation of GDP growth with lagged indicator values");
    static std::string gdp, indicator, lags = "0..4", mode = "three_month_mean", out, target = "yoy";
    static int m = 2;
    c->app->add_option("--gdp", gdp)->required()->check(CLI::ExistingFile);
    c->app->add_option("--indicator", indicator)->required()->check(CLI::ExistingFile);
    c->app->add_option("--lags", lags, "0..L");
    c->app->add_option("--mode", mode, "month_m or three_month_mean");
    c->app->add_option("--m", m)->check(CLI::Range(1, 3));
    c->app->add_option("--target", target, "yoy or qoq");
    c->app->add_option("--out", out)->required();
    c->run = [&] {
      const auto list = parse_ints(lags);
      for (std::size_t i = 0; i < list.size(); ++i)
        if (list[i] != static_cast<int>(i)) throw Error("--lags must run from 0 without gaps, as in 0..4");
      if (list.empty()) throw Error("--lags is empty");
      const auto g = read_gdp_csv(gdp);
      const auto x = monthly_to_quarterly(read_indicator_csv(indicator), parse_quarterly_mode(mode), m);
      write_correlations_csv(lag_correlations(target == "qoq" ? g.qoq : g.yoy, x, list.back()), out);
    };
  }

  // lexicon-score
  {
    auto* c = add("lexicon-score", "Word-count sentiment baseline");
    static std::string lexicon, corpus, relevant, language = "de", out, scores_out;
    c->app->add_option("--lexicon", lexicon)->required()->check(CLI::ExistingFile);
    c->app->add_option("--corpus", corpus)->required()->check(CLI::ExistingFile);
    c->app->add_option("--relevant", relevant)->check(CLI::ExistingFile);
    c->app->add_option("--language", language, "Language of the lexicon");
    c->app->add_option("--out", out, "Monthly indicator CSV")->required();
    c->app->add_option("--scores-out", scores_out);
    c->run = [&] {
      const auto lex = read_lexicon(lexicon, parse_language(language));
      const auto s = lexicon_scores(read_corpus_subset(corpus, relevant), lex);
      log() << s.scored.size() << " articles scored, " << s.skipped_language << " in other languages skipped\n";
      if (!scores_out.empty()) write_scores_csv(s.scored, scores_out);
      write_indicator_csv(aggregate(s.scored, Frequency::monthly), out);
    };
  }

  // stability
  {
    auto* c = add("stability", "Indicator dispersion across anchor subsamples");
    static std::string anchors, anchor_embeddings, corpus, embeddings, relevant, sizes = "32,64,100,128", out;
    static std::size_t repeats = 20;
    static std::uint64_t seed = 0;
    static double lambda = 1.0;
    c->app->add_option("--anchors", anchors)->required()->check(CLI::ExistingFile);
    c->app->add_option("--anchor-embeddings", anchor_embeddings)->required()->check(CLI::ExistingFile);
    c->app->add_option("--corpus", corpus)->required()->check(CLI::ExistingFile);
    c->app->add_option("--embeddings", embeddings)->required()->check(CLI::ExistingFile);
    c->app->add_option("--relevant", relevant)->check(CLI::ExistingFile);
    c->app->add_option("--sizes", sizes, "Anchors per class");
    c->app->add_option("--repeats", repeats)->check(CLI::Range(2, 100000));
    c->app->add_option("--seed", seed);
    c->app->add_option("--lambda", lambda)->check(CLI::NonNegativeNumber);
    c->app->add_option("--out", out)->required();
    c->run = [&] {
      const auto coll = load_anchors(anchors, read_any_store(anchor_embeddings));
      const auto joined = joined_corpus(corpus, embeddings, relevant);
      auto fn = [&](const SentimentModel& model) {
        const auto s = aggregate(score_articles(model, joined), Frequency::monthly);
        VectorX<double> v(static_cast<Eigen::Index>(s.points.size()));
        for (std::size_t i = 0; i < s.points.size(); ++i) v(static_cast<Eigen::Index>(i)) = s.points[i].value;
        return v;
      };
      std::vector<std::size_t> sz;
      for (int v : parse_ints(sizes)) sz.push_back(static_cast<std::size_t>(v));
      LogisticOptions opts;
      opts.lambda = lambda;
      const auto report = stability_experiment(coll, fn, sz, repeats, seed, opts);
      for (const auto& s : report.sizes) log() << "size " << s.size << ": dispersion " << s.dispersion << "\n";
      write_stability_csv(report, out);
    };
  }

  // substitute-anchors
  {
    auto* c = add("substitute-anchors", "Turn the most extreme scored articles of one year into anchors");
    static std::string scores, corpus, embeddings, out_anchors, out_embeddings;
    static int year = 0;
    static std::size_t k = 128;
    c->app->add_option("--scores", scores)->required()->check(CLI::ExistingFile);
    c->app->add_option("--corpus", corpus)->required()->check(CLI::ExistingFile);
    c->app->add_option("--embeddings", embeddings)->required()->check(CLI::ExistingFile);
    c->app->add_option("--year", year)->required();
    c->app->add_option("--k", k, "Anchors per side");
    c->app->add_option("--out-anchors", out_anchors)->required();
    c->app->add_option("--out-embeddings", out_embeddings)->required();
    c->run = [&] {
      const auto joined = joined_corpus(corpus, embeddings, scores);
      const auto coll = anchors_from_extremes(read_scores_csv(scores), joined, year, k);
      write_anchor_records(out_anchors, coll.anchors);
      std::vector<std::uint64_t> ids;
      for (const auto& a : coll.anchors) ids.push_back(a.id);
      write_store(EmbeddingStore(ids, coll.embeddings.cast<float>(), false), out_embeddings);
    };
  }

  // sample-for-labeling
  {
    auto* c = add("sample-for-labeling", "Seeded sample per score quantile band");
    static std::string scores, bands = "0:0.1,0.45:0.55,0.9:1", out;
    static std::size_t k = 20;
    static std::uint64_t seed = 0;
    c->app->add_option("--scores", scores)->required()->check(CLI::ExistingFile);
    c->app->add_option("--bands", bands, "lo:hi quantile pairs, comma separated");
    c->app->add_option("--k", k, "Articles per band");
    c->app->add_option("--seed", seed);
    c->app->add_option("--out", out)->required();
    c->run = [&] {
      std::vector<QuantileBand> qb;
      for (const auto& part : split(bands, ',')) {
        const auto colon = part.find(':');
        if (colon == std::string::npos) throw Error("band '" + part + "' is not lo:hi");
        qb.push_back({parse_double(part.substr(0, colon)), parse_double(part.substr(colon + 1))});
      }
      std::string text = "band,article_id,date,prob\n";
      for (const auto& r : export_labeling_sample(read_scores_csv(scores), qb, k, seed))
        text += std::to_string(r.band) + "," + std::to_string(r.article.article_id) + "," + format_date(r.article.date) +
                "," + format_double(r.article.prob) + "\n";
      write_text(out, text);
    };
  }

  // make-fixture
  {
    auto* c = add("make-fixture", "Write a deterministic synthetic corpus with configuration");
    static std::string out;
    static SyntheticOptions opts;
    opts.months = 60;
    c->app->add_option("--out", out)->required();
    c->app->add_option("--articles", opts.articles)->check(CLI::PositiveNumber);
    c->app->add_option("--months", opts.months)->check(CLI::PositiveNumber);
    c->app->add_option("--dim", opts.dimension)->check(CLI::PositiveNumber);
    c->app->add_option("--seed", opts.seed);
    c->run = [&] {
      write_synthetic_fixture(make_synthetic_world(opts), out);
      log() << "fixture written to " << out << "\n";
    };
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    for (auto& c : commands)
      if (c.app->parsed()) c.run();
  } catch (const std::exception& e) {
    log() << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
