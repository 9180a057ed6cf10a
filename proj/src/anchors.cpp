#include "outlook/anchors.hpp"

#include "outlook/io.hpp"
#include "outlook/stats.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace outlook
{

Sector parse_sector(std::string_view s)
{
  for (auto sec : kAllSectors)
    if (to_string(sec) == s) return sec;
  throw Error("unknown sector '" + std::string(s) + "'");
}

std::string to_string(Sector s)
{
  switch (s) {
    case Sector::general: return "general";
    case Sector::financial_markets: return "financial_markets";
    case Sector::labor_market: return "labor_market";
    case Sector::real_estate: return "real_estate";
    case Sector::international_trade: return "international_trade";
    case Sector::consumption: return "consumption";
    case Sector::business_situation: return "business_situation";
    case Sector::macro_outlook: return "macro_outlook";
  }
  return "general";
}

std::vector<AnchorArticle> read_anchor_records(const std::filesystem::path& path)
{
  const std::string text = read_text(path);
  std::vector<AnchorArticle> out;
  std::unordered_set<std::uint64_t> seen;
  std::size_t line_no = 0;
  for (const auto& line : split(text, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    AnchorArticle a;
    try {
      const auto j = nlohmann::json::parse(line);
      a.id = j.at("id").get<std::uint64_t>();
      a.polarity = j.at("polarity").get<int>();
      a.sector = parse_sector(j.at("sector").get<std::string>());
      a.text = j.at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(where + ": malformed anchor record: " + e.what());
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
    if (a.polarity != 0 && a.polarity != 1) throw Error(where + ": polarity must be 0 or 1");
    if (!seen.insert(a.id).second) throw Error(where + ": duplicate anchor id " + std::to_string(a.id));
    out.push_back(std::move(a));
  }
  return out;
}

void write_anchor_records(const std::filesystem::path& path, std::span<const AnchorArticle> anchors)
{
  std::string out;
  for (const auto& a : anchors) {
    nlohmann::ordered_json j;
    j["id"] = a.id;
    j["polarity"] = a.polarity;
    j["sector"] = to_string(a.sector);
    j["text"] = a.text;
    out += j.dump() + "\n";
  }
  write_text(path, out);
}

std::size_t AnchorCollection::positives() const
{
  return static_cast<std::size_t>(
      std::count_if(anchors.begin(), anchors.end(), [](const AnchorArticle& a) { return a.polarity == 1; }));
}

Eigen::VectorXi AnchorCollection::labels() const
{
  Eigen::VectorXi y(static_cast<Eigen::Index>(anchors.size()));
  for (std::size_t k = 0; k < anchors.size(); ++k) y(static_cast<Eigen::Index>(k)) = anchors[k].polarity;
  return y;
}

std::map<std::pair<int, Sector>, std::size_t> AnchorCollection::counts() const
{
  std::map<std::pair<int, Sector>, std::size_t> c;
  for (const auto& a : anchors) ++c[{a.polarity, a.sector}];
  return c;
}

AnchorCollection AnchorCollection::subset(const std::vector<std::size_t>& rows) const
{
  AnchorCollection out;
  out.embeddings.resize(static_cast<Eigen::Index>(rows.size()), embeddings.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.anchors.push_back(anchors.at(rows[k]));
    out.embeddings.row(static_cast<Eigen::Index>(k)) = embeddings.row(static_cast<Eigen::Index>(rows[k]));
  }
  return out;
}

AnchorCollection attach_embeddings(std::vector<AnchorArticle> anchors, const EmbeddingStore& store)
{
  AnchorCollection c;
  c.embeddings.resize(static_cast<Eigen::Index>(anchors.size()), store.dimension());
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    const auto row = store.find(anchors[k].id);
    if (!row) throw Error("anchor " + std::to_string(anchors[k].id) + " has no embedding");
    c.embeddings.row(static_cast<Eigen::Index>(k)) = store.values().row(*row).cast<double>();
  }
  c.anchors = std::move(anchors);
  const std::size_t pos = c.positives(), neg = c.negatives();
  if (pos < kStabilitySize || neg < kStabilitySize)
    c.warnings.push_back("anchor collection below stability size (" + std::to_string(pos) + " positive, " +
                         std::to_string(neg) + " negative; " + std::to_string(kStabilitySize) + " per class advised)");
  return c;
}

AnchorCollection load_anchors(const std::filesystem::path& path, const EmbeddingStore& store)
{
  return attach_embeddings(read_anchor_records(path), store);
}

SentimentModel train_sentiment(const AnchorCollection& anchors, const LogisticOptions& options)
{
  if (anchors.size() == 0) throw Error("no anchors");
  return train_logistic<double>(anchors.embeddings, anchors.labels(), options);
}

TopicModel train_sector_model(const AnchorCollection& anchors, const LogisticOptions& options)
{
  std::vector<Sector> present;
  for (auto s : kAllSectors)
    if (std::any_of(anchors.anchors.begin(), anchors.anchors.end(), [&](const AnchorArticle& a) { return a.sector == s; }))
      present.push_back(s);
  std::vector<std::string> names;
  for (auto s : present) names.push_back(to_string(s));
  Eigen::VectorXi y(static_cast<Eigen::Index>(anchors.size()));
  for (std::size_t k = 0; k < anchors.size(); ++k)
    y(static_cast<Eigen::Index>(k)) =
        static_cast<int>(std::find(present.begin(), present.end(), anchors.anchors[k].sector) - present.begin());
  return train_multinomial<double>(anchors.embeddings, y, std::move(names), options);
}

StabilityReport stability_experiment(const AnchorCollection& anchors, const IndicatorFunction& indicator,
                                     const std::vector<std::size_t>& sizes, std::size_t repeats, std::uint64_t seed,
                                     const LogisticOptions& options)
{
  if (repeats < 2) throw Error("stability experiment needs at least two repeats");
  std::vector<std::size_t> pos, neg;
  for (std::size_t k = 0; k < anchors.size(); ++k) (anchors.anchors[k].polarity == 1 ? pos : neg).push_back(k);
  for (auto s : sizes) {
    if (s == 0) throw Error("subsample size must be positive");
    if (s > pos.size() || s > neg.size())
      throw Error("subsample size " + std::to_string(s) + " exceeds available anchors (" + std::to_string(pos.size()) +
                  " positive, " + std::to_string(neg.size()) + " negative)");
  }

  StabilityReport report;
  report.reference = indicator(train_sentiment(anchors, options));
  const Eigen::Index months = report.reference.size();

  for (auto s : sizes) {
    MatrixX<double> values(static_cast<Eigen::Index>(repeats), months);
    for (std::size_t r = 0; r < repeats; ++r) {
      const std::uint64_t draw_seed = mix_seed(mix_seed(seed, s), r);
      Rng rng(draw_seed);
      std::vector<std::size_t> rows;
      for (auto i : sample_indices(pos.size(), s, rng)) rows.push_back(pos[i]);
      for (auto i : sample_indices(neg.size(), s, rng)) rows.push_back(neg[i]);
      std::sort(rows.begin(), rows.end());
      const VectorX<double> ind = indicator(train_sentiment(anchors.subset(rows), options));
      if (ind.size() != months) throw DimensionError("indicator length changed between subsamples");
      values.row(static_cast<Eigen::Index>(r)) = ind.transpose();
      const auto c = pearson(ind, report.reference);
      report.rows.push_back({s, r, draw_seed, c ? *c : std::numeric_limits<double>::quiet_NaN()});
    }
    double dispersion = 0;
    for (Eigen::Index t = 0; t < months; ++t) {
      // shifted by the first repeat: identical repeats give exactly zero
      const VectorX<double> dev = values.col(t).array() - values(0, t);
      const double mu = dev.mean();
      dispersion += std::sqrt((dev.array() - mu).square().sum() / static_cast<double>(repeats - 1));
    }
    report.sizes.push_back({s, months > 0 ? dispersion / static_cast<double>(months) : 0.0});
  }
  return report;
}

void write_stability_csv(const StabilityReport& report, const std::filesystem::path& path)
{
  std::string out = "size,repeat,seed,correlation,dispersion\n";
  for (const auto& row : report.rows) {
    double dispersion = 0;
    for (const auto& s : report.sizes)
      if (s.size == row.size) dispersion = s.dispersion;
    out += std::to_string(row.size) + "," + std::to_string(row.repeat) + "," + std::to_string(row.seed) + "," +
           format_double(row.correlation) + "," + format_double(dispersion) + "\n";
  }
  write_text(path, out);
}

AnchorCollection anchors_from_extremes(std::span<const ScoredArticle> scored, const JoinedCorpus& corpus, int year,
                                       std::size_t k_per_side)
{
  if (k_per_side == 0) throw Error("k_per_side must be positive");
  std::vector<ScoredArticle> in_year;
  for (const auto& s : scored)
    if (static_cast<int>(s.date.year()) == year) in_year.push_back(s);
  if (in_year.size() < 2 * k_per_side)
    throw Error("year " + std::to_string(year) + " has " + std::to_string(in_year.size()) + " scored articles; " +
                std::to_string(2 * k_per_side) + " needed (shortfall " + std::to_string(2 * k_per_side - in_year.size()) +
                ")");

  std::unordered_map<std::uint64_t, std::size_t> row_of;
  for (std::size_t i = 0; i < corpus.size(); ++i) row_of.emplace(corpus.articles[i].id, i);

  auto top = in_year;
  std::sort(top.begin(), top.end(), [](const ScoredArticle& a, const ScoredArticle& b) {
    return a.prob != b.prob ? a.prob > b.prob : a.article_id < b.article_id;
  });
  auto bottom = in_year;
  std::sort(bottom.begin(), bottom.end(), [](const ScoredArticle& a, const ScoredArticle& b) {
    return a.prob != b.prob ? a.prob < b.prob : a.article_id < b.article_id;
  });

  std::vector<AnchorArticle> anchors;
  std::vector<std::size_t> rows;
  auto take = [&](const ScoredArticle& s, int polarity) {
    const auto it = row_of.find(s.article_id);
    if (it == row_of.end()) throw Error("scored article " + std::to_string(s.article_id) + " is not in the corpus");
    anchors.push_back({s.article_id, polarity, Sector::general, corpus.articles[it->second].text()});
    rows.push_back(it->second);
  };
  std::unordered_set<std::uint64_t> positive;
  for (std::size_t k = 0; k < k_per_side; ++k) {
    take(top[k], 1);
    positive.insert(top[k].article_id);
  }
  // An article never serves both sides, even when every score ties.
  std::size_t taken = 0;
  for (const auto& s : bottom) {
    if (taken == k_per_side) break;
    if (positive.count(s.article_id)) continue;
    take(s, 0);
    ++taken;
  }

  AnchorCollection c;
  c.embeddings.resize(static_cast<Eigen::Index>(rows.size()), corpus.embeddings.cols());
  for (std::size_t k = 0; k < rows.size(); ++k)
    c.embeddings.row(static_cast<Eigen::Index>(k)) = corpus.embeddings.row(static_cast<Eigen::Index>(rows[k]));
  c.anchors = std::move(anchors);
  return c;
}

}  // namespace outlook
