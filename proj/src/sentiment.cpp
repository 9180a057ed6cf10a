#include "outlook/sentiment.hpp"

#include "outlook/io.hpp"
#include "outlook/stats.hpp"

#include <cmath>

namespace outlook
{

CosineScorer::CosineScorer(const MatrixX<double>& anchors, const Eigen::VectorXi& labels)
{
  if (labels.size() != anchors.rows()) throw DimensionError("cosine scorer: labels/rows mismatch");
  p_ = VectorX<double>::Zero(anchors.cols());
  n_ = VectorX<double>::Zero(anchors.cols());
  Eigen::Index np = 0, nn = 0;
  for (Eigen::Index i = 0; i < anchors.rows(); ++i) {
    if (std::abs(anchors.row(i).norm() - 1.0) > 1e-6)
      throw Error("cosine scorer: anchor " + std::to_string(i) + " is not unit-norm");
    if (labels(i) == 1) {
      p_ += anchors.row(i).transpose();
      ++np;
    } else if (labels(i) == 0) {
      n_ += anchors.row(i).transpose();
      ++nn;
    } else {
      throw Error("cosine scorer: labels must be 0 or 1");
    }
  }
  if (np == 0 || nn == 0) throw Error("cosine scorer: needs positive and negative anchors");
  p_ /= static_cast<double>(np);
  n_ /= static_cast<double>(nn);
  if ((p_ - n_).norm() == 0) throw Error("cosine scorer: positive and negative centroids coincide");
}

double CosineScorer::score(const VectorX<double>& v, bool strict) const
{
  if (v.size() != p_.size()) throw DimensionError("cosine scorer: dimension mismatch");
  if (strict && std::abs(v.norm() - 1.0) > 1e-6) throw Error("cosine scorer: input is not unit-norm");
  return v.dot(p_ - n_);
}

VectorX<double> CosineScorer::scores(const MatrixX<double>& X) const
{
  if (X.cols() != p_.size()) throw DimensionError("cosine scorer: dimension mismatch");
  return X * (p_ - n_);
}

EquivalenceReport equivalence_report(const SentimentModel& logistic, const CosineScorer& scorer, const MatrixX<double>& sample)
{
  EquivalenceReport r;
  r.sample_size = static_cast<std::size_t>(sample.rows());
  const VectorX<double> dir = scorer.direction();
  logistic.check_dimension(dir.size());
  const double den = logistic.weights.norm() * dir.norm();
  r.direction_cosine = den > 0 ? logistic.weights.dot(dir) / den : 0.0;
  if (sample.rows() < 2) return r;
  const VectorX<double> a = logistic.probabilities(sample);
  const VectorX<double> b = scorer.scores(sample);
  r.pearson = pearson(a, b);
  r.spearman = spearman(a, b);
  r.sufficient = r.pearson.has_value() && r.spearman.has_value();
  return r;
}

std::vector<ScoredArticle> score_articles(const SentimentModel& model, const JoinedCorpus& corpus)
{
  const VectorX<double> p = model.probabilities(corpus.embeddings);
  std::vector<ScoredArticle> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i)
    out.push_back({corpus.articles[i].id, corpus.articles[i].date, p(static_cast<Eigen::Index>(i))});
  return out;
}

namespace
{
constexpr std::uint32_t kModelVersion = 1;
}

void save_sentiment_model(const SentimentModel& m, const std::filesystem::path& path)
{
  BinaryWriter w;
  w.magic("SENT");
  w.u32(kModelVersion);
  w.u32(static_cast<std::uint32_t>(m.dimension()));
  w.f64(m.lambda);
  w.f64(m.bias);
  w.f64s(m.weights);
  w.save(path);
}

SentimentModel load_sentiment_model(const std::filesystem::path& path)
{
  auto r = BinaryReader::open(path);
  r.expect_magic("SENT");
  if (const auto v = r.u32(); v != kModelVersion) throw FormatError("unsupported SENT version " + std::to_string(v), 4);
  const std::uint32_t d = r.u32();
  if (d == 0) throw FormatError("dimension 0", 8);
  SentimentModel m;
  m.lambda = r.f64();
  m.bias = r.f64();
  m.weights.resize(d);
  r.f64s(m.weights);
  r.expect_end();
  m.trained = true;
  return m;
}

void save_topic_model(const TopicModel& m, const std::filesystem::path& path)
{
  BinaryWriter w;
  w.magic("MNOM");
  w.u32(kModelVersion);
  w.u32(static_cast<std::uint32_t>(m.dimension()));
  w.u32(static_cast<std::uint32_t>(m.num_classes()));
  w.f64(m.lambda);
  for (const auto& c : m.classes) w.str(c);
  w.f64s(m.biases);
  w.f64s(m.weights);
  w.save(path);
}

TopicModel load_topic_model(const std::filesystem::path& path)
{
  auto r = BinaryReader::open(path);
  r.expect_magic("MNOM");
  if (const auto v = r.u32(); v != kModelVersion) throw FormatError("unsupported MNOM version " + std::to_string(v), 4);
  const std::uint32_t d = r.u32();
  const std::uint32_t t = r.u32();
  if (d == 0 || t < 2) throw FormatError("invalid MNOM shape", 8);
  TopicModel m;
  m.lambda = r.f64();
  for (std::uint32_t k = 0; k < t; ++k) m.classes.push_back(r.str());
  m.biases.resize(t);
  r.f64s(m.biases);
  m.weights.resize(d, t);
  r.f64s(m.weights);
  r.expect_end();
  return m;
}

}  // namespace outlook
