#include "outlook/relevance.hpp"

#include "outlook/io.hpp"
#include "outlook/logistic.hpp"
#include "outlook/optim.hpp"
#include "outlook/text.hpp"

#include <cmath>
#include <numeric>

namespace outlook
{

std::size_t RelevanceLabelSet::relevant() const
{
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

RelevanceLabelSet build_labels(std::span<const Article> articles, const std::set<std::string>& section_allowlist,
                               std::uint64_t seed)
{
  std::set<std::string> allow;
  for (const auto& s : section_allowlist) allow.insert(fold_case(trim(s)));
  std::vector<std::uint64_t> pos, neg;
  for (const auto& a : articles) {
    if (!a.section || trim(*a.section).empty()) continue;
    (allow.count(fold_case(trim(*a.section))) ? pos : neg).push_back(a.id);
  }
  if (pos.empty() && neg.empty()) throw Error("no labeled articles: no article carries a section");
  if (pos.empty()) throw Error("no article falls in the section allowlist");
  if (neg.empty()) throw Error("every sectioned article falls in the allowlist; no irrelevant examples");
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());

  const std::size_t n = std::min(pos.size(), neg.size());
  Rng rng(mix_seed(seed, 0x7e1));
  std::vector<std::pair<std::uint64_t, int>> rows;
  for (auto i : sample_indices(pos.size(), n, rng)) rows.emplace_back(pos[i], 1);
  for (auto i : sample_indices(neg.size(), n, rng)) rows.emplace_back(neg[i], 0);
  std::sort(rows.begin(), rows.end());

  RelevanceLabelSet out;
  for (const auto& [id, y] : rows) {
    out.article_ids.push_back(id);
    out.labels.push_back(y);
  }
  return out;
}

TrainTestSplit split_labels(const std::vector<int>& labels, double test_fraction, std::uint64_t seed)
{
  if (!(test_fraction > 0 && test_fraction < 1)) throw Error("test fraction must lie in (0, 1)");
  TrainTestSplit out;
  Rng rng(mix_seed(seed, 0x5b1));
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) members.push_back(i);
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(members.size())));
    const auto picked = sample_indices(members.size(), n_test, rng);
    std::vector<bool> in_test(members.size(), false);
    for (auto p : picked) in_test[p] = true;
    for (std::size_t k = 0; k < members.size(); ++k) (in_test[k] ? out.test : out.train).push_back(members[k]);
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

RelevanceArchitecture parse_architecture(std::string_view s)
{
  if (s == "linear") return RelevanceArchitecture::linear;
  if (s == "mlp") return RelevanceArchitecture::mlp;
  throw Error("unknown relevance architecture '" + std::string(s) + "' (linear, mlp)");
}

std::string to_string(RelevanceArchitecture a) { return a == RelevanceArchitecture::linear ? "linear" : "mlp"; }

Eigen::Index RelevanceModel::dimension() const
{
  return architecture == RelevanceArchitecture::linear ? weights.size() : hidden_weights.cols();
}

VectorX<double> RelevanceModel::probabilities(const MatrixX<double>& X) const
{
  if (X.cols() != dimension())
    throw DimensionError("relevance model dimension " + std::to_string(dimension()) + " vs input " +
                         std::to_string(X.cols()));
  VectorX<double> z;
  if (architecture == RelevanceArchitecture::linear) {
    z = X * weights;
  } else {
    const MatrixX<double> A = ((X * hidden_weights.transpose()).rowwise() + hidden_bias.transpose()).array().tanh();
    z = A * weights;
  }
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = sigmoid(z(i) + bias);
  return z;
}

double RelevanceModel::probability(const VectorX<double>& x) const { return probabilities(x.transpose())(0); }

double ClassificationMetrics::accuracy() const
{
  const std::size_t n = tp + fp + tn + fn;
  return n == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(n);
}

std::optional<double> ClassificationMetrics::precision() const
{
  if (tp + fp == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

std::optional<double> ClassificationMetrics::recall() const
{
  if (tp + fn == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

ClassificationMetrics classify(const VectorX<double>& probs, const std::vector<int>& labels, double threshold)
{
  if (static_cast<std::size_t>(probs.size()) != labels.size()) throw DimensionError("classify: length mismatch");
  ClassificationMetrics m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted = probs(static_cast<Eigen::Index>(i)) >= threshold;
    if (predicted) (labels[i] == 1 ? m.tp : m.fp)++;
    else (labels[i] == 1 ? m.fn : m.tn)++;
  }
  return m;
}

namespace
{

struct MlpShape
{
  Eigen::Index d, h;
  Eigen::Index size() const { return h * d + h + h + 1; }
};

double mlp_objective(const MatrixX<double>& X, const Eigen::VectorXi& y, const MlpShape& s, const VectorX<double>& theta,
                     double lambda, VectorX<double>* grad)
{
  const Eigen::Map<const MatrixX<double>> W1(theta.data(), s.h, s.d);
  const auto b1 = theta.segment(s.h * s.d, s.h);
  const auto w2 = theta.segment(s.h * s.d + s.h, s.h);
  const double b2 = theta(s.size() - 1);

  const MatrixX<double> A = ((X * W1.transpose()).rowwise() + b1.transpose()).array().tanh();
  const VectorX<double> z = (A * w2).array() + b2;
  double loss = 0.5 * lambda * (W1.squaredNorm() + w2.squaredNorm());
  VectorX<double> r(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    loss += softplus(z(i)) - y(i) * z(i);
    r(i) = sigmoid(z(i)) - y(i);
  }
  if (grad) {
    grad->resize(s.size());
    const MatrixX<double> dZ1 = ((r * w2.transpose()).array() * (1.0 - A.array().square())).matrix();
    Eigen::Map<MatrixX<double>>(grad->data(), s.h, s.d) = dZ1.transpose() * X + lambda * W1;
    grad->segment(s.h * s.d, s.h) = dZ1.colwise().sum().transpose();
    grad->segment(s.h * s.d + s.h, s.h) = A.transpose() * r + lambda * w2;
    (*grad)(s.size() - 1) = r.sum();
  }
  return loss;
}

}  // namespace

RelevanceTraining train_relevance(const MatrixX<double>& X, const std::vector<int>& labels, const RelevanceConfig& config)
{
  if (static_cast<std::size_t>(X.rows()) != labels.size()) throw DimensionError("relevance: labels/rows mismatch");
  if (!(config.threshold > 0 && config.threshold < 1)) throw Error("relevance threshold must lie in (0, 1)");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (positives < 2 || labels.size() - positives < 2) throw Error("relevance training needs at least two examples per class");

  const TrainTestSplit split = split_labels(labels, config.test_fraction, config.seed);
  MatrixX<double> Xtr(static_cast<Eigen::Index>(split.train.size()), X.cols());
  Eigen::VectorXi ytr(Xtr.rows());
  for (std::size_t k = 0; k < split.train.size(); ++k) {
    Xtr.row(static_cast<Eigen::Index>(k)) = X.row(static_cast<Eigen::Index>(split.train[k]));
    ytr(static_cast<Eigen::Index>(k)) = labels[split.train[k]];
  }

  const StopCriteria stop{config.max_iterations, 1e-7, config.relative_tolerance};
  RelevanceModel m;
  m.architecture = config.architecture;
  m.threshold = config.threshold;
  m.train_size = split.train.size();
  m.test_size = split.test.size();
  m.seed = config.seed;
  m.lambda = config.lambda;

  if (config.architecture == RelevanceArchitecture::linear) {
    LogisticOptions opts;
    opts.lambda = config.lambda;
    opts.stop = stop;
    const auto lm = train_logistic<double>(Xtr, ytr, opts);
    m.weights = lm.weights;
    m.bias = lm.bias;
    m.iterations = lm.convergence.iterations;
    m.converged = true;
  } else {
    if (config.hidden_width < 1) throw Error("hidden width must be positive");
    const MlpShape s{X.cols(), config.hidden_width};
    VectorX<double> theta = VectorX<double>::Zero(s.size());
    Rng rng(mix_seed(config.seed, 0x31f));
    const double limit = std::sqrt(6.0 / static_cast<double>(s.d + s.h));
    for (Eigen::Index i = 0; i < s.h * s.d; ++i) theta(i) = (2 * uniform_real(rng) - 1) * limit;
    const double out_limit = std::sqrt(6.0 / static_cast<double>(s.h + 1));
    for (Eigen::Index i = 0; i < s.h; ++i) theta(s.h * s.d + s.h + i) = (2 * uniform_real(rng) - 1) * out_limit;
    const auto res = minimize_lbfgs<double>(
        [&](const VectorX<double>& th, VectorX<double>* g) { return mlp_objective(Xtr, ytr, s, th, config.lambda, g); },
        theta, stop);
    m.hidden_weights = Eigen::Map<const MatrixX<double>>(res.x.data(), s.h, s.d);
    m.hidden_bias = res.x.segment(s.h * s.d, s.h);
    m.weights = res.x.segment(s.h * s.d + s.h, s.h);
    m.bias = res.x(s.size() - 1);
    m.iterations = res.iterations;
    m.converged = res.converged;
  }

  RelevanceTraining out{m, {}};
  if (!split.test.empty()) {
    MatrixX<double> Xte(static_cast<Eigen::Index>(split.test.size()), X.cols());
    std::vector<int> yte;
    for (std::size_t k = 0; k < split.test.size(); ++k) {
      Xte.row(static_cast<Eigen::Index>(k)) = X.row(static_cast<Eigen::Index>(split.test[k]));
      yte.push_back(labels[split.test[k]]);
    }
    out.holdout = classify(m.probabilities(Xte), yte, m.threshold);
  }
  return out;
}

RelevanceOutput apply_relevance(const RelevanceModel& model, const JoinedCorpus& corpus)
{
  RelevanceOutput out;
  if (corpus.size() == 0) return out;
  const VectorX<double> p = model.probabilities(corpus.embeddings);
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    if (model.keeps(p(r))) {
      rows.push_back(r);
      out.kept.articles.push_back(corpus.articles[i]);
      out.kept_probs.push_back(p(r));
      ++out.kept_per_month[YearMonth::of(corpus.articles[i].date)];
    } else {
      ++out.dropped;
    }
  }
  out.kept.embeddings.resize(static_cast<Eigen::Index>(rows.size()), corpus.embeddings.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.kept.embeddings.row(static_cast<Eigen::Index>(k)) = corpus.embeddings.row(rows[k]);
  return out;
}

namespace
{
constexpr std::uint32_t kRelvVersion = 1;
}

void save_relevance_model(const RelevanceModel& m, const std::filesystem::path& path)
{
  BinaryWriter w;
  w.magic("RELV");
  w.u32(kRelvVersion);
  w.u32(static_cast<std::uint32_t>(m.dimension()));
  w.f64(m.threshold);
  w.u8(m.architecture == RelevanceArchitecture::linear ? 0 : 1);
  w.u32(static_cast<std::uint32_t>(m.architecture == RelevanceArchitecture::linear ? 0 : m.hidden_weights.rows()));
  w.u64(m.seed);
  w.u64(m.train_size);
  w.u64(m.test_size);
  w.f64(m.lambda);
  if (m.architecture == RelevanceArchitecture::mlp) {
    w.f64s(m.hidden_weights);
    w.f64s(m.hidden_bias);
  }
  w.f64s(m.weights);
  w.f64(m.bias);
  w.save(path);
}

RelevanceModel load_relevance_model(const std::filesystem::path& path)
{
  auto r = BinaryReader::open(path);
  r.expect_magic("RELV");
  if (const auto v = r.u32(); v != kRelvVersion) throw FormatError("unsupported RELV version " + std::to_string(v), 4);
  const std::uint32_t d = r.u32();
  if (d == 0) throw FormatError("dimension 0", 8);
  RelevanceModel m;
  m.threshold = r.f64();
  if (!(m.threshold > 0 && m.threshold < 1)) throw FormatError("threshold outside (0, 1)", 12);
  const std::size_t arch_at = r.offset();
  const std::uint8_t arch = r.u8();
  if (arch > 1) throw FormatError("unknown architecture code " + std::to_string(arch), arch_at);
  m.architecture = arch == 0 ? RelevanceArchitecture::linear : RelevanceArchitecture::mlp;
  const std::uint32_t h = r.u32();
  m.seed = r.u64();
  m.train_size = r.u64();
  m.test_size = r.u64();
  m.lambda = r.f64();
  if (m.architecture == RelevanceArchitecture::mlp) {
    if (h == 0) throw FormatError("mlp with zero hidden width", r.offset());
    m.hidden_weights.resize(h, d);
    r.f64s(m.hidden_weights);
    m.hidden_bias.resize(h);
    r.f64s(m.hidden_bias);
    m.weights.resize(h);
  } else {
    m.weights.resize(d);
  }
  r.f64s(m.weights);
  m.bias = r.f64();
  r.expect_end();
  m.converged = true;
  return m;
}

}  // namespace outlook
