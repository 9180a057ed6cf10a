#include "outlook/pseudo_embedder.hpp"

#include "outlook/text.hpp"

namespace outlook
{

VectorX<double> PseudoEmbedder::token_vector(std::string_view token) const
{
  Rng rng(mix_seed(fnv1a(token), seed_));
  VectorX<double> v(dim_);
  for (Eigen::Index i = 0; i < dim_; ++i) v(i) = standard_normal(rng);
  return v;
}

VectorX<double> PseudoEmbedder::embed(std::string_view text) const
{
  VectorX<double> sum = VectorX<double>::Zero(dim_);
  for (const auto& tok : tokenize(text)) sum += token_vector(tok);
  return l2_normalize(sum);
}

EmbeddingStore PseudoEmbedder::embed_all(const std::vector<std::pair<std::uint64_t, std::string>>& texts) const
{
  std::vector<std::uint64_t> ids;
  EmbeddingMatrix values(static_cast<Eigen::Index>(texts.size()), dim_);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    ids.push_back(texts[i].first);
    values.row(static_cast<Eigen::Index>(i)) = embed(texts[i].second).transpose().cast<float>();
  }
  return EmbeddingStore(std::move(ids), std::move(values), true);
}

}  // namespace outlook
