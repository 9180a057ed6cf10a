#ifndef OUTLOOK_PSEUDO_EMBEDDER_HPP_
#define OUTLOOK_PSEUDO_EMBEDDER_HPP_

#include "outlook/common.hpp"
#include "outlook/embedding.hpp"

#include <string_view>

namespace outlook
{

/// Deterministic bag-of-words stand-in for a transformer embedder: every token maps to a
/// Gaussian vector seeded by its hash, a document is the unit-normalized sum. Texts that share
/// vocabulary land close together, which is all the test fixtures need.
class PseudoEmbedder
{
 public:
  explicit PseudoEmbedder(Eigen::Index dimension, std::uint64_t seed = 0) : dim_(dimension), seed_(seed) {}

  Eigen::Index dimension() const { return dim_; }

  VectorX<double> token_vector(std::string_view token) const;
  /// Throws "degenerate embedding" for texts without tokens.
  VectorX<double> embed(std::string_view text) const;

  /// Normalized store over (id, text) pairs.
  EmbeddingStore embed_all(const std::vector<std::pair<std::uint64_t, std::string>>& texts) const;

 private:
  Eigen::Index dim_;
  std::uint64_t seed_;
};

}  // namespace outlook

#endif  // OUTLOOK_PSEUDO_EMBEDDER_HPP_
