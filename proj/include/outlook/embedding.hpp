#ifndef OUTLOOK_EMBEDDING_HPP_
#define OUTLOOK_EMBEDDING_HPP_

#include "outlook/common.hpp"
#include "outlook/corpus.hpp"

#include <cmath>
#include <filesystem>
#include <optional>
#include <unordered_map>
#include <vector>

namespace outlook
{

/// Row-major float storage: one embedding per row.
using EmbeddingMatrix = RowMatrixX<float>;

/// Fixed-dimension document embeddings keyed by article id. Immutable after construction.
///
/// Exchange format (little-endian): "EMB1", u32 version=1, u32 dimension, u64 count,
/// u8 normalized, 7 zero bytes, then per record u64 article_id followed by dimension
/// IEEE-754 binary32 values.
class EmbeddingStore
{
 public:
  static constexpr std::uint32_t kVersion = 1;

  EmbeddingStore() = default;
  EmbeddingStore(std::vector<std::uint64_t> ids, EmbeddingMatrix values, bool normalized);

  Eigen::Index dimension() const { return values_.cols(); }
  std::size_t size() const { return ids_.size(); }
  bool normalized() const { return normalized_; }
  const std::vector<std::uint64_t>& ids() const { return ids_; }
  const EmbeddingMatrix& values() const { return values_; }

  std::optional<Eigen::Index> find(std::uint64_t id) const;
  /// Row for `id` widened to double; throws when absent.
  VectorX<double> vector(std::uint64_t id) const;

 private:
  std::vector<std::uint64_t> ids_;
  EmbeddingMatrix values_;
  bool normalized_ = false;
  std::unordered_map<std::uint64_t, Eigen::Index> index_;
};

EmbeddingStore read_store(const std::filesystem::path& path);
void write_store(const EmbeddingStore& store, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_store(const EmbeddingStore& store);
EmbeddingStore decode_store(std::vector<std::uint8_t> bytes);

/// Text fixture variant: header "id,v0,...,v{D-1}", one row per vector. Never flagged normalized.
EmbeddingStore read_store_csv(const std::filesystem::path& path);
void write_store_csv(const EmbeddingStore& store, const std::filesystem::path& path);

/// Unit-norm copy of `v`. Throws "degenerate embedding" for a zero (or non-finite) vector.
template <typename Derived>
typename Derived::PlainObject l2_normalize(const Eigen::MatrixBase<Derived>& v)
{
  const auto norm = v.norm();
  if (!(norm > 0) || !std::isfinite(static_cast<double>(norm))) throw Error("degenerate embedding");
  return v / norm;
}

/// Row-wise normalization computed in double, stored back as float.
EmbeddingStore normalized(const EmbeddingStore& store);

/// Articles paired row-for-row with their embeddings, ordered by date then id.
struct JoinedCorpus
{
  std::vector<Article> articles;
  MatrixX<double> embeddings;
  std::size_t unmatched_articles = 0;
  std::size_t unmatched_embeddings = 0;

  std::size_t size() const { return articles.size(); }
};

JoinedCorpus join(std::vector<Article> articles, const EmbeddingStore& store);

}  // namespace outlook

#endif  // OUTLOOK_EMBEDDING_HPP_
