#include "outlook/embedding.hpp"

#include "outlook/io.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

namespace outlook
{

EmbeddingStore::EmbeddingStore(std::vector<std::uint64_t> ids, EmbeddingMatrix values, bool normalized)
    : ids_(std::move(ids)), values_(std::move(values)), normalized_(normalized)
{
  if (static_cast<Eigen::Index>(ids_.size()) != values_.rows())
    throw DimensionError("embedding store: " + std::to_string(ids_.size()) + " ids for " +
                         std::to_string(values_.rows()) + " vectors");
  if (values_.cols() == 0) throw DimensionError("embedding store: dimension 0");
  if (!values_.allFinite()) {
    for (Eigen::Index r = 0; r < values_.rows(); ++r)
      if (!values_.row(r).allFinite()) throw Error("non-finite value at record " + std::to_string(r));
  }
  index_.reserve(ids_.size());
  for (std::size_t r = 0; r < ids_.size(); ++r) {
    if (!index_.emplace(ids_[r], static_cast<Eigen::Index>(r)).second)
      throw Error("duplicate embedding id " + std::to_string(ids_[r]));
  }
  if (normalized_) {
    for (Eigen::Index r = 0; r < values_.rows(); ++r) {
      const double n = values_.row(r).cast<double>().norm();
      if (std::abs(n - 1.0) > 1e-5)
        throw Error("record " + std::to_string(r) + " flagged normalized but has norm " + format_double(n));
    }
  }
}

std::optional<Eigen::Index> EmbeddingStore::find(std::uint64_t id) const
{
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VectorX<double> EmbeddingStore::vector(std::uint64_t id) const
{
  const auto row = find(id);
  if (!row) throw Error("no embedding for id " + std::to_string(id));
  return values_.row(*row).transpose().cast<double>();
}

std::vector<std::uint8_t> encode_store(const EmbeddingStore& store)
{
  BinaryWriter w;
  w.magic("EMB1");
  w.u32(EmbeddingStore::kVersion);
  w.u32(static_cast<std::uint32_t>(store.dimension()));
  w.u64(store.size());
  w.u8(store.normalized() ? 1 : 0);
  w.zeros(7);
  const auto& values = store.values();
  for (std::size_t r = 0; r < store.size(); ++r) {
    w.u64(store.ids()[r]);
    for (Eigen::Index c = 0; c < store.dimension(); ++c) w.f32(values(static_cast<Eigen::Index>(r), c));
  }
  return w.bytes();
}

EmbeddingStore decode_store(std::vector<std::uint8_t> bytes)
{
  BinaryReader r(std::move(bytes));
  r.expect_magic("EMB1");
  const std::size_t version_at = r.offset();
  const std::uint32_t version = r.u32();
  if (version != EmbeddingStore::kVersion)
    throw FormatError("unsupported embedding store version " + std::to_string(version), version_at);
  const std::size_t dim_at = r.offset();
  const std::uint32_t dim = r.u32();
  if (dim == 0) throw FormatError("embedding dimension 0", dim_at);
  const std::uint64_t count = r.u64();
  const bool normalized = r.u8() != 0;
  r.skip(7);
  const std::uint64_t record_bytes = 8 + 4ull * dim;
  if (r.remaining() / record_bytes < count)
    throw FormatError("truncated file: header declares " + std::to_string(count) + " records but only " +
                          std::to_string(r.remaining() / record_bytes) + " are present",
                      r.offset() + (r.remaining() / record_bytes) * record_bytes);
  if (r.remaining() != count * record_bytes)
    throw FormatError("record count mismatch: trailing bytes after " + std::to_string(count) + " records",
                      r.offset() + count * record_bytes);

  std::vector<std::uint64_t> ids(count);
  EmbeddingMatrix values(static_cast<Eigen::Index>(count), dim);
  for (std::uint64_t k = 0; k < count; ++k) {
    ids[k] = r.u64();
    const std::size_t at = r.offset();
    for (std::uint32_t c = 0; c < dim; ++c) values(static_cast<Eigen::Index>(k), c) = r.f32();
    if (!values.row(static_cast<Eigen::Index>(k)).allFinite())
      throw FormatError("non-finite value at record " + std::to_string(k), at);
  }
  return EmbeddingStore(std::move(ids), std::move(values), normalized);
}

EmbeddingStore read_store(const std::filesystem::path& path) { return decode_store(read_bytes(path)); }

void write_store(const EmbeddingStore& store, const std::filesystem::path& path)
{
  const auto bytes = encode_store(store);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

EmbeddingStore read_store_csv(const std::filesystem::path& path)
{
  const CsvTable t = read_csv(path);
  if (t.header.size() < 2 || t.header[0] != "id") throw Error("embedding CSV must start with id,v0,...");
  const auto dim = static_cast<Eigen::Index>(t.header.size() - 1);
  std::vector<std::uint64_t> ids;
  EmbeddingMatrix values(static_cast<Eigen::Index>(t.rows.size()), dim);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    ids.push_back(parse_u64(t.rows[r][0]));
    for (Eigen::Index c = 0; c < dim; ++c)
      values(static_cast<Eigen::Index>(r), c) = static_cast<float>(parse_double(t.rows[r][c + 1]));
    if (!values.row(static_cast<Eigen::Index>(r)).allFinite())
      throw Error("non-finite value at record " + std::to_string(r));
  }
  return EmbeddingStore(std::move(ids), std::move(values), false);
}

void write_store_csv(const EmbeddingStore& store, const std::filesystem::path& path)
{
  std::string out = "id";
  for (Eigen::Index c = 0; c < store.dimension(); ++c) out += ",v" + std::to_string(c);
  out += '\n';
  for (std::size_t r = 0; r < store.size(); ++r) {
    out += std::to_string(store.ids()[r]);
    for (Eigen::Index c = 0; c < store.dimension(); ++c)
      out += "," + format_double(store.values()(static_cast<Eigen::Index>(r), c));
    out += '\n';
  }
  write_text(path, out);
}

EmbeddingStore normalized(const EmbeddingStore& store)
{
  EmbeddingMatrix values(store.values().rows(), store.values().cols());
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    try {
      values.row(r) = l2_normalize(store.values().row(r).cast<double>()).cast<float>();
    } catch (const Error&) {
      throw Error("degenerate embedding for id " + std::to_string(store.ids()[static_cast<std::size_t>(r)]));
    }
  }
  return EmbeddingStore(store.ids(), std::move(values), true);
}

JoinedCorpus join(std::vector<Article> articles, const EmbeddingStore& store)
{
  JoinedCorpus out;
  std::vector<std::pair<std::size_t, Eigen::Index>> matched;
  std::size_t matched_embeddings = 0;
  for (std::size_t i = 0; i < articles.size(); ++i) {
    if (auto row = store.find(articles[i].id)) {
      matched.emplace_back(i, *row);
      ++matched_embeddings;
    } else {
      ++out.unmatched_articles;
    }
  }
  std::stable_sort(matched.begin(), matched.end(), [&](const auto& a, const auto& b) {
    const Article& x = articles[a.first];
    const Article& y = articles[b.first];
    if (x.date != y.date) return x.date < y.date;
    return x.id < y.id;
  });
  out.unmatched_embeddings = store.size() - matched_embeddings;
  out.embeddings.resize(static_cast<Eigen::Index>(matched.size()), store.dimension());
  out.articles.reserve(matched.size());
  for (std::size_t k = 0; k < matched.size(); ++k) {
    out.embeddings.row(static_cast<Eigen::Index>(k)) = store.values().row(matched[k].second).cast<double>();
    out.articles.push_back(std::move(articles[matched[k].first]));
  }
  return out;
}

}  // namespace outlook
