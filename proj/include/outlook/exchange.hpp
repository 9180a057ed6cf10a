#ifndef OUTLOOK_EXCHANGE_HPP_
#define OUTLOOK_EXCHANGE_HPP_

#include "outlook/corpus.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace outlook
{

/// One text handed to an external embedder. Replies come back as an EMB1 store keyed by
/// article_id.
struct EmbedRequest
{
  std::uint64_t article_id = 0;
  std::string text;  // non-empty
  Language language = Language::de;
};

std::vector<EmbedRequest> embed_requests(std::span<const Article> articles);

/// One JSON object per line: article_id, text, language.
void write_embed_requests(const std::filesystem::path& path, std::span<const EmbedRequest> requests);
std::vector<EmbedRequest> read_embed_requests(const std::filesystem::path& path);

}  // namespace outlook

#endif  // OUTLOOK_EXCHANGE_HPP_
