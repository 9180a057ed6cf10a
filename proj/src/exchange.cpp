#include "outlook/exchange.hpp"

#include "outlook/io.hpp"

#include <json.hpp>

#include <unordered_set>

namespace outlook
{

std::vector<EmbedRequest> embed_requests(std::span<const Article> articles)
{
  std::vector<EmbedRequest> out;
  out.reserve(articles.size());
  for (const auto& a : articles) {
    auto text = a.text();
    if (text.empty()) throw Error("article " + std::to_string(a.id) + " has no text to embed");
    out.push_back({a.id, std::move(text), a.language});
  }
  return out;
}

void write_embed_requests(const std::filesystem::path& path, std::span<const EmbedRequest> requests)
{
  std::string out;
  for (const auto& r : requests) {
    nlohmann::ordered_json j;
    j["article_id"] = r.article_id;
    j["text"] = r.text;
    j["language"] = to_string(r.language);
    out += j.dump() + "\n";
  }
  write_text(path, out);
}

std::vector<EmbedRequest> read_embed_requests(const std::filesystem::path& path)
{
  std::vector<EmbedRequest> out;
  std::unordered_set<std::uint64_t> seen;
  std::size_t line_no = 0;
  for (const auto& line : split(read_text(path), '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      EmbedRequest r{j.at("article_id").get<std::uint64_t>(), j.at("text").get<std::string>(),
                     parse_language(j.value("language", std::string("de")))};
      if (r.text.empty()) throw Error("empty text");
      if (!seen.insert(r.article_id).second) throw Error("duplicate article_id " + std::to_string(r.article_id));
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(where + ": " + e.what());
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
  }
  return out;
}

}  // namespace outlook
