#ifndef OUTLOOK_CORPUS_HPP_
#define OUTLOOK_CORPUS_HPP_

#include "outlook/calendar.hpp"
#include "outlook/common.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace outlook
{

enum class PubType { print, online };
enum class Language { de, fr };

PubType parse_pubtype(std::string_view s);
Language parse_language(std::string_view s);
std::string to_string(PubType p);
std::string to_string(Language l);

/// One cleaned news item. Immutable once ingested.
struct Article
{
  std::uint64_t id = 0;
  Date date{};
  std::string outlet;
  PubType pubtype = PubType::print;
  Language language = Language::de;
  std::optional<std::string> section;
  std::string title;
  std::string body;

  /// Title, newline, body; empty segments omitted.
  std::string text() const;

  bool operator==(const Article&) const = default;
};

/// Raised by clean_markup for unclosed, mismatched or truncated tags.
class MarkupError : public FormatError
{
 public:
  using FormatError::FormatError;
};

struct CleanedText
{
  std::string title;
  std::string body;

  std::string joined() const;
};

/// Strips the markup subset (title, p, table, box; other tags are stripped but kept
/// transparent). table and box subtrees are dropped entirely, whitespace collapses to
/// single spaces, and &lt; &gt; &amp; &quot; &apos; are decoded.
CleanedText clean_markup(std::string_view raw);
std::string clean_text(std::string_view raw);

/// Inverse of clean_markup for already-clean text.
std::string to_markup(std::string_view title, std::string_view body);

struct CorpusFilter
{
  std::optional<Date> date_from = Date{std::chrono::year{1999}, std::chrono::January, std::chrono::day{1}};
  std::optional<Date> date_to;
  std::set<Language> languages;  // empty accepts all
  std::set<PubType> pubtypes;    // empty accepts all
  std::optional<std::set<std::string>> outlets;

  void validate() const;
  bool accepts(const Article& a) const;

  /// Parses "key=value" pairs separated by ';' or whitespace. Keys: date_from, date_to,
  /// languages, pubtypes, outlets (list values comma separated). "date_from=none" clears the
  /// default lower bound.
  static CorpusFilter parse(std::string_view text);
};

struct IngestStats
{
  std::size_t records = 0;
  std::size_t kept = 0;
  std::size_t filtered_out = 0;
  std::size_t skipped_malformed = 0;
  std::vector<std::string> messages;  // one per skipped record
};

/// One JSON object per line: id, date, outlet, pubtype, language, section, content.
Article parse_record(std::string_view line);
std::string to_record(const Article& a);

/// Streams cleaned, filtered articles in file order. Malformed records are counted and
/// skipped; an unreadable file or a duplicate id throws.
IngestStats ingest(const std::filesystem::path& path, const CorpusFilter& filter,
                   const std::function<void(Article&&)>& sink);

std::vector<Article> ingest_all(const std::filesystem::path& path, const CorpusFilter& filter = {},
                                IngestStats* stats = nullptr);

void write_corpus(const std::filesystem::path& path, std::span<const Article> articles);

}  // namespace outlook

#endif  // OUTLOOK_CORPUS_HPP_
