#include "outlook/corpus.hpp"

#include "outlook/io.hpp"

#include <json.hpp>

#include <fstream>
#include <unordered_set>

namespace outlook
{

PubType parse_pubtype(std::string_view s)
{
  if (s == "print") return PubType::print;
  if (s == "online") return PubType::online;
  throw Error("unknown pubtype '" + std::string(s) + "'");
}

Language parse_language(std::string_view s)
{
  if (s == "de") return Language::de;
  if (s == "fr") return Language::fr;
  throw Error("unknown language '" + std::string(s) + "'");
}

std::string to_string(PubType p) { return p == PubType::print ? "print" : "online"; }
std::string to_string(Language l) { return l == Language::de ? "de" : "fr"; }

std::string Article::text() const { return CleanedText{title, body}.joined(); }

std::string CleanedText::joined() const
{
  if (title.empty()) return body;
  if (body.empty()) return title;
  return title + "\n" + body;
}

namespace
{

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string collapse_whitespace(std::string_view s)
{
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
    } else {
      if (pending) out += ' ';
      pending = false;
      out += c;
    }
  }
  return out;
}

std::string lower_ascii(std::string_view s)
{
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  return out;
}

struct Entity
{
  std::string_view name;
  char value;
};

constexpr Entity kEntities[] = {{"&lt;", '<'}, {"&gt;", '>'}, {"&amp;", '&'}, {"&quot;", '"'}, {"&apos;", '\''}};

}  // namespace

CleanedText clean_markup(std::string_view raw)
{
  struct Open
  {
    std::string name;
    std::size_t offset;
  };
  std::vector<Open> stack;
  std::size_t dropping = 0;
  std::size_t in_title = 0;
  std::string title;
  std::string body;

  auto sink = [&]() -> std::string& { return in_title > 0 ? title : body; };

  std::size_t i = 0;
  while (i < raw.size()) {
    const char c = raw[i];
    if (c == '<') {
      const std::size_t close = raw.find('>', i);
      if (close == std::string_view::npos) throw MarkupError("unterminated tag", i);
      std::string_view inner = raw.substr(i + 1, close - i - 1);
      if (!inner.empty() && (inner[0] == '!' || inner[0] == '?')) {
        i = close + 1;
        continue;
      }
      const bool closing = !inner.empty() && inner[0] == '/';
      const bool self_closing = !closing && !inner.empty() && inner.back() == '/';
      if (closing) inner.remove_prefix(1);
      if (self_closing) inner.remove_suffix(1);
      const std::size_t name_end = inner.find_first_of(" \t\r\n");
      const std::string name = lower_ascii(inner.substr(0, name_end));
      if (name.empty()) throw MarkupError("empty tag name", i);

      if (dropping == 0) sink() += ' ';
      if (closing) {
        if (stack.empty() || stack.back().name != name)
          throw MarkupError("mismatched closing tag </" + name + ">", i);
        if (name == "table" || name == "box") --dropping;
        if (name == "title") --in_title;
        stack.pop_back();
      } else if (!self_closing) {
        stack.push_back({name, i});
        if (name == "table" || name == "box") ++dropping;
        if (name == "title") ++in_title;
      }
      i = close + 1;
      continue;
    }
    if (dropping > 0) {
      ++i;
      continue;
    }
    if (c == '&') {
      bool decoded = false;
      for (const auto& e : kEntities) {
        if (raw.substr(i, e.name.size()) == e.name) {
          sink() += e.value;
          i += e.name.size();
          decoded = true;
          break;
        }
      }
      if (decoded) continue;
    }
    sink() += c;
    ++i;
  }
  if (!stack.empty()) throw MarkupError("unclosed tag <" + stack.back().name + ">", stack.back().offset);
  return {collapse_whitespace(title), collapse_whitespace(body)};
}

std::string clean_text(std::string_view raw) { return clean_markup(raw).joined(); }

namespace
{

std::string escape_markup(std::string_view s)
{
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string to_markup(std::string_view title, std::string_view body)
{
  std::string out;
  if (!title.empty()) out += "<title>" + escape_markup(title) + "</title>";
  if (!body.empty()) out += "<p>" + escape_markup(body) + "</p>";
  return out;
}

void CorpusFilter::validate() const
{
  if (date_from && date_to && *date_to < *date_from) throw Error("corpus filter: date_from after date_to");
}

bool CorpusFilter::accepts(const Article& a) const
{
  if (date_from && a.date < *date_from) return false;
  if (date_to && a.date > *date_to) return false;
  if (!languages.empty() && !languages.contains(a.language)) return false;
  if (!pubtypes.empty() && !pubtypes.contains(a.pubtype)) return false;
  if (outlets && !outlets->contains(a.outlet)) return false;
  return true;
}

CorpusFilter CorpusFilter::parse(std::string_view text)
{
  CorpusFilter f;
  std::string normalized(text);
  for (char& c : normalized)
    if (c == ';' || c == '\t' || c == '\n') c = ' ';
  for (const auto& pair : split(normalized, ' ')) {
    if (pair.empty()) continue;
    const auto eq = pair.find('=');
    if (eq == std::string::npos) throw Error("corpus filter: expected key=value, got '" + pair + "'");
    const std::string key = trim(pair.substr(0, eq));
    const std::string value = trim(pair.substr(eq + 1));
    if (key == "date_from") {
      f.date_from = value == "none" ? std::nullopt : std::optional<Date>(parse_date(value));
    } else if (key == "date_to") {
      f.date_to = value == "none" ? std::nullopt : std::optional<Date>(parse_date(value));
    } else if (key == "languages") {
      for (const auto& v : split(value, ',')) f.languages.insert(parse_language(v));
    } else if (key == "pubtypes") {
      for (const auto& v : split(value, ',')) f.pubtypes.insert(parse_pubtype(v));
    } else if (key == "outlets") {
      f.outlets.emplace();
      for (const auto& v : split(value, ',')) f.outlets->insert(v);
    } else {
      throw Error("corpus filter: unknown key '" + key + "'");
    }
  }
  f.validate();
  return f;
}

Article parse_record(std::string_view line)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("malformed record: ") + e.what(), e.byte);
  }
  try {
    Article a;
    if (!j.at("id").is_number_unsigned()) throw Error("id must be an unsigned integer");
    a.id = j.at("id").get<std::uint64_t>();
    a.date = parse_date(j.at("date").get<std::string>());
    a.outlet = j.at("outlet").get<std::string>();
    a.pubtype = parse_pubtype(j.at("pubtype").get<std::string>());
    a.language = parse_language(j.at("language").get<std::string>());
    if (j.contains("section") && !j["section"].is_null()) a.section = j["section"].get<std::string>();
    auto cleaned = clean_markup(j.at("content").get<std::string>());
    a.title = std::move(cleaned.title);
    a.body = std::move(cleaned.body);
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed record: ") + e.what());
  }
}

std::string to_record(const Article& a)
{
  nlohmann::ordered_json j;
  j["id"] = a.id;
  j["date"] = format_date(a.date);
  j["outlet"] = a.outlet;
  j["pubtype"] = to_string(a.pubtype);
  j["language"] = to_string(a.language);
  j["section"] = a.section ? nlohmann::ordered_json(*a.section) : nlohmann::ordered_json(nullptr);
  j["content"] = to_markup(a.title, a.body);
  return j.dump();
}

IngestStats ingest(const std::filesystem::path& path, const CorpusFilter& filter,
                   const std::function<void(Article&&)>& sink)
{
  filter.validate();
  std::ifstream in(path);
  if (!in) throw Error("cannot read corpus file '" + path.string() + "'");
  IngestStats stats;
  std::unordered_set<std::uint64_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++stats.records;
    Article a;
    try {
      a = parse_record(line);
    } catch (const Error& e) {
      ++stats.skipped_malformed;
      stats.messages.push_back("line " + std::to_string(line_no) + ": " + e.what());
      continue;
    }
    if (!seen.insert(a.id).second)
      throw Error("duplicate article id " + std::to_string(a.id) + " at line " + std::to_string(line_no));
    if (!filter.accepts(a)) {
      ++stats.filtered_out;
      continue;
    }
    ++stats.kept;
    sink(std::move(a));
  }
  if (in.bad()) throw Error("read error in corpus file '" + path.string() + "'");
  return stats;
}

std::vector<Article> ingest_all(const std::filesystem::path& path, const CorpusFilter& filter, IngestStats* stats)
{
  std::vector<Article> out;
  IngestStats s = ingest(path, filter, [&](Article&& a) { out.push_back(std::move(a)); });
  if (stats) *stats = std::move(s);
  return out;
}

void write_corpus(const std::filesystem::path& path, std::span<const Article> articles)
{
  std::string text;
  for (const auto& a : articles) {
    text += to_record(a);
    text += '\n';
  }
  write_text(path, text);
}

}  // namespace outlook
