#include "support.hpp"

#include "outlook/corpus.hpp"
#include "outlook/io.hpp"
#include "outlook/synthetic.hpp"

#include <doctest.h>

using namespace outlook;

namespace
{

std::string record(std::uint64_t id, const std::string& date, const std::string& language, const std::string& content,
                   const std::string& section = "Wirtschaft")
{
  return "{\"id\":" + std::to_string(id) + ",\"date\":\"" + date + "\",\"outlet\":\"Blatt\",\"pubtype\":\"print\",\"language\":\"" +
         language + "\",\"section\":\"" + section + "\",\"content\":\"" + content + "\"}\n";
}

// Oracle: no '<' survives cleaning of well-formed input.
bool tag_free(const std::string& s) { return s.find('<') == std::string::npos && s.find('>') == std::string::npos; }

}  // namespace

TEST_CASE("clean_text drops tables and boxes and joins title and body")
{
  CHECK(clean_text("<title>A</title><p>B</p><table>X</table>") == "A\nB");
  CHECK(clean_text("<title>T</title><p>a <box>drop</box> b</p>") == "T\na b");
  CHECK(clean_text("<p>no title</p>") == "no title");
  CHECK(tag_free(clean_text("<p>no title</p>")));
}

TEST_CASE("clean_text collapses whitespace, decodes entities and nests removals")
{
  CHECK(clean_text("<title> Zoll  und\tHandel </title><p>x &amp; y &lt;z&gt;</p>") == "Zoll und Handel\nx & y <z>");
  CHECK(clean_text("<p>a<table><box>deep</box><p>row</p></table>b</p>") == "a b");
  CHECK(clean_text("<title>Only</title>") == "Only");
  CHECK(clean_text("") == "");
}

TEST_CASE("malformed markup is a recoverable error with an offset")
{
  CHECK_THROWS_AS(clean_text("<p>open"), MarkupError);
  CHECK_THROWS_AS(clean_text("<p>a</box>"), MarkupError);
  CHECK_THROWS_AS(clean_text("<p"), MarkupError);
  try {
    clean_text("<p>x</title>");
    FAIL("expected MarkupError");
  } catch (const MarkupError& e) {
    CHECK(e.offset() > 0);
  }
}

TEST_CASE("clean_text is idempotent on its own output")
{
  const std::string raw = "<title>Die Lage</title><p>Export <box>Kasten</box> steigt &amp; fällt</p>";
  const auto once = clean_markup(raw);
  const auto twice = clean_markup(to_markup(once.title, once.body));
  CHECK(twice.title == once.title);
  CHECK(twice.body == once.body);
}

TEST_CASE("ingest filters by language and keeps file order")
{
  test::TempDir dir;
  write_text(dir / "c.jsonl", record(3, "2010-01-05", "de", "<p>eins</p>") + record(1, "2010-01-06", "fr", "<p>deux</p>") +
                                  record(2, "2010-01-07", "de", "<p>drei</p>"));
  const auto f = CorpusFilter::parse("languages=de");
  IngestStats stats;
  const auto a = ingest_all(dir / "c.jsonl", f, &stats);
  REQUIRE(a.size() == 2);
  CHECK(a[0].id == 3);
  CHECK(a[1].id == 2);
  CHECK(stats.skipped_malformed == 0);
  CHECK(stats.filtered_out == 1);
}

TEST_CASE("ingest of an empty file yields nothing")
{
  test::TempDir dir;
  write_text(dir / "e.jsonl", "");
  IngestStats stats;
  CHECK(ingest_all(dir / "e.jsonl", {}, &stats).empty());
  CHECK(stats.skipped_malformed == 0);
  CHECK_THROWS_AS(ingest_all(dir / "missing.jsonl"), Error);
}

TEST_CASE("one malformed line among ten is skipped and counted")
{
  test::TempDir dir;
  std::string text;
  for (int i = 1; i <= 10; ++i)
    text += i == 6 ? "{\"id\": 6, \"date\": \"2010-13-01\"}\n" : record(static_cast<std::uint64_t>(i), "2010-02-01", "de", "<p>x</p>");
  write_text(dir / "c.jsonl", text);
  IngestStats stats;
  const auto a = ingest_all(dir / "c.jsonl", {}, &stats);
  CHECK(a.size() == 9);
  CHECK(stats.skipped_malformed == 1);
  CHECK(stats.messages.size() == 1);
}

TEST_CASE("records with broken markup are skipped, not fatal")
{
  test::TempDir dir;
  write_text(dir / "c.jsonl", record(1, "2010-01-01", "de", "<p>ok</p>") + record(2, "2010-01-01", "de", "<p>broken"));
  IngestStats stats;
  CHECK(ingest_all(dir / "c.jsonl", {}, &stats).size() == 1);
  CHECK(stats.skipped_malformed == 1);
}

TEST_CASE("duplicate ids are a hard error")
{
  test::TempDir dir;
  write_text(dir / "c.jsonl", record(1, "2010-01-01", "de", "<p>a</p>") + record(1, "2010-01-02", "de", "<p>b</p>"));
  CHECK_THROWS_AS(ingest_all(dir / "c.jsonl"), Error);
}

TEST_CASE("default date floor and explicit ranges")
{
  test::TempDir dir;
  write_text(dir / "c.jsonl", record(1, "1998-12-31", "de", "<p>a</p>") + record(2, "1999-01-01", "de", "<p>b</p>") +
                                  record(3, "2005-06-01", "de", "<p>c</p>"));
  CHECK(ingest_all(dir / "c.jsonl").size() == 2);
  CHECK(ingest_all(dir / "c.jsonl", CorpusFilter::parse("date_from=none")).size() == 3);
  CHECK(ingest_all(dir / "c.jsonl", CorpusFilter::parse("date_to=2000-01-01")).size() == 1);
  CHECK_THROWS_AS(CorpusFilter::parse("date_from=2005-01-01 date_to=2004-01-01"), Error);
  CHECK_THROWS_AS(CorpusFilter::parse("colour=red"), Error);
}

TEST_CASE("empty body after cleaning is kept")
{
  test::TempDir dir;
  write_text(dir / "c.jsonl", record(1, "2010-01-01", "de", "<title>Nur Titel</title><table>t</table>"));
  const auto a = ingest_all(dir / "c.jsonl");
  REQUIRE(a.size() == 1);
  CHECK(a[0].body.empty());
  CHECK(a[0].text() == "Nur Titel");
}

TEST_CASE("write then ingest preserves every field")
{
  SyntheticOptions o;
  o.articles = 60;
  o.months = 3;
  const auto world = make_synthetic_world(o);
  test::TempDir dir;
  write_corpus(dir / "c.jsonl", world.articles);
  const auto back = ingest_all(dir / "c.jsonl", CorpusFilter::parse("date_from=none"));
  REQUIRE(back.size() == world.articles.size());
  for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == world.articles[i]);
  CHECK(std::any_of(back.begin(), back.end(), [](const Article& a) { return !a.section; }));
}

TEST_CASE("filtering commutes with ingestion")
{
  SyntheticOptions o;
  o.articles = 80;
  o.months = 4;
  const auto world = make_synthetic_world(o);
  test::TempDir dir;
  write_corpus(dir / "c.jsonl", world.articles);
  const auto f = CorpusFilter::parse("date_from=2010-02-01 languages=fr pubtypes=print");
  const auto filtered = ingest_all(dir / "c.jsonl", f);
  std::vector<Article> manual;
  for (const auto& a : ingest_all(dir / "c.jsonl", CorpusFilter::parse("date_from=none")))
    if (f.accepts(a)) manual.push_back(a);
  CHECK(filtered == manual);
}
