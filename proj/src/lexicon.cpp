#include "outlook/lexicon.hpp"

#include "outlook/io.hpp"

namespace outlook
{

void SentimentLexicon::validate() const
{
  if (positive.empty() || negative.empty()) throw Error("lexicon needs positive and negative terms");
  for (const auto& p : positive)
    for (const auto& n : negative)
      if (p.tokens == n.tokens && p.prefix == n.prefix) throw Error("lexicon term in both sets");
}

SentimentLexicon parse_lexicon(std::string_view text, Language language)
{
  SentimentLexicon lex;
  lex.language = language;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw Error("lexicon line " + std::to_string(line_no) + ": expected term<TAB>polarity");
    const std::string polarity = fold_case(trim(line.substr(tab + 1)));
    Term term = Term::parse(trim(line.substr(0, tab)));
    if (term.tokens.empty()) throw Error("lexicon line " + std::to_string(line_no) + ": empty term");
    if (polarity == "positive" || polarity == "+1" || polarity == "1")
      lex.positive.push_back(std::move(term));
    else if (polarity == "negative" || polarity == "-1")
      lex.negative.push_back(std::move(term));
    else
      throw Error("lexicon line " + std::to_string(line_no) + ": unknown polarity '" + polarity + "'");
  }
  lex.validate();
  return lex;
}

SentimentLexicon read_lexicon(const std::filesystem::path& path, Language language)
{
  return parse_lexicon(read_text(path), language);
}

double lexicon_score(std::string_view text, const SentimentLexicon& lex)
{
  const auto tokens = tokenize(text);
  std::size_t pos = 0, neg = 0;
  for (const auto& t : lex.positive) pos += count_matches(tokens, t);
  for (const auto& t : lex.negative) neg += count_matches(tokens, t);
  if (pos + neg == 0) return 0.0;
  return (static_cast<double>(pos) - static_cast<double>(neg)) / static_cast<double>(pos + neg);
}

LexiconScores lexicon_scores(std::span<const Article> articles, const SentimentLexicon& lex)
{
  LexiconScores out;
  for (const auto& a : articles) {
    if (a.language != lex.language) {
      ++out.skipped_language;
      continue;
    }
    out.scored.push_back({a.id, a.date, lexicon_score(a.text(), lex)});
  }
  return out;
}

IndicatorSeries lexicon_indicator(std::span<const Article> articles, const SentimentLexicon& lex)
{
  const auto s = lexicon_scores(articles, lex);
  return aggregate(s.scored, Frequency::monthly);
}

}  // namespace outlook
