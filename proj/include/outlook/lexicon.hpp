#ifndef OUTLOOK_LEXICON_HPP_
#define OUTLOOK_LEXICON_HPP_

#include "outlook/corpus.hpp"
#include "outlook/indicator.hpp"
#include "outlook/text.hpp"

#include <filesystem>
#include <vector>

namespace outlook
{

struct SentimentLexicon
{
  Language language = Language::de;
  std::vector<Term> positive;
  std::vector<Term> negative;

  /// Throws when a set is empty or a term is in both sets.
  void validate() const;
  SentimentLexicon swapped() const { return {language, negative, positive}; }
};

/// Lines `term<TAB>polarity` with polarity positive/negative (or +1/-1); `#` starts a comment.
SentimentLexicon parse_lexicon(std::string_view text, Language language);
SentimentLexicon read_lexicon(const std::filesystem::path& path, Language language);

/// (pos - neg) / (pos + neg) over whole-word matches in the folded text; 0 without matches.
double lexicon_score(std::string_view text, const SentimentLexicon& lex);

struct LexiconScores
{
  std::vector<ScoredArticle> scored;  // prob carries the score in [-1, 1]
  std::size_t skipped_language = 0;
};

/// Articles in another language than the lexicon are skipped and counted.
LexiconScores lexicon_scores(std::span<const Article> articles, const SentimentLexicon& lex);

/// Monthly mean of article scores.
IndicatorSeries lexicon_indicator(std::span<const Article> articles, const SentimentLexicon& lex);

}  // namespace outlook

#endif  // OUTLOOK_LEXICON_HPP_
