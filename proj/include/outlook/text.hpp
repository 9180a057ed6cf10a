#ifndef OUTLOOK_TEXT_HPP_
#define OUTLOOK_TEXT_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace outlook
{

/// Lower-cases ASCII and the UTF-8 encoded Latin-1 capitals (Ä, É, Ü, ...).
std::string fold_case(std::string_view s);

/// Case-folded word tokens. ASCII letters/digits and all non-ASCII bytes are word
/// characters; everything else separates (so "l'économie" yields "l", "économie").
std::vector<std::string> tokenize(std::string_view s);

/// A whole-word search term: one or more tokens matched as a consecutive phrase.
/// A trailing '*' on the last token turns it into a prefix match ("zoll*" hits "zolltarif").
struct Term
{
  std::vector<std::string> tokens;
  bool prefix = false;

  static Term parse(std::string_view text);
  bool matches_at(const std::vector<std::string>& text, std::size_t pos) const;
};

std::size_t count_matches(const std::vector<std::string>& text, const Term& term);
bool contains(const std::vector<std::string>& text, const Term& term);

}  // namespace outlook

#endif  // OUTLOOK_TEXT_HPP_
