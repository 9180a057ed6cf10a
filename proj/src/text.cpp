#include "outlook/text.hpp"

namespace outlook
{

namespace
{

bool is_word_byte(unsigned char c)
{
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

}  // namespace

std::string fold_case(std::string_view s)
{
  std::string out(s);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto c = static_cast<unsigned char>(out[i]);
    if (c >= 'A' && c <= 'Z') {
      out[i] = static_cast<char>(c + 32);
    } else if (c == 0xC3 && i + 1 < out.size()) {
      // U+00C0..U+00DE map to U+00E0..U+00FE, except U+00D7 (multiplication sign).
      auto n = static_cast<unsigned char>(out[i + 1]);
      if (n >= 0x80 && n <= 0x9E && n != 0x97) out[i + 1] = static_cast<char>(n + 0x20);
      ++i;
    }
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view s)
{
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && !is_word_byte(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && is_word_byte(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) tokens.push_back(fold_case(s.substr(start, i - start)));
  }
  return tokens;
}

Term Term::parse(std::string_view text)
{
  Term t;
  std::string_view body = text;
  while (!body.empty() && (body.back() == ' ' || body.back() == '\t')) body.remove_suffix(1);
  if (!body.empty() && body.back() == '*') {
    t.prefix = true;
    body.remove_suffix(1);
  }
  t.tokens = tokenize(body);
  if (t.tokens.empty()) t.prefix = false;
  return t;
}

bool Term::matches_at(const std::vector<std::string>& text, std::size_t pos) const
{
  if (tokens.empty() || pos + tokens.size() > text.size()) return false;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    const std::string& want = tokens[k];
    const std::string& have = text[pos + k];
    const bool last = k + 1 == tokens.size();
    if (last && prefix) {
      if (have.compare(0, want.size(), want) != 0) return false;
    } else if (have != want) {
      return false;
    }
  }
  return true;
}

std::size_t count_matches(const std::vector<std::string>& text, const Term& term)
{
  std::size_t n = 0;
  for (std::size_t i = 0; i < text.size(); ++i)
    if (term.matches_at(text, i)) ++n;
  return n;
}

bool contains(const std::vector<std::string>& text, const Term& term)
{
  for (std::size_t i = 0; i < text.size(); ++i)
    if (term.matches_at(text, i)) return true;
  return false;
}

}  // namespace outlook
