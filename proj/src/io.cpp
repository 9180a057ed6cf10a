#include "outlook/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace outlook
{

void BinaryWriter::save(const std::filesystem::path& path) const
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes_.data()), static_cast<std::streamsize>(bytes_.size()));
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

BinaryReader BinaryReader::open(const std::filesystem::path& path) { return BinaryReader(read_bytes(path)); }

void BinaryReader::expect_magic(std::string_view m)
{
  if (remaining() < m.size()) throw FormatError("truncated header", pos_);
  if (std::string_view(reinterpret_cast<const char*>(bytes_.data() + pos_), m.size()) != m)
    throw FormatError("magic mismatch, expected '" + std::string(m) + "'", pos_);
  pos_ += m.size();
}

void BinaryReader::skip(std::size_t n)
{
  if (remaining() < n) throw FormatError("truncated file", pos_);
  pos_ += n;
}

std::string BinaryReader::str()
{
  const std::uint32_t n = u32();
  if (remaining() < n) throw FormatError("truncated string", pos_);
  std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
  pos_ += n;
  return s;
}

void BinaryReader::expect_end() const
{
  if (remaining() != 0) throw FormatError("trailing bytes after last record", pos_);
}

std::uint64_t BinaryReader::get(int n)
{
  if (remaining() < static_cast<std::size_t>(n)) throw FormatError("truncated file", pos_);
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
  pos_ += n;
  return v;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

std::string file_fingerprint(const std::filesystem::path& path)
{
  const auto bytes = read_bytes(path);
  const std::uint64_t h =
      fnv1a(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string csv_escape(std::string_view field)
{
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> csv_split(std::string_view line)
{
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::size_t CsvTable::column(std::string_view name) const
{
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw Error("CSV column '" + std::string(name) + "' not found");
}

CsvTable read_csv(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      table.header = csv_split(line);
      first = false;
    } else {
      table.rows.push_back(csv_split(line));
      if (table.rows.back().size() != table.header.size())
        throw Error("CSV row " + std::to_string(table.rows.size()) + " of '" + path.string() +
                    "' has the wrong number of fields");
    }
  }
  return table;
}

double parse_double(std::string_view s)
{
  const std::string t = trim(s);
  double v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw Error("not a number: '" + std::string(s) + "'");
  return v;
}

std::uint64_t parse_u64(std::string_view s)
{
  const std::string t = trim(s);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw Error("not an unsigned integer: '" + std::string(s) + "'");
  return v;
}

std::vector<std::string> split(std::string_view s, char sep)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(std::string_view s)
{
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::string format_double(double v)
{
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace outlook
