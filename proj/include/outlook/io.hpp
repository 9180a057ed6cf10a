#ifndef OUTLOOK_IO_HPP_
#define OUTLOOK_IO_HPP_

#include "outlook/common.hpp"

#include <bit>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace outlook
{

/// Little-endian byte sink for the versioned model and vector blobs.
class BinaryWriter
{
 public:
  void magic(std::string_view m) { bytes_.insert(bytes_.end(), m.begin(), m.end()); }
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void i32(std::int32_t v) { put(static_cast<std::uint32_t>(v), 4); }
  void f32(float v) { put(std::bit_cast<std::uint32_t>(v), 4); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void zeros(std::size_t n) { bytes_.insert(bytes_.end(), n, 0); }
  void str(std::string_view s)
  {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  template <typename Derived>
  void f64s(const Eigen::DenseBase<Derived>& m)
  {
    for (Eigen::Index i = 0; i < m.size(); ++i) f64(static_cast<double>(m.derived().data()[i]));
  }

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  void save(const std::filesystem::path& path) const;

 private:
  void put(std::uint64_t v, int n)
  {
    for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  std::vector<std::uint8_t> bytes_;
};

/// Little-endian reader; every underflow throws FormatError with the failing offset.
class BinaryReader
{
 public:
  explicit BinaryReader(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}
  static BinaryReader open(const std::filesystem::path& path);

  void expect_magic(std::string_view m);
  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(get(8)); }
  void skip(std::size_t n);
  std::string str();
  template <typename Derived>
  void f64s(Eigen::DenseBase<Derived>& m)
  {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.derived().data()[i] = f64();
  }

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  void expect_end() const;

 private:
  std::uint64_t get(int n);

  std::vector<std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

/// FNV-1a fingerprint of a file's bytes, as 16 hex digits.
std::string file_fingerprint(const std::filesystem::path& path);

/// Minimal CSV: comma separated, fields quoted with '"' when they contain ',', '"' or newlines.
std::string csv_escape(std::string_view field);
std::vector<std::string> csv_split(std::string_view line);

struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws when absent.
  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

double parse_double(std::string_view s);
std::uint64_t parse_u64(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string trim(std::string_view s);

}  // namespace outlook

#endif  // OUTLOOK_IO_HPP_
