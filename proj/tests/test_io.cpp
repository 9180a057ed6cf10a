#include "support.hpp"

#include "outlook/io.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace outlook;

TEST_CASE("binary writer and reader round-trip little-endian values")
{
  BinaryWriter w;
  w.magic("TEST");
  w.u32(0x01020304);
  w.u64(0xfedcba9876543210ull);
  w.i32(-5);
  w.f32(1.5f);
  w.f64(-0.1);
  w.str("zoll");
  CHECK(w.bytes()[4] == 0x04);
  CHECK(w.bytes()[7] == 0x01);

  BinaryReader r(w.bytes());
  r.expect_magic("TEST");
  CHECK(r.u32() == 0x01020304u);
  CHECK(r.u64() == 0xfedcba9876543210ull);
  CHECK(r.i32() == -5);
  CHECK(r.f32() == 1.5f);
  CHECK(r.f64() == -0.1);
  CHECK(r.str() == "zoll");
  r.expect_end();
  CHECK_THROWS_AS(r.u8(), FormatError);

  BinaryReader bad(w.bytes());
  CHECK_THROWS_AS(bad.expect_magic("NOPE"), FormatError);
}

TEST_CASE("format_double is shortest round-trip")
{
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.0, 0.0}) CHECK(parse_double(format_double(v)) == v);
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("number parsing rejects garbage")
{
  CHECK(parse_double(" 2.5 ") == 2.5);
  CHECK_THROWS_AS(parse_double("2.5x"), Error);
  CHECK_THROWS_AS(parse_double(""), Error);
  CHECK(parse_u64("42") == 42u);
  CHECK_THROWS_AS(parse_u64("-1"), Error);
}

TEST_CASE("csv quoting round-trips")
{
  const std::vector<std::string> fields{"plain", "a,b", "say \"hi\"", ""};
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + csv_escape(fields[i]);
  CHECK(csv_split(line) == fields);

  test::TempDir dir;
  write_text(dir / "t.csv", "a,b\n1,\"x,y\"\n");
  const auto t = read_csv(dir / "t.csv");
  CHECK(t.column("b") == 1u);
  CHECK(t.rows.at(0).at(1) == "x,y");
  CHECK_THROWS_AS(t.column("c"), Error);
}

TEST_CASE("file fingerprints change with content")
{
  test::TempDir dir;
  write_text(dir / "a", "one");
  write_text(dir / "b", "one");
  write_text(dir / "c", "two");
  CHECK(file_fingerprint(dir / "a") == file_fingerprint(dir / "b"));
  CHECK(file_fingerprint(dir / "a") != file_fingerprint(dir / "c"));
  CHECK(file_fingerprint(dir / "a").size() == 16);
}
