#include <doctest.h>

#include <filesystem>

#include "apptopics/util.hpp"

using namespace apptopics;

TEST_CASE("split and join") {
  CHECK(split_whitespace("  a\tb \n c ") == Words{"a", "b", "c"});
  CHECK(split_whitespace("").empty());
  CHECK(split_char("a\t\tb", '\t') == std::vector<std::string>{"a", "", "b"});
  CHECK(join({"x", "y"}, " ") == "x y");
  CHECK(trim("  hi \r") == "hi");
}

TEST_CASE("decode_text") {
  std::string out;
  CHECK(decode_text("caf\xc3\xa9", out));
  CHECK(out == "caf\xc3\xa9");
  // Latin-1 e-acute becomes the two-byte UTF-8 sequence.
  CHECK(decode_text("caf\xe9", out));
  CHECK(out == "caf\xc3\xa9");
  CHECK_FALSE(decode_text(std::string("a\0b", 3), out));
  // Truncated multi-byte sequence at the end is not UTF-8.
  CHECK(decode_text("ab\xc3", out));
  CHECK(out == "ab\xc3\x83");
}

TEST_CASE("write_file_atomic replaces content and leaves no temp file") {
  auto dir = std::filesystem::temp_directory_path() / "apptopics_util_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  auto p = dir / "f.txt";
  write_file_atomic(p, "one");
  write_file_atomic(p, "two");
  CHECK(read_file(p) == "two");
  std::size_t n = 0;
  for ([[maybe_unused]] auto& e : std::filesystem::directory_iterator(dir)) ++n;
  CHECK(n == 1);
  CHECK_THROWS_AS(read_file(dir / "missing"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_fixed(78.349999, 2) == "78.35");
  CHECK(format_fixed(2.0, 3) == "2.000");
}
