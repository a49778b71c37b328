#include <gtest/gtest.h>

#include "synthhome/error.hpp"
#include "synthhome/util.hpp"

using namespace synthhome;

TEST(FormatNumber, IntegersHaveNoFraction) {
  EXPECT_EQ(format_number(13.0), "13");
  EXPECT_EQ(format_number(-2.0), "-2");
  EXPECT_EQ(format_number(0.85), "0.85");
  EXPECT_EQ(format_number(0.1 + 0.2), "0.30000000000000004");
}

TEST(FormatFixed, NegativeZeroPrintsPlain) {
  EXPECT_EQ(format_fixed(-0.0000001, 6), "0.000000");
  EXPECT_EQ(format_fixed(0.1666666, 6), "0.166667");
}

TEST(Sha256, KnownVector) {
  EXPECT_EQ(sha256_hex(std::string_view("abc")),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Base64, RoundTripAndKnownVector) {
  const std::string s = "any carnal pleas";
  std::vector<std::uint8_t> bytes(s.begin(), s.end());
  EXPECT_EQ(base64_encode(bytes), "YW55IGNhcm5hbCBwbGVhcw==");
  EXPECT_EQ(base64_decode("YW55IGNhcm5hbCBwbGVhcw=="), bytes);
  EXPECT_THROW(base64_decode("abc"), InputError);
}

TEST(Csv, QuotesAndParsesBack) {
  const std::vector<std::string> row{"plain", "with,comma", "with \"quote\"", "multi\nline"};
  const auto text = csv_row(row) + csv_row({"a", "b"});
  const auto parsed = parse_csv(text);
  ASSERT_GE(parsed.size(), 2u);
  EXPECT_EQ(parsed[0], row);
  EXPECT_EQ(parsed[1], (std::vector<std::string>{"a", "b"}));
}

TEST(Text, TrimAndLower) {
  EXPECT_EQ(trim("  a b \t\n"), "a b");
  EXPECT_EQ(to_lower("HVAC Unit"), "hvac unit");
}
