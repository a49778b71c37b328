#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace synthhome {

// Shortest decimal text that parses back to exactly `value`.
// Integral values print without a fractional part ("13", not "13.0").
std::string format_number(double value);

// Fixed notation with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

// Standard alphabet, padded, no line wrapping.
std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

std::vector<std::uint8_t> read_binary(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);
void write_binary(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

// RFC 4180 field quoting.
std::string csv_field(std::string_view field);
std::string csv_row(const std::vector<std::string>& fields);
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

}  // namespace synthhome
