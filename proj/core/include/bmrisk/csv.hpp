#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bmrisk {

/// Shortest decimal that round-trips the double (%.17g fallback).
std::string format_double(double v);

/// Quotes a field when it holds a comma, quote or newline.
std::string csv_field(std::string_view s);
std::string csv_row(const std::vector<std::string>& fields);

/// Parses RFC-4180-style text. Lines starting with '#' outside quotes are
/// skipped; `comments`, when given, receives them without the '#'.
std::vector<std::vector<std::string>> parse_csv(std::string_view text, std::vector<std::string>* comments = nullptr);

std::string read_text(const std::filesystem::path& path);
/// Writes through a temporary file and renames, so readers never see a partial file.
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace bmrisk
