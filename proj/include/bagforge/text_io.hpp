#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bagforge {

// Shortest decimal text that round-trips the exact 64-bit value.
std::string format_double(double value);

// Strict full-string parse; throws std::runtime_error on failure.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

std::vector<std::string> split_whitespace(const std::string& line);

std::string read_file(const std::string& path);

// Writes via a sibling temp file followed by a rename, so readers never see
// a partially written file.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace bagforge
