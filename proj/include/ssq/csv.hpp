#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ssq::io {

/// Shortest exact decimal representation (round-trips through parse_double);
/// infinities print as inf/-inf.
std::string format_double(double v);
double parse_double(const std::string& s);

/// Splits one CSV line on commas (no quoting; the formats here never need it).
std::vector<std::string> split_csv_line(const std::string& line);

/// Writes via a temp file in the same directory plus rename, so concurrent
/// readers never observe a partial file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// 64-bit FNV-1a as a lowercase hex string, used for config/cache keys.
std::string fnv1a64_hex(const std::string& s);

} // namespace ssq::io
