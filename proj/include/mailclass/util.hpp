#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mailclass {

// 64-bit FNV-1a, used for content fingerprints in manifests and sweep snapshots.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// RFC 4180 records. Quoted fields may contain commas, doubled quotes and newlines.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);
std::string csv_field(std::string_view value);

// printf-style fixed formatting, independent of the global locale.
std::string format_fixed(double value, int decimals);

std::string to_lower_ascii(std::string_view s);
std::string_view trim(std::string_view s);

}  // namespace mailclass
