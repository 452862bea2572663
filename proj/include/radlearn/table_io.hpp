#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "radlearn/features.hpp"

namespace radlearn {

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);

/// CSV with header `sample_id,label,<feature names...>`.
void write_feature_table(const FeatureTable& t, const std::filesystem::path& path);
FeatureTable read_feature_table(const std::filesystem::path& path);

/// Splits one CSV line on commas (no quoting).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace radlearn
