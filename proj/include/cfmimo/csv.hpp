#pragma once

#include <string>
#include <vector>

namespace cfmimo {

/// Shortest round-trip decimal representation (std::to_chars); empty optional
/// cells are represented by the empty string upstream.
std::string format_double(double v);

/// Writes rows as-is; caller controls formatting. Overwrites the file.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace cfmimo
