#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace glyset::csv {

// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double v);

// Quote a field only when it contains a comma, quote, or newline.
std::string escape(const std::string& field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Parse one line; handles quoted fields with embedded commas and "" escapes.
std::vector<std::string> parse_line(const std::string& line);

// All rows of a CSV file, header included. Throws glyset::Error when the
// file cannot be read.
std::vector<std::vector<std::string>> read_file(const std::filesystem::path& path);

} // namespace glyset::csv
