#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace apptopics {

// Every recoverable failure in the library is reported with this type. The
// CLI maps it to a nonzero exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Words = std::vector<std::string>;

std::string to_lower_ascii(std::string_view s);
bool is_ascii_alpha(char c);
bool is_ascii_alnum(char c);

Words split_whitespace(std::string_view s);
std::string join(const Words& words, std::string_view sep);
std::vector<std::string> split_char(std::string_view s, char sep);
std::string trim(std::string_view s);

// Bytes of the file. Throws Error when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Decodes text bytes to UTF-8. Valid UTF-8 is returned unchanged, anything
// else is interpreted as Latin-1. Returns false for binary content (NUL bytes).
bool decode_text(std::string_view bytes, std::string& out);

// Shortest round-trip decimal representation of a double.
std::string format_double(double v);
std::string format_fixed(double v, int decimals);

}  // namespace apptopics
