#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace ispmarket::cli {

// Thrown when a config file cannot be read.
class ConfigIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat `key=value` file, one pair per line. Blank lines and lines starting
// with '#' are ignored; whitespace around keys and values is trimmed and a
// leading "--" on a key is dropped, so flag names can be pasted as-is.
// Throws std::invalid_argument on a malformed line or a repeated key.
std::map<std::string, std::string> parse_key_value(const std::string& text);
std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path);

}  // namespace ispmarket::cli
