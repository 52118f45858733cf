#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace intent {

/// Raised by every document parser in the project (scenario, trace, plan
/// library, knowledge base, FSM, tree, config). Carries the 1-based line.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

namespace text {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_ws(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
std::vector<std::string_view> lines(std::string_view s);

/// Strips a trailing `# comment`.
std::string_view strip_comment(std::string_view s);

double to_double(std::string_view s, std::size_t line = 0);
std::int64_t to_int(std::string_view s, std::size_t line = 0);

/// Shortest decimal form that parses back to the same double.
std::string fmt(double v);
/// Fixed number of decimals, for human-facing tables.
std::string fixed(double v, int decimals);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace text
}  // namespace intent
