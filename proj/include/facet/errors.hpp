#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace facet {

// Parse/validation failure. `violations` lists every individual problem so
// callers can report them all at once.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::string msg, std::vector<std::string> violations = {})
      : std::runtime_error(std::move(msg)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

inline ParseError parse_error_at(std::size_t line_no, const std::string& msg) {
  return ParseError("line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace facet
