#pragma once

#include <istream>
#include <sstream>
#include <string>

#include "inflow/errors.hpp"

namespace inflow::detail {

// Reads non-empty, comment-stripped lines and tracks line numbers.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::istringstream& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      tokens.clear();
      tokens.str(line);
      return true;
    }
    return false;
  }

  std::size_t line() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

inline void expect_end(std::istringstream& tokens, std::size_t line) {
  std::string extra;
  if (tokens >> extra) throw ParseError("unexpected trailing token '" + extra + "'", line);
}

inline std::size_t read_header(LineReader& reader, std::istringstream& tokens, const std::string& word) {
  if (!reader.next(tokens)) throw ParseError("unexpected end of file, expected '" + word + "'", reader.line() + 1);
  std::string w;
  long long count = -1;
  if (!(tokens >> w) || w != word || !(tokens >> count) || count < 0) {
    throw ParseError("expected '" + word + " <count>'", reader.line());
  }
  expect_end(tokens, reader.line());
  return static_cast<std::size_t>(count);
}

inline std::size_t read_index(std::istringstream& tokens, std::size_t line) {
  long long v = -1;
  if (!(tokens >> v) || v < 0) throw ParseError("expected a non-negative node index", line);
  return static_cast<std::size_t>(v);
}

// Strict conversion of one whitespace-separated token.
inline double read_double(std::istringstream& tokens, std::size_t line, const char* what) {
  std::string tok;
  if (!(tokens >> tok)) throw ParseError(std::string("missing ") + what, line);
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used == tok.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError(std::string("non-numeric ") + what + " '" + tok + "'", line);
}

}  // namespace inflow::detail
