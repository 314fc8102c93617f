#pragma once

// Text format for Grafcet specifications: parser with positioned errors and
// a pretty-printer whose output parses back to an equal model.

#include <optional>
#include <string>
#include <vector>

#include "grafcet/model.hpp"

namespace grafcet {

struct SourceSpan {
  std::string file;
  std::size_t line = 1;    // 1-based
  std::size_t column = 1;  // 1-based
  std::size_t length = 1;
  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class ParseErrorKind { Lexical, Syntax, DuplicateId, UnknownReference };

const char* to_string(ParseErrorKind kind);

struct ParseError {
  ParseErrorKind kind;
  SourceSpan span;
  std::string message;
};

std::string format(const ParseError& e);  // "file:line:col: syntax error: ..."

struct ParseResult {
  std::optional<Grafcet> model;  // set only when `errors` is empty
  std::vector<ParseError> errors;
  bool ok() const { return errors.empty(); }
};

ParseResult parse_file(const std::string& text, const std::string& file = "<input>");

std::string print_grafcet(const Grafcet& g);

}  // namespace grafcet
