#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "axv/condition.hpp"

namespace axv::detail {

enum class Tok {
  Ident,
  Keyword,
  Number,
  Duration,
  String,
  LBrace,
  RBrace,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Op,  // < <= > >= == !=
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;  // identifier/keyword/operator spelling, decoded string body
  double number = 0.0;
  char unit = 0;  // duration unit
  SourcePos pos;
};

std::string_view describe(const Token& t);

/// Splits DSL source into tokens; `#` starts a comment to end of line.
std::vector<Token> tokenize(std::string_view source);

/// Cursor over a token vector shared by the model and condition parsers.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  bool at_keyword(std::string_view kw) const;
  bool at(Tok kind) const { return peek().kind == kind; }
  const Token& expect(Tok kind, std::string_view what);
  void expect_keyword(std::string_view kw);
  [[noreturn]] void fail(std::string_view expected) const;

 private:
  std::vector<Token> tokens_;
  std::size_t index_ = 0;
};

/// Parses `cond := or` starting at the current token.
Condition parse_condition_expr(TokenStream& ts);

}  // namespace axv::detail
