#include "dsl_lexer.hpp"

#include <array>
#include <cctype>
#include <charconv>

namespace axv::detail {
namespace {

constexpr std::array kKeywords = {
    std::string_view{"behavior"}, std::string_view{"alias"},   std::string_view{"guard"},
    std::string_view{"prior"},    std::string_view{"explain"}, std::string_view{"tree"},
    std::string_view{"if"},       std::string_view{"else"},    std::string_view{"reason"},
    std::string_view{"null"},     std::string_view{"not"},     std::string_view{"and"},
    std::string_view{"or"},       std::string_view{"true"},    std::string_view{"false"},
    std::string_view{"elapsed_since"}, std::string_view{"in_zone"},
};

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      Token t;
      t.pos = pos_;
      if (i_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(std::move(t));
        return out;
      }
      char c = src_[i_];
      if (is_ident_start(c)) {
        std::size_t start = i_;
        while (i_ < src_.size() && is_ident_char(src_[i_])) advance();
        t.text = std::string(src_.substr(start, i_ - start));
        t.kind = is_keyword(t.text) ? Tok::Keyword : Tok::Ident;
      } else if (is_digit(c) || (c == '-' && i_ + 1 < src_.size() && is_digit(src_[i_ + 1]))) {
        lex_number(t);
      } else if (c == '"') {
        lex_string(t);
      } else {
        lex_punct(t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  static bool is_keyword(std::string_view s) {
    for (auto kw : kKeywords)
      if (kw == s) return true;
    return false;
  }

  void advance() {
    if (src_[i_] == '\n') {
      ++pos_.line;
      pos_.column = 1;
    } else {
      ++pos_.column;
    }
    ++i_;
  }

  void skip_space_and_comments() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (c == '#') {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c)) != 0) {
        advance();
      } else {
        break;
      }
    }
  }

  void lex_number(Token& t) {
    std::size_t start = i_;
    if (src_[i_] == '-') advance();
    while (i_ < src_.size() && is_digit(src_[i_])) advance();
    if (i_ < src_.size() && src_[i_] == '.') {
      advance();
      if (i_ >= src_.size() || !is_digit(src_[i_]))
        throw ParseError(pos_, "expected digit after decimal point");
      while (i_ < src_.size() && is_digit(src_[i_])) advance();
    }
    std::string_view digits = src_.substr(start, i_ - start);
    auto res = std::from_chars(digits.data(), digits.data() + digits.size(), t.number);
    if (res.ec != std::errc{}) throw ParseError(t.pos, "number out of range");
    t.kind = Tok::Number;
    t.text = std::string(digits);
    if (i_ < src_.size() && (src_[i_] == 's' || src_[i_] == 'm' || src_[i_] == 'h') &&
        (i_ + 1 >= src_.size() || !is_ident_char(src_[i_ + 1]))) {
      t.kind = Tok::Duration;
      t.unit = src_[i_];
      t.text.push_back(src_[i_]);
      advance();
    } else if (i_ < src_.size() && is_ident_char(src_[i_])) {
      throw ParseError(pos_, "unexpected character '" + std::string(1, src_[i_]) +
                                 "' after number (duration units are s, m, h)");
    }
  }

  void lex_string(Token& t) {
    advance();  // opening quote
    std::string body;
    for (;;) {
      if (i_ >= src_.size()) throw ParseError(t.pos, "unterminated string literal");
      char c = src_[i_];
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\n') throw ParseError(t.pos, "unterminated string literal");
      if (c == '\\') {
        advance();
        if (i_ >= src_.size()) throw ParseError(t.pos, "unterminated string literal");
        char e = src_[i_];
        switch (e) {
          case '"': body.push_back('"'); break;
          case '\\': body.push_back('\\'); break;
          case 'n': body.push_back('\n'); break;
          case 't': body.push_back('\t'); break;
          default:
            throw ParseError(pos_, std::string("unknown escape sequence '\\") + e + "'");
        }
        advance();
        continue;
      }
      body.push_back(c);
      advance();
    }
    t.kind = Tok::String;
    t.text = std::move(body);
  }

  void lex_punct(Token& t) {
    char c = src_[i_];
    auto single = [&](Tok kind) {
      t.kind = kind;
      t.text = std::string(1, c);
      advance();
    };
    switch (c) {
      case '{': return single(Tok::LBrace);
      case '}': return single(Tok::RBrace);
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case '[': return single(Tok::LBracket);
      case ']': return single(Tok::RBracket);
      case ',': return single(Tok::Comma);
      default: break;
    }
    char n = i_ + 1 < src_.size() ? src_[i_ + 1] : '\0';
    t.kind = Tok::Op;
    if ((c == '<' || c == '>') && n == '=') {
      t.text = std::string{c, '='};
      advance();
      advance();
    } else if (c == '<' || c == '>') {
      t.text = std::string(1, c);
      advance();
    } else if ((c == '=' || c == '!') && n == '=') {
      t.text = std::string{c, '='};
      advance();
      advance();
    } else {
      throw ParseError(pos_, "unexpected character '" + std::string(1, c) + "'");
    }
  }

  std::string_view src_;
  std::size_t i_ = 0;
  SourcePos pos_;
};

}  // namespace

std::string_view describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Number: return "number";
    case Tok::Duration: return "duration";
    case Tok::String: return "string";
    case Tok::Ident: return "identifier";
    default: return t.text;
  }
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

const Token& TokenStream::peek(std::size_t ahead) const {
  std::size_t i = index_ + ahead;
  return i < tokens_.size() ? tokens_[i] : tokens_.back();
}

const Token& TokenStream::next() {
  const Token& t = peek();
  if (index_ < tokens_.size() - 1) ++index_;
  return t;
}

bool TokenStream::at_keyword(std::string_view kw) const {
  return peek().kind == Tok::Keyword && peek().text == kw;
}

const Token& TokenStream::expect(Tok kind, std::string_view what) {
  if (peek().kind != kind) fail(what);
  return next();
}

void TokenStream::expect_keyword(std::string_view kw) {
  if (!at_keyword(kw)) fail("'" + std::string(kw) + "'");
  next();
}

void TokenStream::fail(std::string_view expected) const {
  const Token& t = peek();
  std::string found = t.kind == Tok::Ident || t.kind == Tok::Keyword
                          ? "'" + t.text + "'"
                          : std::string(describe(t));
  if (t.kind == Tok::Op || t.kind == Tok::Number || t.kind == Tok::Duration)
    found = "'" + t.text + "'";
  throw ParseError(t.pos, "expected " + std::string(expected) + ", found " + found);
}

}  // namespace axv::detail
