#include "axv/template_text.hpp"

#include "axv/condition.hpp"

namespace axv {

TemplateText::TemplateText(std::string source) : source_(std::move(source)) {
  std::string literal;
  std::size_t i = 0;
  auto flush = [&] {
    if (!literal.empty()) segments_.push_back(LiteralSegment{std::move(literal)});
    literal.clear();
  };
  while (i < source_.size()) {
    char c = source_[i];
    if (c == '}') throw TemplateError(i, "unmatched '}' in template");
    if (c != '{') {
      literal.push_back(c);
      ++i;
      continue;
    }
    std::size_t close = source_.find('}', i + 1);
    if (close == std::string::npos) throw TemplateError(i, "unclosed slot '{' in template");
    std::string_view body(source_.data() + i + 1, close - i - 1);
    constexpr std::string_view kElapsed = "elapsed_since(";
    flush();
    if (body.starts_with(kElapsed) && body.ends_with(")")) {
      std::string_view kind = body.substr(kElapsed.size(), body.size() - kElapsed.size() - 1);
      if (!is_identifier(kind))
        throw TemplateError(i, "malformed slot '{" + std::string(body) + "}'");
      segments_.push_back(ElapsedSlot{std::string(kind)});
    } else if (is_identifier(body)) {
      segments_.push_back(VarSlot{std::string(body)});
    } else {
      throw TemplateError(i, "malformed slot '{" + std::string(body) + "}'");
    }
    i = close + 1;
  }
  flush();
}

}  // namespace axv
