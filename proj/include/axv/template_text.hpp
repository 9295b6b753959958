#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace axv {

/// Text fragment of a template rendered verbatim.
struct LiteralSegment {
  std::string text;
  bool operator==(const LiteralSegment&) const = default;
};

/// `{var}` slot.
struct VarSlot {
  std::string name;
  bool operator==(const VarSlot&) const = default;
};

/// `{elapsed_since(kind)}` slot.
struct ElapsedSlot {
  std::string event_kind;
  bool operator==(const ElapsedSlot&) const = default;
};

using TemplateSegment = std::variant<LiteralSegment, VarSlot, ElapsedSlot>;

/// Explanation template with `{var}` and `{elapsed_since(event)}` slots.
/// Construction validates every slot; malformed text throws TemplateError.
class TemplateText {
 public:
  TemplateText() = default;
  explicit TemplateText(std::string source);

  const std::string& source() const { return source_; }
  const std::vector<TemplateSegment>& segments() const { return segments_; }
  bool empty() const { return source_.empty(); }

  friend bool operator==(const TemplateText& a, const TemplateText& b) {
    return a.source_ == b.source_;
  }

 private:
  std::string source_;
  std::vector<TemplateSegment> segments_;
};

class TemplateError : public std::runtime_error {
 public:
  TemplateError(std::size_t offset, const std::string& message)
      : std::runtime_error(message), offset_(offset) {}
  /// Byte offset of the offending character within the template text.
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace axv
