#include "oip/likert_parse.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <string>
#include <vector>

namespace oip {

namespace {

std::string fold_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = char(c - 'A' + 'a');
  return out;
}

bool is_ascii_alnum(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// Surrounding punctuation tokens stripped before the exact/substring checks.
const std::array<std::string_view, 16> kPunctTokens = {
    "。", "，", "！", "？", "：", "；", "、", "“", "”", "‘", "’", "（", "）", "《", "》", "…"};

std::string_view trim_decorations(std::string_view s) {
  bool changed = true;
  while (changed && !s.empty()) {
    changed = false;
    while (!s.empty() && (std::isspace(static_cast<unsigned char>(s.front())) ||
                          std::ispunct(static_cast<unsigned char>(s.front()))))
      s.remove_prefix(1), changed = true;
    while (!s.empty() && (std::isspace(static_cast<unsigned char>(s.back())) ||
                          std::ispunct(static_cast<unsigned char>(s.back()))))
      s.remove_suffix(1), changed = true;
    for (auto tok : kPunctTokens) {
      if (s.substr(0, tok.size()) == tok) s.remove_prefix(tok.size()), changed = true;
      if (s.size() >= tok.size() && s.substr(s.size() - tok.size()) == tok)
        s.remove_suffix(tok.size()), changed = true;
    }
  }
  return s;
}

// Non-overlapping longest-first scan for label occurrences. A "Strongly Like"
// hit consumes its span, so the embedded "Like" does not count as a second
// distinct label.
void collect_label_values(const std::string& text, Language lang, std::set<int>* found) {
  std::vector<std::pair<std::string, int>> labels;
  for (int v = kLikertMin; v <= kLikertMax; ++v) {
    std::string l(likert_label(v, lang));
    if (lang == Language::English) l = fold_ascii(l);
    labels.emplace_back(std::move(l), v);
  }
  std::sort(labels.begin(), labels.end(),
            [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });

  size_t pos = 0;
  while (pos < text.size()) {
    size_t advance = 1;
    for (const auto& [label, value] : labels) {
      if (text.compare(pos, label.size(), label) == 0) {
        found->insert(value);
        advance = label.size();
        break;
      }
    }
    pos += advance;
  }
}

// Full-width digits １..５ (UTF-8: EF BC 91 .. EF BC 95).
int fullwidth_digit_at(std::string_view s, size_t pos) {
  if (pos + 3 > s.size()) return 0;
  auto b = [&](size_t i) { return static_cast<unsigned char>(s[pos + i]); };
  if (b(0) == 0xEF && b(1) == 0xBC && b(2) >= 0x91 && b(2) <= 0x95) return int(b(2) - 0x90);
  return 0;
}

void collect_digit_values(std::string_view text, std::set<int>* found) {
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c >= '1' && c <= '5') {
      bool left_ok = (i == 0) || !is_ascii_alnum(text[i - 1]);
      bool right_ok = (i + 1 == text.size()) || !is_ascii_alnum(text[i + 1]);
      // Reject decimals like "4.5".
      if (right_ok && i + 1 < text.size() && text[i + 1] == '.' && i + 2 < text.size() &&
          text[i + 2] >= '0' && text[i + 2] <= '9')
        right_ok = false;
      if (left_ok && i >= 2 && text[i - 1] == '.' && text[i - 2] >= '0' && text[i - 2] <= '9')
        left_ok = false;
      if (left_ok && right_ok) found->insert(c - '0');
    } else if (int v = fullwidth_digit_at(text, i); v != 0) {
      found->insert(v);
      i += 2;
    }
  }
}

}  // namespace

std::optional<LikertValue> parse_likert(std::string_view text, Language language) {
  std::string folded =
      language == Language::English ? fold_ascii(text) : std::string(text);

  std::set<int> values;
  collect_label_values(folded, language, &values);
  collect_digit_values(folded, &values);

  if (values.size() == 1) return LikertValue::from_numeric(*values.begin());
  if (values.size() > 1) return std::nullopt;

  // Unique-substring fallback: a truncated label like "Strongly Dis".
  std::string_view trimmed = trim_decorations(folded);
  if (trimmed.size() < 2) return std::nullopt;
  int match = 0;
  int count = 0;
  for (int v = kLikertMin; v <= kLikertMax; ++v) {
    std::string label(likert_label(v, language));
    if (language == Language::English) label = fold_ascii(label);
    if (label.find(trimmed) != std::string::npos) {
      match = v;
      ++count;
    }
  }
  if (count == 1) return LikertValue::from_numeric(match);
  return std::nullopt;
}

}  // namespace oip
