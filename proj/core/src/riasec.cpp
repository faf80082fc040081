#include "oip/riasec.hpp"

namespace oip {

namespace {
constexpr std::array<char, kNumCategories> kLetters = {'R', 'I', 'A', 'S', 'E', 'C'};
constexpr std::array<std::string_view, kNumCategories> kNames = {
    "Realistic", "Investigative", "Artistic", "Social", "Enterprising", "Conventional"};

constexpr std::array<std::string_view, 5> kLabelsEn = {
    "Strongly Dislike", "Dislike", "Unsure", "Like", "Strongly Like"};
constexpr std::array<std::string_view, 5> kLabelsZh = {
    "非常不喜欢", "不喜欢", "不确定", "喜欢", "非常喜欢"};

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    char ca = a[i], cb = b[i];
    if (ca >= 'A' && ca <= 'Z') ca = char(ca - 'A' + 'a');
    if (cb >= 'A' && cb <= 'Z') cb = char(cb - 'A' + 'a');
    if (ca != cb) return false;
  }
  return true;
}
}  // namespace

char category_letter(RiasecCategory c) { return kLetters[static_cast<int>(c)]; }
std::string_view category_name(RiasecCategory c) { return kNames[static_cast<int>(c)]; }

std::optional<RiasecCategory> category_from_letter(char letter) {
  if (letter >= 'a' && letter <= 'z') letter = char(letter - 'a' + 'A');
  for (int i = 0; i < kNumCategories; ++i)
    if (kLetters[i] == letter) return static_cast<RiasecCategory>(i);
  return std::nullopt;
}

std::optional<RiasecCategory> category_from_name(std::string_view name) {
  for (int i = 0; i < kNumCategories; ++i)
    if (iequals(kNames[i], name)) return static_cast<RiasecCategory>(i);
  return std::nullopt;
}

std::string_view language_code(Language l) { return l == Language::English ? "en" : "zh"; }
std::string_view mode_name(Mode m) { return m == Mode::Interest ? "interest" : "competence"; }

std::optional<Language> language_from_code(std::string_view code) {
  if (iequals(code, "en") || iequals(code, "english")) return Language::English;
  if (iequals(code, "zh") || iequals(code, "chinese")) return Language::Chinese;
  return std::nullopt;
}

std::optional<Mode> mode_from_name(std::string_view name) {
  if (iequals(name, "interest")) return Mode::Interest;
  if (iequals(name, "competence")) return Mode::Competence;
  return std::nullopt;
}

std::optional<LikertValue> LikertValue::from_numeric(int v) {
  if (v < kLikertMin || v > kLikertMax) return std::nullopt;
  return LikertValue(v);
}

std::string_view LikertValue::label(Language lang) const {
  return likert_label(value_, lang);
}

std::string_view likert_label(int numeric, Language lang) {
  const auto& table = lang == Language::English ? kLabelsEn : kLabelsZh;
  return table[static_cast<size_t>(numeric - 1)];
}

}  // namespace oip
