#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace oip {

/// The six Holland interest categories, in canonical R-I-A-S-E-C order.
enum class RiasecCategory : int {
  Realistic = 0,
  Investigative = 1,
  Artistic = 2,
  Social = 3,
  Enterprising = 4,
  Conventional = 5,
};

inline constexpr int kNumCategories = 6;

constexpr std::array<RiasecCategory, kNumCategories> all_categories() {
  return {RiasecCategory::Realistic,    RiasecCategory::Investigative,
          RiasecCategory::Artistic,     RiasecCategory::Social,
          RiasecCategory::Enterprising, RiasecCategory::Conventional};
}

char category_letter(RiasecCategory c);
std::string_view category_name(RiasecCategory c);
std::optional<RiasecCategory> category_from_letter(char letter);
std::optional<RiasecCategory> category_from_name(std::string_view name);

enum class Language { English, Chinese };
enum class Mode { Interest, Competence };

std::string_view language_code(Language l);  // "en" / "zh"
std::string_view mode_name(Mode m);          // "interest" / "competence"
std::optional<Language> language_from_code(std::string_view code);
std::optional<Mode> mode_from_name(std::string_view name);

/// One point on the 5-point preference scale. Valid values are 1..5.
class LikertValue {
 public:
  static std::optional<LikertValue> from_numeric(int v);
  int numeric() const { return value_; }
  std::string_view label(Language lang) const;

  friend bool operator==(LikertValue a, LikertValue b) { return a.value_ == b.value_; }
  friend bool operator!=(LikertValue a, LikertValue b) { return a.value_ != b.value_; }

 private:
  explicit LikertValue(int v) : value_(v) {}
  int value_;
};

inline constexpr int kLikertMin = 1;
inline constexpr int kLikertMax = 5;

std::string_view likert_label(int numeric, Language lang);

}  // namespace oip
