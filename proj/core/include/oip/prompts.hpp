#pragma once

#include <filesystem>
#include <string>

#include "oip/item_bank.hpp"
#include "oip/riasec.hpp"

namespace oip {

/// Fully rendered prompt for one administration.
struct PromptText {
  std::string instruction;  // template with the {item} placeholder substituted out
  std::string item_text;
  Mode mode = Mode::Interest;
  Language language = Language::English;

  /// The exact string sent to the respondent.
  const std::string& full_text() const { return instruction; }
};

/// One instruction template per (mode, language). Templates are data: they can
/// be loaded from a directory or taken from the built-in defaults.
class PromptTemplates {
 public:
  /// Built-in defaults (same content as data/prompts/ in this repo).
  static PromptTemplates builtin();

  /// Loads interest_en.txt, interest_zh.txt, competence_en.txt, competence_zh.txt.
  /// Each file must contain the {item} placeholder.
  static PromptTemplates load(const std::filesystem::path& dir);

  const std::string& raw(Mode mode, Language lang) const;

 private:
  std::string tpl_[2][2];
};

/// Deterministic: identical inputs yield byte-identical output.
PromptText render_prompt(const PromptTemplates& templates, const Item& item, Mode mode,
                         Language language);

/// Convenience overload on the built-in templates.
PromptText render_prompt(const Item& item, Mode mode, Language language);

}  // namespace oip
