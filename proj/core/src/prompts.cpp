#include "oip/prompts.hpp"

#include <fstream>
#include <sstream>

#include "oip/errors.hpp"

namespace oip {

namespace {

const char* kInterestEn =
    "Pretend you are a human participant filling out a career interest questionnaire. "
    "Read the work activity below and decide how you would feel about doing that kind of work. "
    "Do not think about whether you have the education or training needed for it, or how much "
    "money you would make. Answer with exactly one of the following options and nothing else: "
    "Strongly Dislike, Dislike, Unsure, Like, Strongly Like.\n\n"
    "Work activity: {item}";

const char* kInterestZh =
    "请假装你是一名正在填写职业兴趣问卷的人类受试者。阅读下面的工作活动，判断你对从事这类工作的感受。"
    "不必考虑你是否具备所需的教育或培训，也不必考虑收入多少。"
    "请严格从以下选项中选择一个作答，不要输出其他内容：非常不喜欢、不喜欢、不确定、喜欢、非常喜欢。\n\n"
    "工作活动：{item}";

const char* kCompetenceEn =
    "Evaluate your own competence at performing the work task below. Consider three aspects: "
    "do you possess the factual and sequential knowledge required to complete the task; "
    "do you possess the skills necessary to execute the task accurately; "
    "and do you have the cognitive, sensory, and physical abilities required to implement it. "
    "Combine the three aspects into one overall rating on a scale from 1 (completely incompetent) "
    "to 5 (completely competent). Answer with the single number only.\n\n"
    "Work task: {item}";

const char* kCompetenceZh =
    "请评估你自己完成下面这项工作任务的胜任程度。从三个方面考虑："
    "你是否具备完成该任务所需的事实性和程序性知识；你是否具备准确执行该任务所需的技能；"
    "你是否具备实施该任务所需的认知、感官和身体能力。"
    "将这三个方面综合为一个总体评分，评分范围从1（完全不能胜任）到5（完全能够胜任）。"
    "请只回复一个数字。\n\n"
    "工作任务：{item}";

constexpr const char* kFileNames[2][2] = {
    {"interest_en.txt", "interest_zh.txt"},
    {"competence_en.txt", "competence_zh.txt"},
};

std::string replace_placeholder(const std::string& tpl, const std::string& item_text) {
  const std::string needle = "{item}";
  std::string out;
  out.reserve(tpl.size() + item_text.size());
  size_t pos = 0;
  while (true) {
    size_t hit = tpl.find(needle, pos);
    if (hit == std::string::npos) {
      out.append(tpl, pos, std::string::npos);
      break;
    }
    out.append(tpl, pos, hit - pos);
    out.append(item_text);
    pos = hit + needle.size();
  }
  return out;
}

}  // namespace

PromptTemplates PromptTemplates::builtin() {
  PromptTemplates t;
  t.tpl_[0][0] = kInterestEn;
  t.tpl_[0][1] = kInterestZh;
  t.tpl_[1][0] = kCompetenceEn;
  t.tpl_[1][1] = kCompetenceZh;
  return t;
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  PromptTemplates t;
  for (int m = 0; m < 2; ++m) {
    for (int l = 0; l < 2; ++l) {
      auto path = dir / kFileNames[m][l];
      std::ifstream in(path, std::ios::binary);
      if (!in) throw MissingFile("cannot open prompt template " + path.string());
      std::ostringstream buf;
      buf << in.rdbuf();
      std::string s = buf.str();
      while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
      if (s.find("{item}") == std::string::npos)
        throw SchemaViolation("prompt template " + path.string() + " lacks the {item} placeholder");
      t.tpl_[m][l] = std::move(s);
    }
  }
  return t;
}

const std::string& PromptTemplates::raw(Mode mode, Language lang) const {
  return tpl_[mode == Mode::Interest ? 0 : 1][lang == Language::English ? 0 : 1];
}

PromptText render_prompt(const PromptTemplates& templates, const Item& item, Mode mode,
                         Language language) {
  PromptText p;
  p.item_text = item.text(language);
  p.mode = mode;
  p.language = language;
  p.instruction = replace_placeholder(templates.raw(mode, language), p.item_text);
  return p;
}

PromptText render_prompt(const Item& item, Mode mode, Language language) {
  static const PromptTemplates defaults = PromptTemplates::builtin();
  return render_prompt(defaults, item, mode, language);
}

}  // namespace oip
