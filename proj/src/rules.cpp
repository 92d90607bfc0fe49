#include "shuxu/rules.hpp"

#include <string>

#include "shuxu/error.hpp"
#include "shuxu/text.hpp"

namespace shuxu {

std::string_view rule_name(RuleKind kind) {
  switch (kind) {
    case RuleKind::MajorityLetter:
      return "majority";
    case RuleKind::EndsWithShu:
      return "ends-with-shu";
    case RuleKind::StartsWithVerb:
      return "starts-with-verb";
    case RuleKind::VerbAndShu:
      return "verb-and-shu";
    case RuleKind::VerbOrShu:
      return "verb-or-shu";
  }
  return "verb-or-shu";
}

std::optional<RuleKind> parse_rule_kind(std::string_view name) {
  for (auto kind : {RuleKind::MajorityLetter, RuleKind::EndsWithShu, RuleKind::StartsWithVerb,
                    RuleKind::VerbAndShu, RuleKind::VerbOrShu}) {
    if (rule_name(kind) == name) return kind;
  }
  return std::nullopt;
}

const std::set<char32_t>& default_verb_set() {
  static const std::set<char32_t> verbs = {U'與', U'答', U'荅', U'畣', U'柬', U'復', U'報',
                                           U'又', U'上', U'寄', U'奉', U'再', U'致'};
  return verbs;
}

void RuleSpec::validate() const {
  const bool needs_verbs = kind == RuleKind::StartsWithVerb || kind == RuleKind::VerbAndShu ||
                           kind == RuleKind::VerbOrShu;
  if (needs_verbs && verb_set.empty()) {
    throw UsageError("rule '" + std::string(rule_name(kind)) + "' needs a non-empty verb set");
  }
}

Label apply_rule(const RuleSpec& rule, std::string_view title) {
  const bool verb = rule.verb_set.contains(text::first_scalar(title));
  const bool shu = !title.empty() && text::last_scalar(title) == rule.terminal_marker;
  bool letter = false;
  switch (rule.kind) {
    case RuleKind::MajorityLetter:
      letter = true;
      break;
    case RuleKind::EndsWithShu:
      letter = shu;
      break;
    case RuleKind::StartsWithVerb:
      letter = verb;
      break;
    case RuleKind::VerbAndShu:
      letter = verb && shu;
      break;
    case RuleKind::VerbOrShu:
      letter = verb || shu;
      break;
  }
  return letter ? Label::Letter : Label::Preface;
}

PredictionSet predict_rule(std::span<const TitleRecord> records, const RuleSpec& rule) {
  rule.validate();
  PredictionSet out;
  out.system_name = std::string(rule_name(rule.kind));
  for (const auto& r : records) {
    const Label label = apply_rule(rule, r.title);
    out.add(r.record_id, {label, label == Label::Letter ? 1.0 : 0.0});
  }
  return out;
}

}  // namespace shuxu
