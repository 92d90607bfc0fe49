#pragma once

#include <optional>
#include <set>
#include <span>
#include <string_view>

#include "shuxu/corpus.hpp"
#include "shuxu/predictions.hpp"

namespace shuxu {

enum class RuleKind { MajorityLetter, EndsWithShu, StartsWithVerb, VerbAndShu, VerbOrShu };

// Stable names used on the command line and in reports:
// majority, ends-with-shu, starts-with-verb, verb-and-shu, verb-or-shu.
std::string_view rule_name(RuleKind kind);
std::optional<RuleKind> parse_rule_kind(std::string_view name);

// 與 答 荅 畣 柬 復 報 又 上 寄 奉 再 致
const std::set<char32_t>& default_verb_set();

inline constexpr char32_t kShu = U'書';

// Fixed-position character tests on the first and last scalar value of a
// title. Comparison is exact; no variant folding.
struct RuleSpec {
  RuleKind kind = RuleKind::VerbOrShu;
  std::set<char32_t> verb_set = default_verb_set();
  char32_t terminal_marker = kShu;

  // Throws UsageError if a verb-dependent kind has an empty verb set.
  void validate() const;
};

Label apply_rule(const RuleSpec& rule, std::string_view title);

// Letter predictions score 1.0, Preface predictions 0.0.
PredictionSet predict_rule(std::span<const TitleRecord> records, const RuleSpec& rule);

}  // namespace shuxu
