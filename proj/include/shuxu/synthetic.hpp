#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "shuxu/corpus.hpp"

namespace shuxu {

struct WeightedItem {
  std::string value;
  double weight = 0.0;
};

// Key of the catch-all bucket in opening-verb and preface-marker weights.
inline constexpr std::string_view kOtherBucket = "other";

// Letter titles are [verb][name] with an optional terminal 書, or a bare
// [name] (elliptical). Preface titles are [occasion][name][marker] or
// [name][work][marker]. Weights are normalized internally.
struct GeneratorConfig {
  std::size_t n_letters = 3206;
  std::size_t n_prefaces = 2232;
  // Opening-verb shares over all letter titles. Elliptical titles are
  // carved out of the "other" bucket; the rest of it uses `rare_verbs`.
  std::vector<WeightedItem> opening_verb_weights;
  std::vector<std::string> rare_verbs;
  // Share of all letter titles ending in 書.
  double p_terminal_shu = 0.092;
  std::vector<WeightedItem> preface_marker_weights;
  std::vector<std::string> other_preface_markers;
  // Occasion prefix of a preface; "" selects the [name][work] template.
  std::vector<WeightedItem> preface_prefix_weights;
  std::vector<std::string> recipient_name_pool;
  double p_elliptical = 0.02;
  std::size_t n_authors = 33;

  static GeneratorConfig defaults();

  // Throws UsageError on empty pools, all-zero or negative weights,
  // probabilities outside [0, 1], or p_elliptical above the other bucket.
  void validate() const;
};

// Default pool: 2-3 character surname + given-name/office strings. The
// names are synthetic and never start with a transmission verb.
std::vector<std::string> default_name_pool();

// Which template produced each title; the oracle for statistical tests.
struct DrawLogEntry {
  std::string record_id;
  Label label = Label::Letter;
  std::string branch;       // verb | rare_verb | elliptical | preface
  std::string bucket;       // opening-verb bucket or preface-marker bucket
  std::string opening;      // first token placed in the title
  std::string terminal;     // terminal marker, "" if none
};

struct SyntheticCorpus {
  Corpus corpus;
  std::vector<DrawLogEntry> draw_log;
};

SyntheticCorpus generate_synthetic(const GeneratorConfig& config, std::uint64_t seed);

nlohmann::json to_json(const std::vector<DrawLogEntry>& log);

}  // namespace shuxu
