#include "shuxu/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <span>

#include "shuxu/error.hpp"
#include "shuxu/random.hpp"
#include "shuxu/text.hpp"

namespace shuxu {

GeneratorConfig GeneratorConfig::defaults() {
  GeneratorConfig c;
  c.opening_verb_weights = {
      {"與", 0.339}, {"答", 0.309}, {"柬", 0.051}, {"復", 0.041},
      {"報", 0.034}, {"又", 0.027}, {"上", 0.019}, {"寄", 0.013},
      {"奉", 0.011}, {"再", 0.009}, {std::string(kOtherBucket), 0.147},
  };
  c.rare_verbs = {"致", "荅", "畣"};
  c.preface_marker_weights = {
      {"序", 0.89}, {"敘", 0.034}, {"叙", 0.018}, {"引", 0.026}, {std::string(kOtherBucket), 0.032},
  };
  c.other_preface_markers = {"跋", "說", "題辭"};
  c.preface_prefix_weights = {
      {"送", 0.45}, {"壽", 0.15}, {"贈", 0.10}, {"奉送", 0.03}, {"", 0.27},
  };
  c.recipient_name_pool = default_name_pool();
  return c;
}

std::vector<std::string> default_name_pool() {
  static const char* const surnames[] = {
      "王", "李", "張", "劉", "陳", "楊", "黃", "趙", "吳", "周", "徐", "孫", "馬",
      "朱", "胡", "郭", "何", "林", "高", "羅", "鄭", "梁", "謝", "宋", "唐", "許",
      "韓", "馮", "鄧", "曹", "袁", "顧", "錢", "鄒", "屠", "沈", "陸", "范"};
  static const char* const given[] = {"生",   "君",   "公",   "子敬", "伯修", "仲容", "叔度",
                                      "元美", "汝定", "太史", "中丞", "司馬", "孝廉", "山人",
                                      "少參", "侍御", "方伯", "給諫", "明府"};
  std::vector<std::string> pool;
  for (const char* s : surnames) {
    for (const char* g : given) pool.push_back(std::string(s) + g);
  }
  return pool;
}

namespace {

double total_weight(const std::vector<WeightedItem>& items) {
  double sum = 0.0;
  for (const auto& item : items) sum += item.weight;
  return sum;
}

void check_weights(const std::vector<WeightedItem>& items, const char* what) {
  for (const auto& item : items) {
    if (!(item.weight >= 0.0) || !std::isfinite(item.weight)) {
      throw UsageError(std::string(what) + " weights must be finite and non-negative");
    }
  }
  if (!(total_weight(items) > 0.0)) {
    throw UsageError(std::string(what) + " weights are all zero");
  }
}

double normalized_weight(const std::vector<WeightedItem>& items, std::string_view key) {
  for (const auto& item : items) {
    if (item.value == key) return item.weight / total_weight(items);
  }
  return 0.0;
}

// Index drawn proportionally to weight with one uniform variate.
std::size_t draw(std::span<const double> weights, Pcg32& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double u = rng.uniform() * total;
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    cumulative += weights[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  return last_positive;
}

template <typename T>
const T& pick(const std::vector<T>& pool, Pcg32& rng) {
  return pool[rng.bounded(static_cast<std::uint32_t>(pool.size()))];
}

std::string relationship_for(std::string_view verb) {
  static const std::string_view replies[] = {"答", "荅", "畣", "復", "報"};
  for (auto r : replies) {
    if (verb == r) return "答Y書";
  }
  return "致書Y";
}

struct Draft {
  TitleRecord record;
  DrawLogEntry log;
};

}  // namespace

void GeneratorConfig::validate() const {
  check_weights(opening_verb_weights, "opening-verb");
  check_weights(preface_marker_weights, "preface-marker");
  check_weights(preface_prefix_weights, "preface-prefix");
  if (recipient_name_pool.empty()) throw UsageError("recipient name pool is empty");
  for (const auto& name : recipient_name_pool) {
    const auto len = text::is_valid_utf8(name) ? text::scalar_length(name) : 0;
    if (len < 2 || len > 4 || text::normalize_title(name) != name) {
      throw UsageError("recipient name '" + name + "' must be 2-4 characters");
    }
  }
  if (!(p_terminal_shu >= 0.0 && p_terminal_shu <= 1.0)) {
    throw UsageError("p_terminal_shu must be in [0, 1]");
  }
  if (!(p_elliptical >= 0.0 && p_elliptical <= 1.0)) {
    throw UsageError("p_elliptical must be in [0, 1]");
  }
  const double other = normalized_weight(opening_verb_weights, kOtherBucket);
  if (p_elliptical > other + 1e-12) {
    throw UsageError("p_elliptical exceeds the 'other' opening-verb share");
  }
  if (other - p_elliptical > 1e-12 && rare_verbs.empty()) {
    throw UsageError("rare verb pool is empty but the 'other' bucket needs it");
  }
  if (p_elliptical < 1.0 && p_terminal_shu / (1.0 - p_elliptical) > 1.0 + 1e-12) {
    throw UsageError("p_terminal_shu cannot be reached with this p_elliptical");
  }
  if (normalized_weight(preface_marker_weights, kOtherBucket) > 0.0 &&
      other_preface_markers.empty()) {
    throw UsageError("other preface marker pool is empty");
  }
  if (n_authors == 0) throw UsageError("n_authors must be positive");
}

SyntheticCorpus generate_synthetic(const GeneratorConfig& config, std::uint64_t seed) {
  config.validate();
  Pcg32 rng(seed, 0x5eed);

  // Letter branch weights: elliptical, each listed verb, rare-verb remainder.
  const double verb_total = total_weight(config.opening_verb_weights);
  std::vector<double> letter_weights{config.p_elliptical};
  std::vector<const WeightedItem*> letter_buckets{nullptr};
  for (const auto& item : config.opening_verb_weights) {
    double w = item.weight / verb_total;
    if (item.value == kOtherBucket) w = std::max(0.0, w - config.p_elliptical);
    letter_weights.push_back(w);
    letter_buckets.push_back(&item);
  }
  const double p_shu_given_verb =
      config.p_elliptical < 1.0 ? config.p_terminal_shu / (1.0 - config.p_elliptical) : 0.0;

  std::vector<double> marker_weights;
  for (const auto& item : config.preface_marker_weights) marker_weights.push_back(item.weight);
  std::vector<double> prefix_weights;
  for (const auto& item : config.preface_prefix_weights) prefix_weights.push_back(item.weight);
  static const std::vector<std::string> works = {"詩", "集", "文集", "稿", "詩集"};
  static const std::vector<std::string> occasions = {"", "", "", "之任", "歸里", "還朝"};

  std::vector<Draft> drafts;
  drafts.reserve(config.n_letters + config.n_prefaces);

  for (std::size_t i = 0; i < config.n_letters; ++i) {
    Draft d;
    d.record.label = Label::Letter;
    d.log.label = Label::Letter;
    const std::size_t name_index = rng.bounded(static_cast<std::uint32_t>(config.recipient_name_pool.size()));
    const std::string& name = config.recipient_name_pool[name_index];
    const std::size_t branch = draw(letter_weights, rng);
    std::string verb;
    if (branch == 0) {
      d.log.branch = "elliptical";
      d.log.bucket = std::string(kOtherBucket);
      d.record.title = name;
    } else {
      const auto& bucket = *letter_buckets[branch];
      d.log.bucket = bucket.value;
      if (bucket.value == kOtherBucket) {
        d.log.branch = "rare_verb";
        verb = pick(config.rare_verbs, rng);
      } else {
        d.log.branch = "verb";
        verb = bucket.value;
      }
      d.record.title = verb + name;
      if (rng.uniform() < p_shu_given_verb) {
        d.record.title += "書";
        d.log.terminal = "書";
      }
      d.record.relationship_code = relationship_for(verb);
    }
    d.log.opening = branch == 0 ? std::string() : verb;
    d.record.recipient_id = "R" + std::to_string(name_index + 1);
    drafts.push_back(std::move(d));
  }

  for (std::size_t i = 0; i < config.n_prefaces; ++i) {
    Draft d;
    d.record.label = Label::Preface;
    d.log.label = Label::Preface;
    d.log.branch = "preface";
    const std::size_t name_index = rng.bounded(static_cast<std::uint32_t>(config.recipient_name_pool.size()));
    const std::string& name = config.recipient_name_pool[name_index];
    const auto& prefix = config.preface_prefix_weights[draw(prefix_weights, rng)].value;
    const auto& bucket = config.preface_marker_weights[draw(marker_weights, rng)].value;
    const std::string marker =
        bucket == kOtherBucket ? pick(config.other_preface_markers, rng) : bucket;
    if (prefix.empty()) {
      d.record.title = name + pick(works, rng) + marker;
    } else {
      d.record.title = prefix + name + pick(occasions, rng) + marker;
    }
    d.log.bucket = bucket;
    d.log.opening = prefix;
    d.log.terminal = marker;
    d.record.recipient_id = "R" + std::to_string(name_index + 1);
    drafts.push_back(std::move(d));
  }

  shuffle(std::span<Draft>(drafts), rng);

  std::vector<TitleRecord> records;
  std::vector<DrawLogEntry> log;
  records.reserve(drafts.size());
  log.reserve(drafts.size());
  char buf[32];
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    auto& d = drafts[i];
    std::snprintf(buf, sizeof buf, "syn-%06zu", i + 1);
    d.record.record_id = buf;
    d.log.record_id = buf;
    const auto author = rng.bounded(static_cast<std::uint32_t>(config.n_authors)) + 1;
    std::snprintf(buf, sizeof buf, "A%02u", author);
    d.record.author_id = buf;
    std::snprintf(buf, sizeof buf, "W%02u", author);
    d.record.wenji_id = buf;
    d.record.juan = rng.bounded(40) + 1;
    records.push_back(std::move(d.record));
    log.push_back(std::move(d.log));
  }
  return {Corpus(std::move(records), "synthetic seed=" + std::to_string(seed)), std::move(log)};
}

nlohmann::json to_json(const std::vector<DrawLogEntry>& log) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : log) {
    out.push_back({{"record_id", e.record_id},
                   {"label", to_string(e.label)},
                   {"branch", e.branch},
                   {"bucket", e.bucket},
                   {"opening", e.opening},
                   {"terminal", e.terminal}});
  }
  return out;
}

}  // namespace shuxu
