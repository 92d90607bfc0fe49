#pragma once

#include <string>
#include <vector>

#include "shuxu/corpus.hpp"
#include "shuxu/random.hpp"
#include "shuxu/text.hpp"

namespace testing {

inline shuxu::TitleRecord record(std::string id, std::string title,
                                 std::optional<shuxu::Label> label = std::nullopt) {
  shuxu::TitleRecord r;
  r.record_id = std::move(id);
  r.title = std::move(title);
  r.label = label;
  return r;
}

// Random title over a small CJK alphabet so n-grams collide often.
inline std::string random_title(shuxu::Pcg32& rng, std::size_t min_len = 1,
                                std::size_t max_len = 6) {
  static const char32_t alphabet[] = {U'與', U'答', U'王', U'生', U'書', U'送', U'序', U'友',
                                      U'人', U'李', U'公', U'壽'};
  const std::size_t len =
      min_len + rng.bounded(static_cast<std::uint32_t>(max_len - min_len + 1));
  std::u32string s;
  for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[rng.bounded(std::size(alphabet))]);
  return shuxu::text::encode_utf8(s);
}

inline std::vector<shuxu::TitleRecord> random_records(shuxu::Pcg32& rng, std::size_t n,
                                                      bool labeled = true) {
  std::vector<shuxu::TitleRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto r = record("r" + std::to_string(i), random_title(rng));
    if (labeled || rng.bounded(4) != 0) {
      r.label = rng.bounded(2) ? shuxu::Label::Letter : shuxu::Label::Preface;
    }
    if (rng.bounded(2)) r.author_id = "A" + std::to_string(rng.bounded(5));
    if (rng.bounded(3) == 0) r.juan = rng.bounded(30);
    if (rng.bounded(3) == 0) r.relationship_code = "答Y書";
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace testing
