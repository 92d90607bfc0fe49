#include "shuxu/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "shuxu/error.hpp"
#include "shuxu/text.hpp"

namespace shuxu {

std::string_view to_string(Label label) {
  return label == Label::Letter ? "letter" : "preface";
}

std::optional<Label> parse_label(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "letter") return Label::Letter;
  if (lower == "preface") return Label::Preface;
  return std::nullopt;
}

namespace {

bool has_control_separator(std::string_view s) {
  return s.find_first_of("\t\r\n") != std::string_view::npos;
}

}  // namespace

std::string check_record(const TitleRecord& record) {
  if (record.record_id.empty()) return "empty record_id";
  if (has_control_separator(record.record_id)) return "record_id contains a tab or newline";
  if (!text::is_valid_utf8(record.title)) return "title is not valid UTF-8";
  if (record.title.empty()) return "empty title";
  if (has_control_separator(record.title)) return "title contains a tab or newline";
  if (text::normalize_title(record.title) != record.title) {
    return "title is not NFC-normalized and trimmed";
  }
  return {};
}

Corpus::Corpus(std::vector<TitleRecord> records, std::string provenance)
    : records_(std::move(records)), provenance_(std::move(provenance)) {
  index_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (auto why = check_record(r); !why.empty()) {
      throw DataError("record '" + r.record_id + "': " + why);
    }
    if (!index_.emplace(r.record_id, i).second) {
      throw DataError("duplicate record_id '" + r.record_id + "'");
    }
  }
}

const TitleRecord* Corpus::find(std::string_view record_id) const {
  auto it = index_.find(std::string(record_id));
  return it == index_.end() ? nullptr : &records_[it->second];
}

namespace {

// Splits one line. Comma-delimited input honours double-quote quoting;
// tab-delimited input is split literally.
std::vector<std::string> split_fields(std::string_view line, char delimiter, bool& ok) {
  std::vector<std::string> fields;
  ok = true;
  if (delimiter != ',') {
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(delimiter, start);
      fields.emplace_back(line.substr(start, pos - start));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return fields;
  }
  std::string current;
  bool quoted = false;
  bool field_was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"' && current.empty() && !field_was_quoted) {
      quoted = true;
      field_was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
      field_was_quoted = false;
    } else {
      current.push_back(c);
    }
  }
  if (quoted) ok = false;
  fields.push_back(std::move(current));
  return fields;
}

std::optional<std::string> non_empty(std::string s) {
  if (s.empty()) return std::nullopt;
  return s;
}

}  // namespace

IngestResult parse_corpus(std::istream& in, const ColumnMapping& mapping,
                          std::string provenance) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError("corpus has no header row");
  ++line_no;
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (!text::is_valid_utf8(line)) throw DataError("malformed UTF-8 in header row");

  bool ok = true;
  const auto header = split_fields(line, mapping.delimiter, ok);
  if (!ok) throw DataError("unterminated quote in header row");

  auto column_of = [&](const std::string& name) -> std::optional<std::size_t> {
    if (name.empty()) return std::nullopt;
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto col_title = column_of(mapping.title);
  if (!col_title) throw DataError("missing required column '" + mapping.title + "'");
  const auto col_id = column_of(mapping.record_id);
  const auto col_label = column_of(mapping.label);
  const auto col_author = column_of(mapping.author_id);
  const auto col_recipient = column_of(mapping.recipient_id);
  const auto col_relation = column_of(mapping.relationship_code);
  const auto col_wenji = column_of(mapping.wenji_id);
  const auto col_juan = column_of(mapping.juan);

  std::vector<TitleRecord> records;
  std::vector<RowError> rejected;
  std::unordered_map<std::string, std::size_t> seen;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!text::is_valid_utf8(line)) {
      throw DataError("malformed UTF-8 on line " + std::to_string(line_no));
    }
    const auto fields = split_fields(line, mapping.delimiter, ok);
    auto reject = [&](std::string why) { rejected.push_back({line_no, std::move(why)}); };
    if (!ok) {
      reject("unterminated quote");
      continue;
    }
    if (fields.size() != header.size()) {
      reject("expected " + std::to_string(header.size()) + " fields, found " +
             std::to_string(fields.size()));
      continue;
    }
    auto field = [&](std::optional<std::size_t> col) -> std::string {
      return col ? fields[*col] : std::string();
    };

    TitleRecord r;
    r.record_id = col_id ? field(col_id) : "row-" + std::to_string(line_no);
    r.title = text::normalize_title(field(col_title));
    if (const auto raw = field(col_label); !raw.empty()) {
      r.label = parse_label(raw);
      if (!r.label) {
        reject("unknown label '" + raw + "'");
        continue;
      }
    }
    r.author_id = non_empty(field(col_author));
    r.recipient_id = non_empty(field(col_recipient));
    r.relationship_code = non_empty(field(col_relation));
    r.wenji_id = non_empty(field(col_wenji));
    if (const auto raw = field(col_juan); !raw.empty()) {
      std::uint32_t juan = 0;
      const auto [end, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), juan);
      if (ec != std::errc() || end != raw.data() + raw.size()) {
        reject("juan '" + raw + "' is not a non-negative integer");
        continue;
      }
      r.juan = juan;
    }
    if (auto why = check_record(r); !why.empty()) {
      reject(std::move(why));
      continue;
    }
    if (auto [it, inserted] = seen.emplace(r.record_id, line_no); !inserted) {
      reject("duplicate record_id '" + r.record_id + "' (first on line " +
             std::to_string(it->second) + ")");
      continue;
    }
    records.push_back(std::move(r));
  }
  return {Corpus(std::move(records), std::move(provenance)), std::move(rejected)};
}

IngestResult read_corpus_file(const std::filesystem::path& path, const ColumnMapping& mapping) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  return parse_corpus(in, mapping, path.string());
}

namespace {

std::string format_field(std::string_view value, char delimiter) {
  if (delimiter != ',') {
    if (value.find(delimiter) != std::string_view::npos || has_control_separator(value)) {
      throw DataError("field '" + std::string(value) + "' cannot be written unquoted");
    }
    return std::string(value);
  }
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void write_corpus(std::ostream& out, const Corpus& corpus, char delimiter) {
  const char d = delimiter;
  out << "record_id" << d << "title" << d << "label" << d << "author_id" << d << "recipient_id"
      << d << "relationship_code" << d << "wenji_id" << d << "juan" << '\n';
  auto opt = [&](const std::optional<std::string>& v) {
    return v ? format_field(*v, d) : std::string();
  };
  for (const auto& r : corpus.records()) {
    out << format_field(r.record_id, d) << d << format_field(r.title, d) << d
        << (r.label ? std::string(to_string(*r.label)) : std::string()) << d << opt(r.author_id)
        << d << opt(r.recipient_id) << d << opt(r.relationship_code) << d << opt(r.wenji_id) << d
        << (r.juan ? std::to_string(*r.juan) : std::string()) << '\n';
  }
}

void write_corpus_file(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus file " + path.string());
  write_corpus(out, corpus);
}

CorpusStats corpus_stats(const Corpus& corpus) {
  if (corpus.empty()) throw DataError("corpus is empty; nothing to summarize");
  CorpusStats stats;
  stats.n_total = corpus.size();
  for (const auto& r : corpus.records()) {
    if (r.author_id) ++stats.per_author_counts[*r.author_id];
    ++stats.title_length_histogram[text::scalar_length(r.title)];
    if (!r.label) {
      ++stats.n_unlabeled;
      continue;
    }
    (*r.label == Label::Letter ? stats.n_letter : stats.n_preface) += 1;
    ++stats.opening_char_distribution[*r.label][text::encode_utf8(text::first_scalar(r.title))]
          .count;
    ++stats.terminal_char_distribution[*r.label][text::encode_utf8(text::last_scalar(r.title))]
          .count;
  }
  auto finish = [&](std::map<Label, CharDistribution>& by_label) {
    for (auto& [label, dist] : by_label) {
      const double n = static_cast<double>(label == Label::Letter ? stats.n_letter
                                                                  : stats.n_preface);
      for (auto& [ch, entry] : dist) entry.fraction = static_cast<double>(entry.count) / n;
    }
  };
  finish(stats.opening_char_distribution);
  finish(stats.terminal_char_distribution);
  return stats;
}

nlohmann::json to_json(const CorpusStats& stats) {
  using nlohmann::json;
  auto dist_json = [](const std::map<Label, CharDistribution>& by_label) {
    json out = json::object();
    for (const auto& [label, dist] : by_label) {
      // Most frequent first; ties by character.
      std::vector<std::pair<std::string, CharCount>> rows(dist.begin(), dist.end());
      std::stable_sort(rows.begin(), rows.end(),
                       [](const auto& a, const auto& b) { return a.second.count > b.second.count; });
      json arr = json::array();
      for (const auto& [ch, c] : rows) {
        arr.push_back({{"char", ch}, {"count", c.count}, {"fraction", c.fraction}});
      }
      out[std::string(to_string(label))] = std::move(arr);
    }
    return out;
  };
  json lengths = json::object();
  for (const auto& [len, n] : stats.title_length_histogram) lengths[std::to_string(len)] = n;
  return {
      {"n_total", stats.n_total},
      {"n_letter", stats.n_letter},
      {"n_preface", stats.n_preface},
      {"n_unlabeled", stats.n_unlabeled},
      {"opening_char_distribution", dist_json(stats.opening_char_distribution)},
      {"terminal_char_distribution", dist_json(stats.terminal_char_distribution)},
      {"per_author_counts", stats.per_author_counts},
      {"title_length_histogram", lengths},
  };
}

}  // namespace shuxu
