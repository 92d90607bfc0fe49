#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace shuxu {

// Letter is the positive class everywhere downstream.
enum class Label { Letter, Preface };

std::string_view to_string(Label label);

// Accepts "letter" / "preface" in any case.
std::optional<Label> parse_label(std::string_view text);

// One table-of-contents row. `title` is NFC-normalized and trimmed.
struct TitleRecord {
  std::string record_id;
  std::string title;
  std::optional<Label> label;
  std::optional<std::string> author_id;
  std::optional<std::string> recipient_id;
  std::optional<std::string> relationship_code;  // e.g. 致書Y, 答Y書
  std::optional<std::string> wenji_id;
  std::optional<std::uint32_t> juan;

  bool operator==(const TitleRecord&) const = default;
};

// Returns an empty string when the record is valid, otherwise a reason.
std::string check_record(const TitleRecord& record);

// Ordered, id-unique collection of records. Immutable after construction.
class Corpus {
 public:
  Corpus() = default;
  // Throws DataError if any record is invalid or an id repeats.
  explicit Corpus(std::vector<TitleRecord> records, std::string provenance = {});

  const std::vector<TitleRecord>& records() const noexcept { return records_; }
  const std::string& provenance() const noexcept { return provenance_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  const TitleRecord* find(std::string_view record_id) const;

  bool operator==(const Corpus& other) const {
    return records_ == other.records_ && provenance_ == other.provenance_;
  }

 private:
  std::vector<TitleRecord> records_;
  std::string provenance_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Maps canonical fields to header names in the source file. Only `title`
// is required to exist; an empty name means the column is not mapped.
struct ColumnMapping {
  std::string record_id = "record_id";
  std::string title = "title";
  std::string label = "label";
  std::string author_id = "author_id";
  std::string recipient_id = "recipient_id";
  std::string relationship_code = "relationship_code";
  std::string wenji_id = "wenji_id";
  std::string juan = "juan";
  char delimiter = '\t';
};

struct RowError {
  std::size_t line = 0;  // 1-based; the header is line 1
  std::string message;
};

struct IngestResult {
  Corpus corpus;
  std::vector<RowError> rejected;
};

// Reads a delimited corpus. Malformed encoding or a missing title column
// throw DataError; invalid rows are collected in `rejected`.
IngestResult parse_corpus(std::istream& in, const ColumnMapping& mapping = {},
                          std::string provenance = {});
IngestResult read_corpus_file(const std::filesystem::path& path,
                              const ColumnMapping& mapping = {});

// Writes the canonical header and one row per record.
void write_corpus(std::ostream& out, const Corpus& corpus, char delimiter = '\t');
void write_corpus_file(const std::filesystem::path& path, const Corpus& corpus);

struct CharCount {
  std::size_t count = 0;
  double fraction = 0.0;

  bool operator==(const CharCount&) const = default;
};

// Keyed by the UTF-8 encoding of a single scalar value.
using CharDistribution = std::map<std::string, CharCount>;

struct CorpusStats {
  std::size_t n_total = 0;
  std::size_t n_letter = 0;
  std::size_t n_preface = 0;
  std::size_t n_unlabeled = 0;
  std::map<Label, CharDistribution> opening_char_distribution;
  std::map<Label, CharDistribution> terminal_char_distribution;
  std::map<std::string, std::size_t> per_author_counts;
  std::map<std::size_t, std::size_t> title_length_histogram;
};

// Throws DataError on an empty corpus. Unlabeled records count toward
// n_total, authors and lengths but not toward the label distributions.
CorpusStats corpus_stats(const Corpus& corpus);

nlohmann::json to_json(const CorpusStats& stats);

}  // namespace shuxu
