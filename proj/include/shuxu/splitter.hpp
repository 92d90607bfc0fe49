#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shuxu/corpus.hpp"

namespace shuxu {

enum class Fold { Train, Dev, Test };

std::string_view to_string(Fold fold);
std::optional<Fold> parse_fold(std::string_view text);

struct SplitRatios {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
};

struct FoldSizes {
  std::size_t train = 0;
  std::size_t dev = 0;
  std::size_t test = 0;

  bool operator==(const FoldSizes&) const = default;
};

// Dev and test sizes are round-half-to-even(ratio * n); train takes the rest.
FoldSizes fold_sizes(std::size_t n, const SplitRatios& ratios);

struct SplitAssignment {
  std::map<std::string, Fold> fold_of;
  SplitRatios ratios;
  std::optional<std::uint64_t> seed;  // absent when read back from a file

  // Records of `fold`, in corpus order. Throws DataError if a corpus
  // record has no assignment.
  std::vector<TitleRecord> select(const Corpus& corpus, Fold fold) const;

  bool operator==(const SplitAssignment& other) const { return fold_of == other.fold_of; }
};

// Per label, records are taken in corpus order, shuffled with
// Pcg32(seed, stream) where stream is 0 for Letter and 1 for Preface, then
// assigned contiguously to train, dev, test.
SplitAssignment stratified_split(const Corpus& corpus, const SplitRatios& ratios = {},
                                 std::uint64_t seed = 42);

// Tab-separated `record_id<TAB>fold` with a header row, sorted by record_id.
void write_split(std::ostream& out, const SplitAssignment& split);
void write_split_file(const std::filesystem::path& path, const SplitAssignment& split);
SplitAssignment read_split(std::istream& in);
SplitAssignment read_split_file(const std::filesystem::path& path);

}  // namespace shuxu
