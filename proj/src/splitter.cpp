#include "shuxu/splitter.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>

#include "shuxu/error.hpp"
#include "shuxu/random.hpp"

namespace shuxu {

std::string_view to_string(Fold fold) {
  switch (fold) {
    case Fold::Train:
      return "train";
    case Fold::Dev:
      return "dev";
    case Fold::Test:
      return "test";
  }
  return "train";
}

std::optional<Fold> parse_fold(std::string_view text) {
  if (text == "train") return Fold::Train;
  if (text == "dev") return Fold::Dev;
  if (text == "test") return Fold::Test;
  return std::nullopt;
}

namespace {

std::size_t round_half_even(double x) {
  const double floor = std::floor(x);
  const double diff = x - floor;
  auto f = static_cast<std::size_t>(floor);
  if (diff > 0.5) return f + 1;
  if (diff < 0.5) return f;
  return (f % 2 == 0) ? f : f + 1;
}

void check_ratios(const SplitRatios& r) {
  if (r.train < 0 || r.dev < 0 || r.test < 0 || !std::isfinite(r.train) ||
      !std::isfinite(r.dev) || !std::isfinite(r.test)) {
    throw UsageError("split ratios must be finite and non-negative");
  }
  if (std::abs(r.train + r.dev + r.test - 1.0) > 1e-9) {
    throw UsageError("split ratios must sum to 1");
  }
}

}  // namespace

FoldSizes fold_sizes(std::size_t n, const SplitRatios& ratios) {
  check_ratios(ratios);
  FoldSizes sizes;
  sizes.dev = round_half_even(ratios.dev * static_cast<double>(n));
  sizes.test = round_half_even(ratios.test * static_cast<double>(n));
  if (sizes.dev + sizes.test > n) {
    throw DataError("split ratios cannot be satisfied for a subset of " + std::to_string(n) +
                    " records");
  }
  sizes.train = n - sizes.dev - sizes.test;
  return sizes;
}

std::vector<TitleRecord> SplitAssignment::select(const Corpus& corpus, Fold fold) const {
  std::vector<TitleRecord> out;
  for (const auto& r : corpus.records()) {
    auto it = fold_of.find(r.record_id);
    if (it == fold_of.end()) {
      throw DataError("record '" + r.record_id + "' has no fold assignment");
    }
    if (it->second == fold) out.push_back(r);
  }
  return out;
}

SplitAssignment stratified_split(const Corpus& corpus, const SplitRatios& ratios,
                                 std::uint64_t seed) {
  check_ratios(ratios);
  std::vector<std::string> by_label[2];
  for (const auto& r : corpus.records()) {
    if (!r.label) {
      throw DataError("record '" + r.record_id + "' is unlabeled; stratified split needs labels");
    }
    by_label[*r.label == Label::Letter ? 0 : 1].push_back(r.record_id);
  }
  const int nonzero = (ratios.train > 0) + (ratios.dev > 0) + (ratios.test > 0);

  SplitAssignment split;
  split.ratios = ratios;
  split.seed = seed;
  for (std::uint64_t stream = 0; stream < 2; ++stream) {
    auto& ids = by_label[stream];
    const auto label = stream == 0 ? Label::Letter : Label::Preface;
    if (ids.empty()) {
      throw DataError("no " + std::string(to_string(label)) + " records to stratify");
    }
    if (nonzero == 3 && ids.size() < 3) {
      throw DataError("cannot stratify " + std::to_string(ids.size()) + " " +
                      std::string(to_string(label)) + " record(s) into three non-empty folds");
    }
    const FoldSizes sizes = fold_sizes(ids.size(), ratios);
    Pcg32 rng(seed, stream);
    shuffle(std::span<std::string>(ids), rng);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const Fold fold = i < sizes.train              ? Fold::Train
                        : i < sizes.train + sizes.dev ? Fold::Dev
                                                      : Fold::Test;
      split.fold_of.emplace(std::move(ids[i]), fold);
    }
  }
  return split;
}

void write_split(std::ostream& out, const SplitAssignment& split) {
  out << "record_id\tfold\n";
  for (const auto& [id, fold] : split.fold_of) out << id << '\t' << to_string(fold) << '\n';
}

void write_split_file(const std::filesystem::path& path, const SplitAssignment& split) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write split file " + path.string());
  write_split(out, split);
}

SplitAssignment read_split(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  SplitAssignment split;
  std::size_t counts[3] = {0, 0, 0};
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (line_no == 1 && line == "record_id\tfold")) continue;
    const auto tab = line.find('\t');
    const auto fold =
        tab == std::string::npos ? std::nullopt : parse_fold(std::string_view(line).substr(tab + 1));
    if (!fold) throw DataError("split file line " + std::to_string(line_no) + ": malformed");
    if (!split.fold_of.emplace(line.substr(0, tab), *fold).second) {
      throw DataError("split file line " + std::to_string(line_no) + ": duplicate record_id");
    }
    ++counts[static_cast<int>(*fold)];
  }
  if (const double n = static_cast<double>(split.fold_of.size()); n > 0) {
    split.ratios = {counts[0] / n, counts[1] / n, counts[2] / n};
  }
  return split;
}

SplitAssignment read_split_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open split file " + path.string());
  return read_split(in);
}

}  // namespace shuxu
