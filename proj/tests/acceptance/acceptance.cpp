// Acceptance gate: one PASS/FAIL line per criterion; nonzero exit on any failure.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "shuxu/logreg.hpp"
#include "shuxu/metrics.hpp"
#include "shuxu/pipeline.hpp"
#include "shuxu/random.hpp"
#include "shuxu/rules.hpp"
#include "shuxu/splitter.hpp"
#include "shuxu/synthetic.hpp"
#include "shuxu/tfidf.hpp"

using namespace shuxu;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failed expectations for one criterion.
struct Check {
  Outcome out;
  std::ostringstream notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      out.pass = false;
      if (!out.detail.empty()) out.detail += "; ";
      out.detail += what;
    }
  }
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

GeneratorConfig sized(std::size_t letters, std::size_t prefaces, double p_elliptical) {
  auto c = GeneratorConfig::defaults();
  c.n_letters = letters;
  c.n_prefaces = prefaces;
  c.p_elliptical = p_elliptical;
  return c;
}

MetricsReport score_rule(RuleKind kind, std::span<const TitleRecord> records) {
  RuleSpec rule;
  rule.kind = kind;
  return compute_metrics(confusion(predict_rule(records, rule), records));
}

// ---------------------------------------------------------------------------

Outcome reference_metrics() {
  struct Row {
    const char* name;
    ConfusionMatrix cm;
    double acc, p, r, f1, macro;
  };
  const Row rows[] = {
      {"majority", {321, 223, 0, 0}, 0.590, 0.590, 1.000, 0.742, 0.371},
      {"ends-with-shu", {29, 0, 292, 223}, 0.463, 1.000, 0.090, 0.166, 0.385},
      {"verb-and-shu", {26, 0, 295, 223}, 0.458, 1.000, 0.081, 0.150, 0.376},
      {"starts-with-verb", {273, 3, 48, 220}, 0.906, 0.989, 0.851, 0.915, 0.905},
      {"verb-or-shu", {276, 3, 45, 220}, 0.912, 0.989, 0.860, 0.920, 0.911},
      {"tfidf-2-2", {319, 42, 2, 181}, 0.919, 0.884, 0.994, 0.935, 0.914},
      {"tfidf-2-3", {318, 40, 3, 183}, 0.921, 0.888, 0.991, 0.937, 0.916},
      {"tfidf-2-4", {318, 40, 3, 183}, 0.921, 0.888, 0.991, 0.937, 0.916},
      {"fine-tuned", {182, 0, 6, 70}, 0.977, 1.000, 0.968, 0.984, 0.971},
  };
  Check c;
  double worst = 0.0;
  for (const auto& row : rows) {
    const auto m = compute_metrics(row.cm);
    const double diffs[] = {m.accuracy - row.acc, m.precision_letter - row.p,
                            m.recall_letter - row.r, m.f1_letter - row.f1, m.macro_f1 - row.macro};
    for (double d : diffs) {
      worst = std::max(worst, std::abs(d));
      c.expect(std::abs(d) <= 0.0015, std::string(row.name) + " off by " + fmt(d));
    }
  }
  if (c.out.pass) c.out.detail = "9 rows, max deviation " + fmt(worst);
  return c.out;
}

Outcome split_sizes() {
  std::vector<TitleRecord> records;
  for (std::size_t i = 0; i < 5438; ++i) {
    TitleRecord r;
    r.record_id = "r" + std::to_string(i);
    r.title = i < 3206 ? "與王生書" : "送王生序";
    r.label = i < 3206 ? Label::Letter : Label::Preface;
    records.push_back(std::move(r));
  }
  const Corpus corpus(std::move(records), "sizes");
  const auto split = stratified_split(corpus, {0.8, 0.1, 0.1}, 42);
  std::size_t letters = 0;
  std::size_t prefaces = 0;
  for (const auto& r : split.select(corpus, Fold::Test)) {
    (r.label == Label::Letter ? letters : prefaces) += 1;
  }
  Check c;
  c.expect(letters == 321 && prefaces == 223,
           "test fold " + std::to_string(letters) + "/" + std::to_string(prefaces));
  c.out.detail = c.out.pass ? "test fold 321 letter + 223 preface" : c.out.detail;
  return c.out;
}

Outcome rule_ladder() {
  const auto s = generate_synthetic(sized(5900, 4100, 0.02), 42);
  const auto& records = s.corpus.records();
  const auto shu = score_rule(RuleKind::EndsWithShu, records);
  const auto verb = score_rule(RuleKind::StartsWithVerb, records);
  const auto either = score_rule(RuleKind::VerbOrShu, records);
  Check c;
  c.expect(std::abs(shu.recall_letter - 0.09) <= 0.02,
           "ends-with-shu recall " + fmt(shu.recall_letter));
  c.expect(verb.recall_letter >= 0.80, "starts-with-verb recall " + fmt(verb.recall_letter));
  c.expect(either.recall_letter >= verb.recall_letter, "verb-or-shu recall below starts-with-verb");
  c.expect(shu.precision_letter == 1.0, "ends-with-shu precision " + fmt(shu.precision_letter));
  if (c.out.pass) {
    c.out.detail = "recall shu=" + fmt(shu.recall_letter) + " verb=" + fmt(verb.recall_letter) +
                   " verb|shu=" + fmt(either.recall_letter) +
                   " shu precision=" + fmt(shu.precision_letter);
  }
  return c.out;
}

Outcome learner_vs_rules() {
  Check c;
  std::string detail;
  for (double p_ell : {0.02, 0.0}) {
    const auto s = generate_synthetic(sized(5900, 4100, p_ell), 42);
    const auto split = stratified_split(s.corpus, {}, 42);
    const auto train = split.select(s.corpus, Fold::Train);
    const auto test = split.select(s.corpus, Fold::Test);
    const auto classifier = fit_classifier(train, {2, 2, 2}, {});
    const auto learned = compute_metrics(confusion(classifier.predict(test), test));
    const auto rule = score_rule(RuleKind::VerbOrShu, test);
    c.expect(learned.f1_letter >= rule.f1_letter,
             "p_ell=" + fmt(p_ell, 2) + " learner F1 " + fmt(learned.f1_letter) + " < rule " +
                 fmt(rule.f1_letter));
    if (p_ell == 0.0) {
      c.expect(learned.f1_letter >= 0.97, "p_ell=0 learner F1 " + fmt(learned.f1_letter));
    }
    detail += (detail.empty() ? "" : ", ") + std::string("p_ell=") + fmt(p_ell, 2) +
              ": F1 tfidf-2-2=" + fmt(learned.f1_letter) + " verb-or-shu=" + fmt(rule.f1_letter);
  }
  if (c.out.pass) c.out.detail = detail;
  return c.out;
}

Outcome gradient_check() {
  Pcg32 rng(2718, 1);
  const double h = 1e-5;
  double worst = 0.0;
  int points = 0;
  for (int dataset = 0; dataset < 3; ++dataset) {
    const std::size_t dim = 3 + 2 * dataset;
    std::vector<FeatureVector> x;
    std::vector<Label> y;
    for (std::size_t i = 0; i < 15 + 5 * static_cast<std::size_t>(dataset); ++i) {
      FeatureVector v;
      for (std::uint32_t j = 0; j < dim; ++j) {
        if (rng.bounded(3) != 0) v.entries.emplace_back(j, rng.uniform() * 2.0 - 1.0);
      }
      x.push_back(std::move(v));
      y.push_back(rng.bounded(5) < 3 ? Label::Letter : Label::Preface);
    }
    const LogisticObjective objective(x, y, dim, {0.8 + 0.1 * dataset, 1.3}, 1.0 + dataset);
    for (int p = 0; p < 5; ++p, ++points) {
      std::vector<double> params(objective.parameter_count());
      for (auto& v : params) v = rng.uniform() * 2.0 - 1.0;
      std::vector<double> grad(params.size());
      objective.value_and_gradient(params, grad);
      double diff = 0.0;
      double na = 0.0;
      double nn = 0.0;
      for (std::size_t j = 0; j < params.size(); ++j) {
        auto up = params;
        auto down = params;
        up[j] += h;
        down[j] -= h;
        const double numeric = (objective.value(up) - objective.value(down)) / (2.0 * h);
        diff += (grad[j] - numeric) * (grad[j] - numeric);
        na += grad[j] * grad[j];
        nn += numeric * numeric;
      }
      worst = std::max(worst, std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nn), 1e-12}));
    }
  }
  Check c;
  c.expect(worst <= 1e-4, "max relative error " + std::to_string(worst));
  if (c.out.pass) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "3 datasets x 5 points, max relative error %.2e", worst);
    c.out.detail = buf;
  }
  return c.out;
}

Outcome tfidf_oracle() {
  const std::vector<std::string> titles = {"與友人書", "答友人書", "送友序"};
  FeaturizerConfig config;
  config.ngram_min = 2;
  config.ngram_max = 3;
  config.min_df = 2;
  const auto model = TfidfModel::fit(titles, config);
  // Hand enumeration: 友人, 人書, 友人書 each occur in two of three titles.
  const std::vector<std::string> vocab = {"人書", "友人", "友人書"};
  const double idf = 1.2876820724517808;       // ln(4/3) + 1
  const double weight = 0.5773502691896258;    // three equal terms, L2-normalized
  Check c;
  c.expect(model.dimension() == vocab.size(), "vocabulary size " + std::to_string(model.dimension()));
  for (std::size_t i = 0; i < std::min(vocab.size(), model.dimension()); ++i) {
    c.expect(model.ngram(i) == vocab[i], "term " + std::to_string(i) + " is " + model.ngram(i));
    c.expect(model.df(i) == 2, "df of " + vocab[i]);
    c.expect(std::abs(model.idf(i) - idf) <= 1e-9, "idf of " + vocab[i]);
  }
  const auto v = model.transform("與友人書");
  c.expect(v.entries.size() == 3, "transform has " + std::to_string(v.entries.size()) + " terms");
  for (const auto& [i, w] : v.entries) c.expect(std::abs(w - weight) <= 1e-9, "weight " + fmt(w, 12));
  c.expect(model.transform("送友序").empty(), "送友序 should have no in-vocabulary terms");
  if (c.out.pass) c.out.detail = "df, idf and weights within 1e-9";
  return c.out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SHUXU_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("shuxu_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  Check c;

  // Raw input with a BOM and CRLF line endings, as exported by a spreadsheet.
  const auto s = generate_synthetic(sized(600, 400, 0.02), 7);
  {
    std::ostringstream tsv;
    write_corpus(tsv, s.corpus);
    std::string raw = "\xEF\xBB\xBF";
    for (char ch : tsv.str()) {
      if (ch == '\n') raw += '\r';
      raw += ch;
    }
    std::ofstream(dir / "raw.tsv", std::ios::binary) << raw;
  }

  const std::vector<std::string> artifacts = {"corpus.tsv", "split.tsv", "model.json",
                                              "pred.jsonl", "cmp.json",  "cmp.md"};
  for (const std::string run : {"a", "b"}) {
    const auto p = [&](const std::string& f) { return (dir / (run + "_" + f)).string(); };
    const std::string steps[] = {
        "ingest --input " + (dir / "raw.tsv").string() + " --output " + p("corpus.tsv"),
        "split --corpus " + p("corpus.tsv") + " --seed 42 --output " + p("split.tsv"),
        "train --corpus " + p("corpus.tsv") + " --split " + p("split.tsv") + " --output " +
            p("model.json"),
        "predict --corpus " + p("corpus.tsv") + " --split " + p("split.tsv") + " --model " +
            p("model.json") + " --output " + p("pred.jsonl"),
        "compare --corpus " + p("corpus.tsv") + " --split " + p("split.tsv") +
            " --system majority --system verb-or-shu --system tfidf-2-2 --system external:" +
            p("pred.jsonl") + " --json " + p("cmp.json") + " --markdown " + p("cmp.md"),
    };
    for (const auto& step : steps) {
      const int code = run_cli(step);
      c.expect(code == 0, "exit " + std::to_string(code) + " from: " + step.substr(0, step.find(' ')));
    }
  }
  if (c.out.pass) {
    for (const auto& f : artifacts) {
      std::string a = slurp(dir / ("a_" + f));
      std::string b = slurp(dir / ("b_" + f));
      if (f == "cmp.json") {
        auto ja = nlohmann::json::parse(a);
        auto jb = nlohmann::json::parse(b);
        ja.erase("metadata");
        jb.erase("metadata");
        a = ja.dump();
        b = jb.dump();
      } else if (f == "cmp.md") {
        a.erase(0, a.find('\n') + 1);
        b.erase(0, b.find('\n') + 1);
      }
      c.expect(!a.empty() && a == b, f + " differs between runs");
    }
  }
  fs::remove_all(dir);
  if (c.out.pass) c.out.detail = "ingest, split, train, predict, compare: 6 artifacts identical";
  return c.out;
}

Outcome error_analysis() {
  const auto s = generate_synthetic(sized(5900, 4100, 0.05), 42);
  std::set<std::string> elliptical;
  for (const auto& log : s.draw_log) {
    if (log.branch == "elliptical") elliptical.insert(log.record_id);
  }
  RuleSpec rule;
  rule.kind = RuleKind::VerbOrShu;
  const auto& records = s.corpus.records();
  const auto pred = predict_rule(records, rule);
  const auto report = list_errors(pred, records);

  std::size_t fn = 0;
  std::size_t fn_elliptical = 0;
  bool elliptical_first = true;
  bool seen_other = false;
  for (const auto& e : report.entries) {
    const bool is_ell = elliptical.count(e.record_id) > 0;
    if (e.gold == Label::Letter) {
      ++fn;
      fn_elliptical += is_ell;
    }
    if (is_ell && seen_other) elliptical_first = false;
    if (!is_ell) seen_other = true;
  }
  const double share = fn == 0 ? 0.0 : static_cast<double>(fn_elliptical) / static_cast<double>(fn);
  Check c;
  c.expect(fn > 0, "no false negatives");
  c.expect(share >= 0.90, "elliptical share of false negatives " + fmt(share));
  c.expect(elliptical_first, "an elliptical error follows a non-elliptical one");
  if (c.out.pass) {
    c.out.detail = std::to_string(fn_elliptical) + "/" + std::to_string(fn) +
                   " false negatives elliptical (" + fmt(share, 3) + "), all listed first";
  }
  return c.out;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"reference metric reproduction", reference_metrics},
      {"split-size reproduction", split_sizes},
      {"rule-ladder ordering on synthetic data", rule_ladder},
      {"learner beats rules on its signal", learner_vs_rules},
      {"gradient correctness", gradient_check},
      {"tf-idf oracle equivalence", tfidf_oracle},
      {"determinism suite", determinism},
      {"error-analysis property", error_analysis},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    failures += !o.pass;
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
