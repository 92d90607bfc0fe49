// shuxu: letter-vs-preface title classification toolkit.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 remote failure.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shuxu/corpus.hpp"
#include "shuxu/error.hpp"
#include "shuxu/metrics.hpp"
#include "shuxu/pipeline.hpp"
#include "shuxu/predictions.hpp"
#include "shuxu/remote.hpp"
#include "shuxu/report.hpp"
#include "shuxu/rules.hpp"
#include "shuxu/splitter.hpp"
#include "shuxu/synthetic.hpp"

namespace {

using namespace shuxu;

struct CorpusOptions {
  std::string path;
  bool csv = false;
  std::vector<std::string> columns;  // field=Header overrides
};

struct FoldOptions {
  std::string split_file;
  std::optional<std::uint64_t> seed;
  std::string ratios = "0.8,0.1,0.1";
  std::string fold = "test";
};

void add_corpus_options(CLI::App* cmd, CorpusOptions& o, const std::string& flag = "--corpus") {
  cmd->add_option(flag, o.path, "Corpus file (UTF-8, header row)")->required();
  cmd->add_flag("--csv", o.csv, "Input is comma-separated instead of tab-separated");
  cmd->add_option("--column", o.columns, "Column mapping override, e.g. title=Title");
}

void add_fold_options(CLI::App* cmd, FoldOptions& o, bool with_fold = true) {
  cmd->add_option("--split", o.split_file, "Split file written by `shuxu split`");
  cmd->add_option("--seed", o.seed, "Compute a stratified split with this seed");
  cmd->add_option("--ratios", o.ratios, "train,dev,test ratios for --seed")->capture_default_str();
  if (with_fold) {
    cmd->add_option("--fold", o.fold, "Fold to use: train, dev, test or all")
        ->capture_default_str();
  }
}

Corpus load_corpus(const CorpusOptions& o, std::size_t* rejected = nullptr) {
  ColumnMapping mapping;
  if (o.csv) mapping.delimiter = ',';
  for (const auto& spec : o.columns) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw UsageError("--column expects field=Header");
    const auto field = spec.substr(0, eq);
    auto header = spec.substr(eq + 1);
    std::string* target = field == "record_id"           ? &mapping.record_id
                          : field == "title"             ? &mapping.title
                          : field == "label"             ? &mapping.label
                          : field == "author_id"         ? &mapping.author_id
                          : field == "recipient_id"      ? &mapping.recipient_id
                          : field == "relationship_code" ? &mapping.relationship_code
                          : field == "wenji_id"          ? &mapping.wenji_id
                          : field == "juan"              ? &mapping.juan
                                                         : nullptr;
    if (!target) throw UsageError("unknown corpus field '" + field + "'");
    *target = std::move(header);
  }
  auto result = read_corpus_file(o.path, mapping);
  for (const auto& e : result.rejected) {
    std::cerr << o.path << ":" << e.line << ": rejected: " << e.message << "\n";
  }
  if (rejected) *rejected = result.rejected.size();
  return std::move(result.corpus);
}

SplitRatios parse_ratios(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("malformed ratio '" + item + "'");
    }
  }
  if (parts.size() != 3) throw UsageError("--ratios expects three comma-separated values");
  return {parts[0], parts[1], parts[2]};
}

std::optional<SplitAssignment> load_split(const Corpus& corpus, const FoldOptions& o) {
  if (!o.split_file.empty()) return read_split_file(o.split_file);
  if (o.seed) return stratified_split(corpus, parse_ratios(o.ratios), *o.seed);
  return std::nullopt;
}

// Records of the requested fold, or the whole corpus when no split is given
// or the fold is "all".
std::vector<TitleRecord> select_records(const Corpus& corpus, const FoldOptions& o) {
  const auto split = load_split(corpus, o);
  if (!split || o.fold == "all") return corpus.records();
  const auto fold = parse_fold(o.fold);
  if (!fold) throw UsageError("unknown fold '" + o.fold + "'");
  return split->select(corpus, *fold);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

void emit_json(const nlohmann::json& doc, const std::string& path) {
  if (path.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    open_output(path) << doc.dump(2) << "\n";
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

void print_metrics(const std::string& system, const ConfusionMatrix& cm, const MetricsReport& m,
                   double coverage) {
  ComparisonTable table;
  table.rows.push_back({system, m, cm, coverage});
  std::cout << to_markdown(table);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Letter-vs-preface classification of wenji titles"};
  app.set_config("--config", "", "key=value configuration file; command-line flags win");
  app.require_subcommand(1);

  // ingest
  CorpusOptions ingest_corpus;
  std::string ingest_output;
  bool ingest_strict = false;
  auto* ingest = app.add_subcommand("ingest", "Validate and normalize a corpus file");
  add_corpus_options(ingest, ingest_corpus, "--input");
  ingest->add_option("--output", ingest_output, "Write the normalized TSV corpus here");
  ingest->add_flag("--strict", ingest_strict, "Exit with a data error if any row is rejected");

  // stats
  CorpusOptions stats_corpus;
  std::string stats_json;
  auto* stats = app.add_subcommand("stats", "Opening/terminal character distributions");
  add_corpus_options(stats, stats_corpus);
  stats->add_option("--json", stats_json, "Write JSON here instead of stdout");

  // split
  CorpusOptions split_corpus;
  std::uint64_t split_seed = 42;
  std::string split_ratios = "0.8,0.1,0.1";
  std::string split_output;
  auto* split = app.add_subcommand("split", "Deterministic stratified train/dev/test split");
  add_corpus_options(split, split_corpus);
  split->add_option("--seed", split_seed, "Random seed")->capture_default_str();
  split->add_option("--ratios", split_ratios, "train,dev,test")->capture_default_str();
  split->add_option("--output", split_output, "Split file (record_id<TAB>fold)")->required();

  // generate
  auto gen_config = GeneratorConfig::defaults();
  std::uint64_t gen_seed = 42;
  std::string gen_output;
  std::string gen_log;
  auto* generate = app.add_subcommand("generate", "Write a synthetic labeled corpus");
  generate->add_option("--letters", gen_config.n_letters, "Letter titles")->capture_default_str();
  generate->add_option("--prefaces", gen_config.n_prefaces, "Preface titles")
      ->capture_default_str();
  generate->add_option("--p-elliptical", gen_config.p_elliptical,
                       "Share of bare-name letter titles")
      ->capture_default_str();
  generate->add_option("--p-shu", gen_config.p_terminal_shu, "Share of letters ending in 書")
      ->capture_default_str();
  generate->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
  generate->add_option("--output", gen_output, "Corpus TSV")->required();
  generate->add_option("--draw-log", gen_log, "JSON draw log");

  // train
  CorpusOptions train_corpus;
  FoldOptions train_folds;
  std::string train_ngram = "2-2";
  std::size_t train_min_df = 2;
  TrainConfig train_config;
  bool train_unbalanced = false;
  std::string train_output;
  auto* train_cmd = app.add_subcommand("train", "Fit TF-IDF + logistic regression on the train fold");
  add_corpus_options(train_cmd, train_corpus);
  add_fold_options(train_cmd, train_folds, false);
  train_cmd->add_option("--ngram", train_ngram, "n-gram range MIN-MAX")->capture_default_str();
  train_cmd->add_option("--min-df", train_min_df, "Document-frequency floor")->capture_default_str();
  train_cmd->add_option("--c", train_config.l2_strength, "Inverse L2 strength")
      ->capture_default_str();
  train_cmd->add_option("--max-iter", train_config.max_iterations, "Iteration cap")
      ->capture_default_str();
  train_cmd->add_option("--tol", train_config.gradient_tolerance, "Gradient-norm tolerance")
      ->capture_default_str();
  train_cmd->add_flag("--unbalanced", train_unbalanced, "Disable balanced class weights");
  train_cmd->add_option("--output", train_output, "Model JSON")->required();

  // predict
  CorpusOptions predict_corpus;
  FoldOptions predict_folds;
  std::string predict_model;
  std::string predict_rule_name;
  RemoteOptions remote;
  long remote_timeout_ms = 10'000;
  std::vector<std::string> remote_headers;
  std::string predict_output;
  std::string predict_missing;
  auto* predict = app.add_subcommand("predict", "Write predictions as JSON lines");
  add_corpus_options(predict, predict_corpus);
  add_fold_options(predict, predict_folds);
  auto* opt_model = predict->add_option("--model", predict_model, "Model JSON from `train`");
  auto* opt_rule = predict->add_option("--rule", predict_rule_name,
                                       "majority|ends-with-shu|starts-with-verb|verb-and-shu|"
                                       "verb-or-shu");
  auto* opt_endpoint = predict->add_option("--endpoint", remote.endpoint, "Remote classifier URL");
  opt_model->excludes(opt_rule)->excludes(opt_endpoint);
  opt_rule->excludes(opt_endpoint);
  predict->add_option("--batch-size", remote.batch_size, "Remote batch size")->capture_default_str();
  predict->add_option("--timeout-ms", remote_timeout_ms, "Remote timeout")->capture_default_str();
  predict->add_option("--retries", remote.max_retries, "Remote retries")->capture_default_str();
  predict->add_option("--concurrency", remote.concurrency, "Concurrent remote batches")
      ->capture_default_str();
  predict->add_option("--header", remote_headers, "Extra request header 'Name: value'");
  predict->add_option("--missing", predict_missing, "Write ids the endpoint did not return");
  predict->add_option("--output", predict_output, "Predictions JSONL")->required();

  // eval
  CorpusOptions eval_corpus;
  FoldOptions eval_folds;
  std::string eval_predictions;
  std::string eval_json;
  auto* eval = app.add_subcommand("eval", "Score predictions on the matched subset");
  add_corpus_options(eval, eval_corpus);
  add_fold_options(eval, eval_folds);
  eval->add_option("--predictions", eval_predictions, "Predictions JSONL")->required();
  eval->add_option("--json", eval_json, "Write a JSON report here");

  // compare
  CorpusOptions cmp_corpus;
  FoldOptions cmp_folds;
  std::vector<std::string> cmp_systems;
  CompareOptions cmp_options;
  std::string cmp_json;
  std::string cmp_markdown;
  bool cmp_no_timestamp = false;
  auto* compare = app.add_subcommand("compare", "Fit on train, compare systems on test");
  add_corpus_options(compare, cmp_corpus);
  add_fold_options(compare, cmp_folds);
  compare->add_option("--system", cmp_systems,
                      "Rule name, tfidf-MIN-MAX, or external:[NAME=]PATH (repeatable)")
      ->required();
  compare->add_option("--min-df", cmp_options.min_df, "TF-IDF document-frequency floor")
      ->capture_default_str();
  compare->add_option("--c", cmp_options.training.l2_strength, "Inverse L2 strength")
      ->capture_default_str();
  compare->add_option("--max-iter", cmp_options.training.max_iterations, "Iteration cap")
      ->capture_default_str();
  compare->add_option("--json", cmp_json, "Comparison JSON");
  compare->add_option("--markdown", cmp_markdown, "Comparison markdown table");
  compare->add_flag("--no-timestamp", cmp_no_timestamp, "Omit the generated_at header");

  // inspect
  std::string inspect_model;
  std::size_t inspect_k = 20;
  std::string inspect_json;
  auto* inspect = app.add_subcommand("inspect", "Top-weighted n-grams of a trained model");
  inspect->add_option("--model", inspect_model, "Model JSON")->required();
  inspect->add_option("-k,--top", inspect_k, "Features per side")->capture_default_str();
  inspect->add_option("--json", inspect_json, "Write JSON here");

  // errors
  CorpusOptions err_corpus;
  FoldOptions err_folds;
  std::string err_predictions;
  std::string err_json;
  auto* errors = app.add_subcommand("errors", "List misclassified titles, shortest first");
  add_corpus_options(errors, err_corpus);
  add_fold_options(errors, err_folds);
  errors->add_option("--predictions", err_predictions, "Predictions JSONL")->required();
  errors->add_option("--json", err_json, "Write JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*ingest) {
      std::size_t rejected = 0;
      const auto corpus = load_corpus(ingest_corpus, &rejected);
      std::cerr << "ingested " << corpus.size() << " records, rejected " << rejected << "\n";
      if (!ingest_output.empty()) write_corpus_file(ingest_output, corpus);
      if (ingest_strict && rejected > 0) return 2;
    } else if (*stats) {
      emit_json(to_json(corpus_stats(load_corpus(stats_corpus))), stats_json);
    } else if (*split) {
      const auto corpus = load_corpus(split_corpus);
      const auto assignment = stratified_split(corpus, parse_ratios(split_ratios), split_seed);
      write_split_file(split_output, assignment);
      std::size_t counts[3] = {0, 0, 0};
      for (const auto& [id, fold] : assignment.fold_of) ++counts[static_cast<int>(fold)];
      std::cerr << "train " << counts[0] << ", dev " << counts[1] << ", test " << counts[2]
                << "\n";
    } else if (*generate) {
      const auto synthetic = generate_synthetic(gen_config, gen_seed);
      write_corpus_file(gen_output, synthetic.corpus);
      if (!gen_log.empty()) open_output(gen_log) << to_json(synthetic.draw_log).dump(1) << "\n";
    } else if (*train_cmd) {
      const auto corpus = load_corpus(train_corpus);
      auto folds = train_folds;
      folds.fold = "train";
      const auto records = select_records(corpus, folds);
      const auto spec = resolve_system("tfidf-" + train_ngram);
      auto features = spec.featurizer;
      features.min_df = train_min_df;
      train_config.balanced_weights = !train_unbalanced;
      const auto classifier = fit_classifier(records, features, train_config);
      save_classifier(train_output, classifier);
      const auto& d = classifier.model.diagnostics();
      std::cerr << "trained on " << records.size() << " titles, " << classifier.featurizer.dimension()
                << " features, " << d.iterations << " iterations, loss " << d.final_loss
                << ", gradient norm " << d.gradient_norm << (d.converged ? "" : " (not converged)")
                << "\n";
    } else if (*predict) {
      const auto corpus = load_corpus(predict_corpus);
      const auto records = select_records(corpus, predict_folds);
      PredictionSet predictions;
      if (!predict_model.empty()) {
        predictions = load_classifier(predict_model).predict(records);
      } else if (!predict_rule_name.empty()) {
        const auto kind = parse_rule_kind(predict_rule_name);
        if (!kind) throw UsageError("unknown rule '" + predict_rule_name + "'");
        RuleSpec rule;
        rule.kind = *kind;
        predictions = predict_rule(records, rule);
      } else if (!remote.endpoint.empty()) {
        remote.timeout = std::chrono::milliseconds(remote_timeout_ms);
        for (const auto& h : remote_headers) {
          const auto colon = h.find(':');
          if (colon == std::string::npos) throw UsageError("--header expects 'Name: value'");
          auto value = h.substr(colon + 1);
          value.erase(0, value.find_first_not_of(' '));
          remote.headers.emplace_back(h.substr(0, colon), value);
        }
        auto result = remote_classify(records, remote);
        if (!result.missing_ids.empty()) {
          std::cerr << result.missing_ids.size() << " record(s) missing from the endpoint's replies\n";
        }
        if (!predict_missing.empty()) {
          auto out = open_output(predict_missing);
          for (const auto& id : result.missing_ids) out << id << "\n";
        }
        predictions = std::move(result.predictions);
      } else {
        throw UsageError("predict needs one of --model, --rule or --endpoint");
      }
      write_predictions_file(predict_output, predictions);
    } else if (*eval) {
      const auto corpus = load_corpus(eval_corpus);
      const auto records = select_records(corpus, eval_folds);
      const auto predictions = load_predictions_file(eval_predictions);
      const auto result = evaluate_matched(predictions, records);
      print_metrics(predictions.system_name, result.matrix, result.metrics, result.coverage);
      if (!eval_json.empty()) {
        emit_json({{"system", predictions.system_name},
                   {"metrics", to_json(result.metrics)},
                   {"confusion", to_json(result.matrix)},
                   {"matched", result.matched},
                   {"gold_size", result.gold_size},
                   {"coverage", result.coverage}},
                  eval_json);
      }
    } else if (*compare) {
      // Usage problems surface before any file is read.
      std::vector<SystemSpec> specs;
      for (const auto& s : cmp_systems) specs.push_back(resolve_system(s));
      const auto fold = parse_fold(cmp_folds.fold);
      if (!fold) throw UsageError("unknown fold '" + cmp_folds.fold + "'");
      cmp_options.eval_fold = *fold;
      const auto corpus = load_corpus(cmp_corpus);
      auto folds = cmp_folds;
      if (folds.split_file.empty() && !folds.seed) folds.seed = 42;
      const auto assignment = *load_split(corpus, folds);
      const auto table = run_compare(corpus, assignment, specs, cmp_options);
      const std::optional<std::string> stamp =
          cmp_no_timestamp ? std::nullopt : std::optional<std::string>(utc_timestamp());
      if (!cmp_json.empty()) open_output(cmp_json) << to_json(table, stamp).dump(2) << "\n";
      const auto md = to_markdown(table, stamp);
      if (!cmp_markdown.empty()) open_output(cmp_markdown) << md;
      std::cout << md;
    } else if (*inspect) {
      const auto classifier = load_classifier(inspect_model);
      const auto top = top_features(classifier.model, classifier.featurizer, inspect_k);
      nlohmann::json doc = {{"letter", nlohmann::json::array()}, {"preface", nlohmann::json::array()}};
      std::cout << "letter\tweight\t\tpreface\tweight\n";
      for (std::size_t i = 0; i < std::max(top.letter.size(), top.preface.size()); ++i) {
        if (i < top.letter.size()) {
          std::cout << top.letter[i].ngram << "\t" << std::fixed << std::setprecision(4)
                    << top.letter[i].weight;
          doc["letter"].push_back({{"ngram", top.letter[i].ngram}, {"weight", top.letter[i].weight}});
        } else {
          std::cout << "\t";
        }
        std::cout << "\t\t";
        if (i < top.preface.size()) {
          std::cout << top.preface[i].ngram << "\t" << std::fixed << std::setprecision(4)
                    << top.preface[i].weight;
          doc["preface"].push_back(
              {{"ngram", top.preface[i].ngram}, {"weight", top.preface[i].weight}});
        }
        std::cout << "\n";
      }
      if (!inspect_json.empty()) emit_json(doc, inspect_json);
    } else if (*errors) {
      const auto corpus = load_corpus(err_corpus);
      const auto records = select_records(corpus, err_folds);
      const auto report = list_errors(load_predictions_file(err_predictions), records);
      std::cout << "record_id\tlength\tgold\tpredicted\ttitle\n";
      for (const auto& e : report.entries) {
        std::cout << e.record_id << "\t" << e.length << "\t" << to_string(e.gold) << "\t"
                  << to_string(e.predicted) << "\t" << e.title << "\n";
      }
      if (!err_json.empty()) emit_json(to_json(report), err_json);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const RemoteError& e) {
    std::cerr << "remote error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
