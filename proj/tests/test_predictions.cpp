#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "shuxu/error.hpp"
#include "shuxu/predictions.hpp"
#include "shuxu/rules.hpp"

using namespace shuxu;

namespace {

PredictionSet load(const std::string& text) {
  std::istringstream in(text);
  return load_predictions(in);
}

std::string error_of(const std::string& text) {
  try {
    load(text);
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("a valid two-prediction file") {
  const auto p = load(
      "{\"system_name\": \"bert-base\"}\n"
      "{\"record_id\": \"a\", \"label\": \"letter\", \"score\": 0.93}\n"
      "{\"record_id\": \"b\", \"label\": \"Preface\"}\n");
  CHECK(p.system_name == "bert-base");
  REQUIRE(p.size() == 2);
  CHECK(p.find("a")->score == doctest::Approx(0.93));
  CHECK(p.find("b")->label == Label::Preface);
  CHECK_FALSE(p.find("b")->score.has_value());
}

TEST_CASE("duplicate ids are rejected with the line number") {
  const auto msg = error_of(
      "{\"system_name\": \"x\"}\n"
      "{\"record_id\": \"a\", \"label\": \"letter\"}\n"
      "{\"record_id\": \"a\", \"label\": \"preface\"}\n");
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("duplicate") != std::string::npos);
}

TEST_CASE("schema violations name their line") {
  CHECK(error_of("{\"system_name\": \"x\"}\n{\"record_id\": \"a\", \"label\": \"memo\"}\n")
            .find("line 2: unknown label") != std::string::npos);
  CHECK(error_of("{\"system_name\": \"x\"}\n{\"label\": \"letter\"}\n").find("line 2") !=
        std::string::npos);
  CHECK(error_of("{\"system_name\": \"x\"}\nnot json\n").find("line 2") != std::string::npos);
  CHECK(error_of("{\"system_name\": \"x\"}\n{\"record_id\": \"a\", \"label\": \"letter\", "
                 "\"score\": 1.5}\n")
            .find("line 2") != std::string::npos);
  CHECK(error_of("{\"record_id\": \"a\", \"label\": \"letter\"}\n").find("line 1") !=
        std::string::npos);
  CHECK_FALSE(error_of("").empty());
}

TEST_CASE("rule predictions written then reloaded are equal") {
  Pcg32 rng(3, 3);
  const auto records = testing::random_records(rng, 200);
  for (auto kind : {RuleKind::EndsWithShu, RuleKind::VerbOrShu}) {
    RuleSpec rule;
    rule.kind = kind;
    const auto original = predict_rule(records, rule);
    std::ostringstream out;
    write_predictions(out, original);
    CHECK(load(out.str()) == original);
  }
}

TEST_CASE("scores round-trip exactly") {
  PredictionSet p;
  p.system_name = "probe";
  p.add("x", {Label::Letter, 0.1 + 0.2});
  p.add("y", {Label::Preface, 1e-300});
  std::ostringstream out;
  write_predictions(out, p);
  CHECK(load(out.str()) == p);
  CHECK_THROWS_AS(p.add("x", {Label::Letter, std::nullopt}), DataError);
}
