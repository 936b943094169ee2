#include <sensevoc/eval.hpp>
#include <sensevoc/hypernyms.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "support/fixtures.hpp"

using namespace sensevoc;

namespace {

Corpus tsv(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_corpus_tsv(in, "eval.tsv");
}

// train observes only the animal sense of "mouse"
const std::string_view kTrain = "mouse\t\t\tmouse%1:03:00::\n";

// eval: mouse (device sense), prey, unit, and an unknown word
const std::string_view kEval =
    "mouse\t\t\tmouse%1:03:01::\n"
    "prey\t\t\tprey%1:03:00::\n"
    "unit\t\t\tunit%1:03:00::\n"
    "blorp\tblorp\tn\tblorp%1:03:00::\n";

}  // namespace

TEST_CASE("system coverage counts candidate tags seen in training", "[eval]") {
  WordNetGraph graph = svtest::mouse_prey_fixture().parse();
  SenseMapping fine = compress_synonymy(graph);
  SenseMapping coarse = compress_hypernymy(graph);
  Corpus train = tsv(std::string(kTrain));
  Corpus eval_corpus = tsv(std::string(kEval));

  SECTION("fine mapping, no backoff") {
    CoverageReport r = system_coverage(train, eval_corpus, fine, graph);
    CHECK(r.total_instances == 4);
    CHECK(r.covered == 1);  // only "mouse" has a sense whose tag was seen
    REQUIRE(r.misses.size() == 3);
    CHECK(r.misses[0].instance_id == "s0.t1");
    CHECK(r.misses[0].lemma == "prey");
    CHECK(r.misses[1].lemma == "unit");
    CHECK(r.misses[2].lemma == "blorp");  // unknown to the graph
    CHECK(r.misses[2].pos == Pos::noun);
    CHECK(r.coverage_pct == Catch::Approx(25.0));
    CHECK_FALSE(r.monosemic_backoff);
  }

  SECTION("monosemic backoff rescues unit but not blorp") {
    CoverageReport r = system_coverage(train, eval_corpus, fine, graph, true);
    CHECK(r.covered == 2);
    CHECK(r.misses.size() == 2);
    CHECK(r.coverage_pct == Catch::Approx(50.0));
    CHECK(r.monosemic_backoff);
  }

  SECTION("the coarser mapping covers at least as much") {
    CoverageReport fine_r = system_coverage(train, eval_corpus, fine, graph);
    CoverageReport coarse_r = system_coverage(train, eval_corpus, coarse, graph);
    CHECK(coarse_r.covered == 2);  // prey#1 shares the animal tag now
    CHECK(coarse_r.coverage_pct == Catch::Approx(50.0));
    CHECK(coarse_r.covered >= fine_r.covered);
  }

  SECTION("an empty eval corpus reports zero instances") {
    Corpus empty;
    CoverageReport r = system_coverage(train, empty, fine, graph);
    CHECK(r.total_instances == 0);
    CHECK(r.coverage_pct == 0.0);
  }
}

TEST_CASE("first-sense baseline predicts sense number one", "[eval]") {
  WordNetGraph graph = svtest::mouse_prey_fixture().parse();
  Corpus eval_corpus = tsv(std::string(kEval));

  PredictionSet preds = first_sense_predict(eval_corpus, graph);
  REQUIRE(preds.predictions.size() == 3);  // blorp stays unpredicted
  CHECK(preds.predictions.at("s0.t0") == std::vector<std::string>{"mouse%1:03:00::"});
  CHECK(preds.predictions.at("s0.t1") == std::vector<std::string>{"prey%1:03:00::"});
  CHECK(preds.predictions.at("s0.t2") == std::vector<std::string>{"unit%1:03:00::"});
  CHECK(preds.backoff_used == 0);

  ScoreReport score = score_f1(eval_corpus, preds);
  CHECK(score.total == 4);
  CHECK(score.attempted == 3);
  CHECK(score.correct == 2);  // prey and unit; the mouse gold is the device
  CHECK(score.precision == Catch::Approx(200.0 / 3.0));
  CHECK(score.recall == Catch::Approx(50.0));
  CHECK(score.f1 == Catch::Approx(2.0 * (200.0 / 3.0) * 50.0 / (200.0 / 3.0 + 50.0)));
  CHECK_FALSE(score.zero_attempted);
  REQUIRE(score.per_pos.size() == 1);
  CHECK(score.per_pos.at(Pos::noun).total == 4);
}

TEST_CASE("MFS baseline follows training tag frequencies", "[eval]") {
  WordNetGraph graph = svtest::mouse_prey_fixture().parse();
  SenseMapping fine = compress_synonymy(graph);
  SenseMapping coarse = compress_hypernymy(graph);
  Corpus eval_corpus = tsv(std::string(kEval));

  SECTION("unobserved words back off to the first sense") {
    Corpus train = tsv(std::string(kTrain));
    PredictionSet preds = mfs_predict(train, eval_corpus, fine, graph);
    REQUIRE(preds.predictions.size() == 3);
    CHECK(preds.predictions.at("s0.t0") ==
          std::vector<std::string>{"mouse%1:03:00::"});  // observed tag wins
    CHECK(preds.predictions.at("s0.t1") ==
          std::vector<std::string>{"prey%1:03:00::"});  // backoff
    CHECK(preds.backoff_used == 2);                     // prey and unit

    PredictionSet strict = mfs_predict(train, eval_corpus, fine, graph, false);
    CHECK(strict.predictions.size() == 1);  // only mouse
    CHECK(strict.backoff_used == 0);
  }

  SECTION("coarse tags steer the pick and decompress to the right sense") {
    Corpus train = tsv(
        "prey\t\t\tprey%1:03:01::\n"
        "prey\t\t\tprey%1:03:01::\n"
        "mouse\t\t\tmouse%1:03:01::\n");
    PredictionSet preds = mfs_predict(train, eval_corpus, coarse, graph);
    // the artifact tag was seen once, so the device sense of mouse wins
    CHECK(preds.predictions.at("s0.t0") ==
          std::vector<std::string>{"mouse%1:03:01::"});
    // the person tag was seen twice, beating the unseen animal tag
    CHECK(preds.predictions.at("s0.t1") ==
          std::vector<std::string>{"prey%1:03:01::"});
    CHECK(preds.backoff_used == 1);  // unit

    ScoreReport score = score_f1(eval_corpus, preds);
    CHECK(score.correct == 2);  // mouse and unit
    CHECK(score.attempted == 3);
    CHECK(score.backoff_used == 1);
  }

  SECTION("frequency ties fall to the lower sense number") {
    Corpus train = tsv(
        "mouse\t\t\tmouse%1:03:00::\n"
        "mouse\t\t\tmouse%1:03:01::\n");
    PredictionSet preds = mfs_predict(train, eval_corpus, fine, graph);
    CHECK(preds.predictions.at("s0.t0") ==
          std::vector<std::string>{"mouse%1:03:00::"});
  }
}

TEST_CASE("scoring handles edge cases and POS breakdown", "[eval]") {
  SECTION("per-POS breakdown by hand") {
    std::vector<GoldInstance> gold = {
        {"n1", "cat", Pos::noun, {"a"}},
        {"n2", "dog", Pos::noun, {"b"}},
        {"v1", "run", Pos::verb, {"c"}},
    };
    PredictionSet preds;
    preds.predictions["n1"] = {"a"};
    preds.predictions["v1"] = {"x"};
    ScoreReport r = score_f1(gold, preds);
    CHECK(r.total == 3);
    CHECK(r.attempted == 2);
    CHECK(r.correct == 1);
    CHECK(r.precision == Catch::Approx(50.0));
    CHECK(r.recall == Catch::Approx(100.0 / 3.0));
    CHECK(r.f1 == Catch::Approx(40.0));
    REQUIRE(r.per_pos.size() == 2);
    const PosScore& nouns = r.per_pos.at(Pos::noun);
    CHECK(nouns.total == 2);
    CHECK(nouns.attempted == 1);
    CHECK(nouns.correct == 1);
    CHECK(nouns.precision == Catch::Approx(100.0));
    CHECK(nouns.recall == Catch::Approx(50.0));
    CHECK(nouns.f1 == Catch::Approx(200.0 / 3.0));
    const PosScore& verbs = r.per_pos.at(Pos::verb);
    CHECK(verbs.attempted == 1);
    CHECK(verbs.correct == 0);
    CHECK(verbs.f1 == 0.0);
  }

  SECTION("any shared key counts as correct") {
    std::vector<GoldInstance> gold = {{"i", "w", Pos::noun, {"a", "b"}}};
    PredictionSet preds;
    preds.predictions["i"] = {"z", "b"};
    CHECK(score_f1(gold, preds).correct == 1);
  }

  SECTION("zero attempts is a warning, not an error") {
    std::vector<GoldInstance> gold = {{"i", "w", Pos::noun, {"a"}}};
    ScoreReport r = score_f1(gold, PredictionSet{});
    CHECK(r.zero_attempted);
    CHECK(r.precision == 0.0);
    CHECK(r.recall == 0.0);
    CHECK(r.f1 == 0.0);
  }

  SECTION("duplicate gold ids are rejected") {
    std::vector<GoldInstance> gold = {{"i", "w", Pos::noun, {"a"}},
                                      {"i", "w", Pos::noun, {"b"}}};
    CHECK_THROWS_AS(score_f1(gold, PredictionSet{}), ValidationError);
  }

  SECTION("predictions for unknown instances are rejected") {
    std::vector<GoldInstance> gold = {{"i", "w", Pos::noun, {"a"}}};
    PredictionSet preds;
    preds.predictions["j"] = {"a"};
    CHECK_THROWS_AS(score_f1(gold, preds), std::invalid_argument);
  }
}

TEST_CASE("key files round-trip predictions", "[eval]") {
  PredictionSet preds;
  preds.predictions["d0.s0.t1"] = {"mouse%1:03:00::"};
  preds.predictions["d0.s1.t4"] = {"prey%1:03:00::", "prey%1:03:01::"};

  std::ostringstream out;
  write_key_file(out, preds);
  CHECK(out.str() ==
        "d0.s0.t1 mouse%1:03:00::\n"
        "d0.s1.t4 prey%1:03:00:: prey%1:03:01::\n");

  std::istringstream in(out.str());
  PredictionSet again = read_key_file(in, "keys");
  CHECK(again.predictions == preds.predictions);
  CHECK(again.backoff_used == 0);  // key files carry no metadata

  SECTION("comments and blank lines are skipped") {
    std::istringstream cin("# header\n\nx a%1:03:00::\n");
    CHECK(read_key_file(cin, "keys").predictions.size() == 1);
  }

  SECTION("malformed lines are rejected") {
    std::istringstream only_id("x\n");
    CHECK_THROWS_AS(read_key_file(only_id, "keys"), ParseError);
    std::istringstream dup("x a\nx b\n");
    CHECK_THROWS_AS(read_key_file(dup, "keys"), ParseError);
  }
}

TEST_CASE("gold instances recover lemma and POS from keys", "[eval]") {
  PredictionSet file;
  file.predictions["i1"] = {"mouse%1:03:00::"};
  file.predictions["i2"] = {"run%2:30:00::", "run%2:30:01::"};
  file.predictions["i3"] = {"able%5:00:00:able:00"};

  auto gold = gold_from_key_file(file);
  REQUIRE(gold.size() == 3);
  CHECK(gold[0].lemma == "mouse");
  CHECK(gold[0].pos == Pos::noun);
  CHECK(gold[1].lemma == "run");
  CHECK(gold[1].pos == Pos::verb);
  CHECK(gold[1].keys.size() == 2);
  CHECK(gold[2].lemma == "able");
  CHECK(gold[2].pos == Pos::adjective);  // satellites fold into the adjective index

  PredictionSet bad;
  bad.predictions["i"] = {"nopercent"};
  CHECK_THROWS_AS(gold_from_key_file(bad), ParseError);

  SECTION("scoring a corpus against its own gold keys is perfect") {
    WordNetGraph graph = svtest::mouse_prey_fixture().parse();
    Corpus corpus = tsv(
        "mouse\t\t\tmouse%1:03:01::\n"
        "prey\t\t\tprey%1:03:00::\n");
    PredictionSet self;
    for (const GoldInstance& g : gold_instances(corpus))
      self.predictions[g.id] = g.keys;
    ScoreReport r = score_f1(corpus, self);
    CHECK(r.correct == 2);
    CHECK(r.f1 == Catch::Approx(100.0));
  }
}
