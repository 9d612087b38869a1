#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "test_util.hpp"
#include "toxspan/classifiers.hpp"

using namespace toxspan;

TEST_CASE("random baseline draws one value per character") {
  CHECK(random_char_predict("", {0.5, 7}).empty());
  CHECK(random_char_predict("any text at all", {1.0, 7}).empty());

  std::string text(100000, 'x');
  const SpanSet spans = random_char_predict(text, {0.5, 42});
  const double rate = static_cast<double>(spans.size()) / 100000.0;
  CHECK(rate > 0.48);
  CHECK(rate < 0.52);

  // Monte-Carlo check at a different threshold.
  const SpanSet sparse = random_char_predict(text, {0.9, 42});
  const double sparse_rate = static_cast<double>(sparse.size()) / 100000.0;
  CHECK(sparse_rate > 0.08);
  CHECK(sparse_rate < 0.12);

  CHECK_THROWS_AS(random_char_predict("x", {1.5, 0}), ConfigError);
}

TEST_CASE("random baseline is reproducible bit-exactly") {
  const std::string text = "some toxic comment text";
  CHECK(random_char_predict(text, {0.5, 123}) == random_char_predict(text, {0.5, 123}));
  CHECK(random_char_predict(text, {0.5, 123}) != random_char_predict(text, {0.5, 124}));
}

TEST_CASE("random baseline counts code points") {
  // 4 two-byte characters: draws happen per character, not per byte.
  const std::string text = "\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9";
  const SpanSet spans = random_char_predict(text, {0.0, 9});
  for (int off : spans) CHECK(off < 4);
}

TEST_CASE("lexicon scoring marks whole words") {
  const Vocabulary vocab = testutil::char_vocab();
  const TokenSequence seq = tokenize("he is a moron", vocab);
  const Lexicon lexicon = {"moron"};
  const std::vector<double> scores = lexicon_predict(seq, lexicon, false);
  REQUIRE(scores.size() == seq.tokens.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool in_moron = seq.tokens[i].word_index == 3;
    CHECK(scores[i] == (in_moron ? 1.0 : 0.0));
  }

  CHECK(lexicon_predict(seq, {}, false) == std::vector<double>(seq.tokens.size(), 0.0));

  const TokenSequence shouty = tokenize("MORON", vocab);
  CHECK(lexicon_predict(shouty, lexicon, false) ==
        std::vector<double>(shouty.tokens.size(), 0.0));
  for (double s : lexicon_predict(shouty, lexicon, true)) CHECK(s == 1.0);
}

TEST_CASE("lexicon scoring covers every piece of a multi-piece word") {
  const Vocabulary vocab({"mo", "##ron", "ok"}, "[UNK]");
  const TokenSequence seq = tokenize("ok moron", vocab);
  REQUIRE(seq.tokens.size() == 3);
  const std::vector<double> scores = lexicon_predict(seq, {"moron"}, true);
  CHECK(scores == std::vector<double>{0.0, 1.0, 1.0});
}

TEST_CASE("threshold_labels") {
  CHECK(threshold_labels({0.4, 0.6}, 0.5) == std::vector<int>{0, 1});
  CHECK(threshold_labels({0.0, 0.1, 1.0}, 0.0) == std::vector<int>{0, 1, 1});
  CHECK(threshold_labels({}, 0.5).empty());
  CHECK_THROWS_AS(threshold_labels({0.5}, 1.5), ConfigError);

  // Sweeping tau never increases the positive count.
  std::mt19937 rng(19);
  std::vector<double> scores;
  for (int i = 0; i < 200; ++i) scores.push_back((rng() % 1000) / 999.0);
  int prev = static_cast<int>(scores.size()) + 1;
  for (double tau = 0.0; tau <= 1.0; tau += 0.05) {
    const std::vector<int> labels = threshold_labels(scores, tau);
    int positives = 0;
    for (int l : labels) positives += l;
    CHECK(positives <= prev);
    prev = positives;
  }
}

TEST_CASE("threshold positives are nested as tau grows") {
  std::mt19937 rng(67);
  std::vector<double> scores;
  for (int i = 0; i < 100; ++i) scores.push_back((rng() % 1000) / 999.0);
  const std::vector<int> low = threshold_labels(scores, 0.3);
  const std::vector<int> high = threshold_labels(scores, 0.7);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (high[i]) CHECK(low[i]);
  }
}

TEST_CASE("lexicon sentence classifier") {
  const LexiconSentenceClassifier clf({"moron"});
  CHECK(clf.predict("what a moron.") == 1.0);
  CHECK(clf.predict("What a MORON!") == 1.0);
  CHECK(clf.predict("perfectly fine") == 0.0);
  CHECK(clf.predict("") == 0.0);
}

TEST_CASE("linear sentence classifier trains on separable sentences") {
  std::vector<std::pair<std::string, int>> data;
  const std::vector<std::string> toxic = {"you are a moron", "what a moron move",
                                          "moron take", "such a moron thing"};
  const std::vector<std::string> clean = {"have a nice day", "the sky is blue",
                                          "what a day", "such a thing"};
  for (int rep = 0; rep < 3; ++rep) {
    for (const auto& s : toxic) data.emplace_back(s, 1);
    for (const auto& s : clean) data.emplace_back(s, 0);
  }
  const LinearSentenceClassifier clf = train_sentence_linear(data, 10, 3);
  CHECK(clf.predict("a moron idea") > 0.5);
  CHECK(clf.predict("a nice idea") < 0.5);

  CHECK_THROWS_AS(train_sentence_linear({}, 5, 0), EmptyCorpus);
  CHECK_THROWS_AS(train_sentence_linear(data, 0, 0), ConfigError);
}

TEST_CASE("classifier outputs stay aligned and bounded") {
  const Vocabulary vocab = testutil::char_vocab();
  std::mt19937 rng(89);
  const LexiconClassifier lex_clf(Lexicon{"bad", "x", "qq"});
  LinearModel model;
  model.weights["b"] = 3.0;  // saturate the squashing on purpose
  model.weights["s=bad"] = -9.0;
  const LinearTokenClassifier lin_clf(model);
  for (int trial = 0; trial < 100; ++trial) {
    const TokenSequence seq = tokenize(testutil::random_text(rng), vocab);
    for (const TokenClassifier* clf :
         {static_cast<const TokenClassifier*>(&lex_clf),
          static_cast<const TokenClassifier*>(&lin_clf)}) {
      const std::vector<double> scores = clf->predict(seq);
      REQUIRE(scores.size() == seq.tokens.size());
      for (double s : scores) {
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
      }
    }
  }
}

TEST_CASE("score table loads jsonl keyed by document id") {
  std::istringstream in(
      "{\"id\": \"a\", \"scores\": [0.1, 0.9]}\n"
      "{\"id\": 3, \"scores\": []}\n");
  const ScoreTable table = ScoreTable::load_jsonl(in);
  REQUIRE(table.scores.size() == 2);
  CHECK(table.scores.at("a") == std::vector<double>{0.1, 0.9});
  CHECK(table.scores.at("3").empty());

  std::istringstream bad1("{\"id\": \"a\"}\n");
  CHECK_THROWS_AS(ScoreTable::load_jsonl(bad1), MalformedRecord);
  std::istringstream bad2("{\"id\": \"a\", \"scores\": [1.5]}\n");
  CHECK_THROWS_AS(ScoreTable::load_jsonl(bad2), MalformedRecord);
  std::istringstream bad3("garbage\n");
  CHECK_THROWS_AS(ScoreTable::load_jsonl(bad3), MalformedRecord);
}
