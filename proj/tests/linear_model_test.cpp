#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "test_util.hpp"
#include "toxspan/linear_model.hpp"

using namespace toxspan;

namespace {

const std::vector<std::string> kBenign = {"the",  "quick", "brown", "fox",  "jumps",
                                          "over", "lazy",  "dog",   "park", "today"};

// Documents built from benign words with "idiot" planted as the only toxic
// word; gold covers exactly the planted occurrences.
std::vector<Document> planted_corpus(std::mt19937& rng, int n_docs) {
  std::vector<Document> docs;
  for (int d = 0; d < n_docs; ++d) {
    Document doc;
    doc.id = std::to_string(d);
    const int n_words = 4 + static_cast<int>(rng() % 6);
    const int toxic_at = (d % 3 == 0) ? static_cast<int>(rng() % n_words) : -1;
    int pos = 0;
    for (int w = 0; w < n_words; ++w) {
      if (w > 0) {
        doc.text += ' ';
        ++pos;
      }
      const std::string& word =
          (w == toxic_at) ? "idiot" : kBenign[rng() % kBenign.size()];
      if (w == toxic_at) {
        doc.gold.add_range(pos, pos + static_cast<int>(word.size()) - 1);
      }
      doc.text += word;
      pos += static_cast<int>(word.size());
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<LabeledTokenSequence> label_corpus(const std::vector<Document>& docs,
                                               const Vocabulary& vocab) {
  std::vector<LabeledTokenSequence> out;
  for (const Document& doc : docs) {
    out.push_back(project_labels(tokenize(doc.text, vocab), doc.gold));
  }
  return out;
}

}  // namespace

TEST_CASE("training on separable data separates the planted word") {
  const Vocabulary vocab = testutil::char_vocab({"idiot", "the", "quick", "brown", "fox",
                                                 "jumps", "over", "lazy", "dog", "park",
                                                 "today"});
  std::mt19937 rng(71);
  const auto train_docs = planted_corpus(rng, 60);
  const auto corpus = label_corpus(train_docs, vocab);
  const LinearModel model = train_linear(corpus, 10, 7);

  // Reaches perfect training accuracy on separable data.
  CHECK(model.epoch_accuracy.back() == 1.0);

  // Held-out text from the same vocabulary; the lexicon oracle gives truth.
  const auto eval_docs = planted_corpus(rng, 30);
  const Lexicon oracle_lex = {"idiot"};
  for (const Document& doc : eval_docs) {
    const TokenSequence seq = tokenize(doc.text, vocab);
    const std::vector<double> scores = predict_linear(model, seq);
    const std::vector<double> oracle = lexicon_predict(seq, oracle_lex, true);
    REQUIRE(scores.size() == oracle.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (oracle[i] == 1.0) CHECK(scores[i] > 0.5);
      else CHECK(scores[i] < 0.5);
    }
  }
}

TEST_CASE("training accuracy never falls below the zero model") {
  const Vocabulary vocab = testutil::char_vocab();
  std::mt19937 rng(73);
  const auto docs = planted_corpus(rng, 40);
  const auto corpus = label_corpus(docs, vocab);

  long long tokens = 0;
  long long negatives = 0;
  for (const auto& ex : corpus) {
    for (int l : ex.labels) {
      ++tokens;
      if (l == 0) ++negatives;
    }
  }
  const double zero_model_accuracy = static_cast<double>(negatives) / tokens;
  const LinearModel model = train_linear(corpus, 8, 3);
  CHECK(model.epoch_accuracy.back() >= zero_model_accuracy);
}

TEST_CASE("all-negative corpus scores below one half everywhere") {
  const Vocabulary vocab = testutil::char_vocab();
  std::vector<LabeledTokenSequence> corpus;
  std::mt19937 rng(79);
  for (int d = 0; d < 20; ++d) {
    const std::string text = testutil::random_text(rng, 8);
    TokenSequence seq = tokenize(text, vocab);
    std::vector<int> labels(seq.tokens.size(), 0);
    corpus.push_back({std::move(seq), std::move(labels)});
  }
  const LinearModel model = train_linear(corpus, 5, 1);
  const TokenSequence seq = tokenize("anything else here", vocab);
  for (double s : predict_linear(model, seq)) CHECK(s < 0.5);
}

TEST_CASE("training rejects bad inputs") {
  CHECK_THROWS_AS(train_linear({}, 5, 0), EmptyCorpus);
  const Vocabulary vocab = testutil::char_vocab();
  TokenSequence seq = tokenize("a b", vocab);
  std::vector<LabeledTokenSequence> corpus;
  corpus.push_back({seq, std::vector<int>(seq.tokens.size(), 0)});
  CHECK_THROWS_AS(train_linear(corpus, 0, 0), ConfigError);
  corpus[0].labels.pop_back();
  CHECK_THROWS_AS(train_linear(corpus, 1, 0), LengthMismatch);
}

TEST_CASE("prediction on an empty sequence is empty") {
  const Vocabulary vocab = testutil::char_vocab();
  LinearModel model;
  CHECK(predict_linear(model, tokenize("", vocab)).empty());
}

TEST_CASE("zero margin maps to score 0.5 and weight mass is monotone") {
  const Vocabulary vocab = testutil::char_vocab({"idiot"});
  LinearModel model;  // zero weights
  const TokenSequence seq = tokenize("idiot", vocab);
  std::vector<double> scores = predict_linear(model, seq);
  REQUIRE(scores.size() == 1);
  CHECK(scores[0] == 0.5);

  // Recompute the margin by hand from the feature template.
  model.weights["s=idiot"] = 2.0;
  model.weights["b"] = -0.5;
  const std::vector<std::string> words = seq.word_surfaces();
  const std::vector<std::string> feats = token_features(seq, words, 0);
  double expected = 0.0;
  for (const std::string& f : feats) {
    auto it = model.weights.find(f);
    if (it != model.weights.end()) expected += it->second;
  }
  CHECK(expected == 1.5);
  CHECK(predict_linear(model, seq)[0] == Catch::Approx(1.0 / (1.0 + std::exp(-1.5))));

  // Adding positive mass to a firing feature never lowers the score.
  const double before = predict_linear(model, seq)[0];
  model.weights["s=idiot"] += 1.0;
  CHECK(predict_linear(model, seq)[0] >= before);
}

TEST_CASE("feature template contents") {
  const Vocabulary vocab({"mo", "##ron", "he", "is"}, "[UNK]");
  const TokenSequence cased = tokenize("he is moron", vocab);
  REQUIRE(cased.tokens.size() == 4);  // he, is, mo, ##ron
  const std::vector<std::string> cwords = cased.word_surfaces();
  const auto feats = token_features(cased, cwords, 3);  // ##ron
  CHECK(std::find(feats.begin(), feats.end(), "s=ron") != feats.end());
  CHECK(std::find(feats.begin(), feats.end(), "sh=x") != feats.end());
  CHECK(std::find(feats.begin(), feats.end(), "pw=is") != feats.end());
  CHECK(std::find(feats.begin(), feats.end(), "nw=</s>") != feats.end());
  CHECK(std::find(feats.begin(), feats.end(), "c") != feats.end());

  const auto first = token_features(cased, cwords, 0);
  CHECK(std::find(first.begin(), first.end(), "pw=<s>") != first.end());
}

TEST_CASE("model persistence round trips and is byte-stable") {
  const Vocabulary vocab = testutil::char_vocab({"idiot"});
  std::mt19937 rng(83);
  const auto corpus = label_corpus(planted_corpus(rng, 25), vocab);
  const LinearModel model = train_linear(corpus, 4, 11);

  std::ostringstream out1;
  save_model(out1, model);
  std::ostringstream out2;
  save_model(out2, model);
  CHECK(out1.str() == out2.str());

  std::istringstream in(out1.str());
  const LinearModel loaded = load_model(in);
  CHECK(loaded.epochs_trained == model.epochs_trained);
  CHECK(loaded.averaged == model.averaged);
  REQUIRE(loaded.weights.size() == model.weights.size());
  for (const auto& [f, w] : model.weights) {
    REQUIRE(loaded.weights.count(f) == 1);
    CHECK(loaded.weights.at(f) == w);
  }

  // Retraining with the same seed reproduces the same bytes.
  const LinearModel again = train_linear(corpus, 4, 11);
  std::ostringstream out3;
  save_model(out3, again);
  CHECK(out3.str() == out1.str());

  std::istringstream empty("");
  CHECK_THROWS_AS(load_model(empty), ModelFormatError);
  std::istringstream wrong("some-other-format/9\n");
  CHECK_THROWS_AS(load_model(wrong), ModelFormatError);
  std::istringstream badline(std::string(LinearModel::kFormatVersion) + "\nnotabline\n");
  CHECK_THROWS_AS(load_model(badline), ModelFormatError);
}
