#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "test_util.hpp"
#include "toxspan/augment.hpp"

using namespace toxspan;

namespace {

SynonymLexicon test_synonyms() {
  return {{"dumb", {"stupid"}},
          {"bad", {"awful", "terrible"}},
          {"nice", {"kind", "pleasant", "good"}},
          {"dog", {"hound"}}};
}

int toxic_count(const Document& doc) {
  int n = 0;
  for (const auto& w : WordView::of(doc).words) n += w.toxic ? 1 : 0;
  return n;
}

int word_count(const Document& doc) {
  return static_cast<int>(WordView::of(doc).words.size());
}

// Label integrity: the document must be exactly in rebuilt form, with gold
// equal to the union of its fully covered toxic words.
void check_rebuilt_form(const Document& doc) {
  const Document roundtrip = WordView::of(doc).rebuild(doc.id);
  CHECK(roundtrip == doc);
  const std::size_t len = charlen(doc.text);
  for (int off : doc.gold) CHECK(static_cast<std::size_t>(off) < len);
}

std::mt19937_64 rng64(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace

TEST_CASE("budget follows n = alpha * l with a floor of one") {
  CHECK(budget(20, 0.1) == 2);
  CHECK(budget(0, 0.5) == 0);
  CHECK(budget(3, 0.1) == 1);  // alpha*l rounds to 0; the floor applies
  CHECK(budget(10, 0.8) == 8);
  CHECK(budget(1, 1.0) == 1);
  CHECK(budget(25, 0.1) == 3);  // 2.5 rounds half away from zero
}

TEST_CASE("word view round trips toxicity flags") {
  const Document doc{"d", "he is dumb", SpanSet::from_range(6, 9)};
  const WordView view = WordView::of(doc);
  REQUIRE(view.words.size() == 3);
  CHECK_FALSE(view.words[0].toxic);
  CHECK_FALSE(view.words[1].toxic);
  CHECK(view.words[2].toxic);
  CHECK(view.rebuild("d") == doc);

  // Partial overlap counts the whole word as toxic.
  const Document partial{"d", "he is dumb", SpanSet({7})};
  CHECK(WordView::of(partial).words[2].toxic);

  // Multiple spaces collapse in the rebuild.
  const Document spaced{"d", "a  b", SpanSet{}};
  CHECK(WordView::of(spaced).rebuild("d").text == "a b");
}

TEST_CASE("synonym replacement rewrites surfaces and keeps labels") {
  const Document doc{"d", "he is dumb", SpanSet::from_range(6, 9)};
  auto rng = rng64(1);
  const Document out = synonym_replacement(doc, 1, test_synonyms(), rng);
  CHECK(out.text == "he is stupid");
  CHECK(out.gold == SpanSet::from_range(6, 11));

  auto rng2 = rng64(1);
  CHECK(synonym_replacement(doc, 0, test_synonyms(), rng2) == doc);

  const Document ineligible{"d", "x y z", SpanSet{}};
  auto rng3 = rng64(1);
  CHECK(synonym_replacement(ineligible, 2, test_synonyms(), rng3) == ineligible);
}

TEST_CASE("random insertion adds non-toxic words and shifts gold") {
  const Document doc{"d", "dumb", SpanSet::from_range(0, 3)};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto rng = rng64(seed);
    const Document out = random_insertion(doc, 1, test_synonyms(), rng);
    CHECK(word_count(out) == 2);
    CHECK(toxic_count(out) == 1);
    check_rebuilt_form(out);
    // Insertion before the toxic word shifts its range by len + 1.
    const WordView view = WordView::of(out);
    if (!view.words[0].toxic) {
      const int shift = static_cast<int>(charlen(view.words[0].surface)) + 1;
      CHECK(out.gold == SpanSet::from_range(shift, shift + 3));
    } else {
      CHECK(out.gold == SpanSet::from_range(0, 3));
    }
  }
  auto rng = rng64(3);
  CHECK(random_insertion(doc, 0, test_synonyms(), rng) == WordView::of(doc).rebuild("d"));
  const Document empty{"d", "", SpanSet{}};
  auto rng2 = rng64(3);
  CHECK(random_insertion(empty, 2, test_synonyms(), rng2).text.empty());
}

TEST_CASE("random swap moves gold with the word") {
  const Document doc{"d", "dumb guy", SpanSet::from_range(0, 3)};
  auto rng = rng64(5);
  const Document out = random_swap(doc, 1, rng);
  CHECK(out.text == "guy dumb");
  CHECK(out.gold == SpanSet::from_range(4, 7));

  const Document single{"d", "word", SpanSet{}};
  auto rng2 = rng64(5);
  CHECK(random_swap(single, 3, rng2) == single);

  auto rng3 = rng64(5);
  CHECK(random_swap(doc, 0, rng3) == doc);
}

TEST_CASE("random deletion removes words but never the last one") {
  const Document doc{"d", "only dumb here", SpanSet::from_range(5, 8)};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto rng = rng64(seed);
    const Document out = random_deletion(doc, 1, rng);
    CHECK(word_count(out) == 2);
    check_rebuilt_form(out);
    if (toxic_count(out) == 0) CHECK(out.gold.empty());
  }
  // Deleting everything leaves exactly one surviving word.
  auto rng = rng64(9);
  const Document out = random_deletion(doc, 99, rng);
  CHECK(word_count(out) == 1);

  // Deleting the only toxic word clears the gold set.
  const Document two_words{"d", "x dumb", SpanSet::from_range(2, 5)};
  bool saw_toxic_deleted = false;
  for (std::uint64_t seed = 0; seed < 10 && !saw_toxic_deleted; ++seed) {
    auto r = rng64(seed);
    const Document out = random_deletion(two_words, 1, r);
    if (out.text == "x") {
      CHECK(out.gold.empty());
      saw_toxic_deleted = true;
    }
  }
  CHECK(saw_toxic_deleted);

  // n = 0 is the identity.
  const Document toxic_only{"d", "dumb", SpanSet::from_range(0, 3)};
  auto rng2 = rng64(9);
  CHECK(random_deletion(toxic_only, 0, rng2).gold == SpanSet::from_range(0, 3));
}

TEST_CASE("every operation preserves label integrity on random documents") {
  const SynonymLexicon lex = test_synonyms();
  std::mt19937 rng(101);
  std::vector<std::string> words = {"dumb", "bad", "nice", "dog", "cat", "tree", "runs"};
  for (int trial = 0; trial < 500; ++trial) {
    Document doc;
    doc.id = std::to_string(trial);
    const int n_words = 1 + static_cast<int>(rng() % 8);
    int pos = 0;
    for (int w = 0; w < n_words; ++w) {
      if (w > 0) {
        doc.text += ' ';
        ++pos;
      }
      const std::string& word = words[rng() % words.size()];
      const int len = static_cast<int>(word.size());
      if (rng() % 3 == 0) doc.gold.add_range(pos, pos + len - 1);
      doc.text += word;
      pos += len;
    }
    const int n = budget(word_count(doc), 0.3);
    const int before_toxic = toxic_count(doc);
    const int before_words = word_count(doc);

    auto r1 = rng64(trial);
    const Document sr = synonym_replacement(doc, n, lex, r1);
    check_rebuilt_form(sr);
    CHECK(toxic_count(sr) == before_toxic);
    CHECK(word_count(sr) == before_words);

    auto r2 = rng64(trial);
    const Document ri = random_insertion(doc, n, lex, r2);
    check_rebuilt_form(ri);
    CHECK(toxic_count(ri) == before_toxic);
    CHECK(word_count(ri) >= before_words);

    auto r3 = rng64(trial);
    const Document rs = random_swap(doc, n, r3);
    check_rebuilt_form(rs);
    CHECK(toxic_count(rs) == before_toxic);
    CHECK(word_count(rs) == before_words);

    auto r4 = rng64(trial);
    const Document rd = random_deletion(doc, n, r4);
    check_rebuilt_form(rd);
    CHECK(toxic_count(rd) <= before_toxic);
    CHECK(word_count(rd) == std::max(1, before_words - n));
  }
}

TEST_CASE("augment_corpus extends the corpus deterministically") {
  std::mt19937 rng(103);
  std::vector<Document> corpus;
  for (int i = 0; i < 12; ++i) {
    Document doc;
    doc.id = "doc" + std::to_string(i);
    doc.text = "the dog is dumb and bad today";
    doc.gold = SpanSet::from_range(11, 14);  // "dumb"
    corpus.push_back(std::move(doc));
  }

  AugmentConfig cfg;
  cfg.alpha = 0.3;
  cfg.seed = 99;
  cfg.synonyms = test_synonyms();

  const auto out = augment_corpus(corpus, cfg);
  CHECK(out.size() == 2 * corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) CHECK(out[i] == corpus[i]);
  for (std::size_t i = corpus.size(); i < out.size(); ++i) {
    check_rebuilt_form(out[i]);
    CHECK(out[i].id == corpus[i - corpus.size()].id + "-aug1");
  }
  CHECK(augment_corpus(corpus, cfg) == out);

  cfg.seed = 100;
  CHECK(augment_corpus(corpus, cfg) != out);

  cfg.per_doc_copies = 3;
  CHECK(augment_corpus(corpus, cfg).size() == 4 * corpus.size());
}

TEST_CASE("synonym replacement alone at high alpha") {
  AugmentConfig cfg;
  cfg.alpha = 0.8;
  cfg.operations = {EdaOp::SR};
  cfg.synonyms = test_synonyms();
  std::vector<Document> corpus = {{"0", "a dumb and bad dog", SpanSet::from_range(2, 5)}};
  const auto out = augment_corpus(corpus, cfg);
  REQUIRE(out.size() == 2);
  CHECK(word_count(out[1]) == 5);
  CHECK(toxic_count(out[1]) == 1);
}

TEST_CASE("augment configuration validation") {
  AugmentConfig cfg;
  cfg.synonyms = test_synonyms();
  cfg.per_doc_copies = 0;
  CHECK_THROWS_AS(augment_corpus({}, cfg), ConfigError);
  cfg.per_doc_copies = 1;
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(augment_corpus({}, cfg), ConfigError);
  cfg.alpha = 0.1;
  cfg.synonyms.clear();
  CHECK_THROWS_AS(augment_corpus({}, cfg), ConfigError);
  cfg.operations = {EdaOp::RS, EdaOp::RD};
  CHECK(augment_corpus({}, cfg).empty());  // no synonyms needed without SR/RI
}

TEST_CASE("no enabled operations passes the corpus through") {
  AugmentConfig cfg;
  cfg.operations = {};
  cfg.per_doc_copies = 3;
  std::vector<Document> corpus = {{"0", "a b c", SpanSet({0})}};
  CHECK(augment_corpus(corpus, cfg) == corpus);
}
