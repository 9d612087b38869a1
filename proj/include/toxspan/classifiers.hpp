#pragma once

// Pluggable token-toxicity scorers. Every classifier returns one score in
// [0, 1] per token, aligned with the input sequence.

#include <cmath>
#include <cstdint>
#include <istream>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "toxspan/error.hpp"
#include "toxspan/span_set.hpp"
#include "toxspan/tokenizer.hpp"
#include "toxspan/unicode.hpp"

namespace toxspan {

class TokenClassifier {
 public:
  virtual ~TokenClassifier() = default;
  virtual std::vector<double> predict(const TokenSequence& seq) const = 0;
};

struct RandomBaselineConfig {
  double threshold = 0.5;  // include a character iff its draw exceeds this
  std::uint32_t seed = 0;
};

// Draws one uniform value per character of the text and marks the character
// toxic iff rho > threshold. Draws are taken as raw 32-bit generator output
// scaled to [0, 1), so fixed seeds reproduce bit-identical spans everywhere.
inline SpanSet random_char_predict(std::string_view text, const RandomBaselineConfig& cfg) {
  if (cfg.threshold < 0.0 || cfg.threshold > 1.0) {
    throw ConfigError("random baseline threshold must be in [0, 1]");
  }
  std::mt19937 rng(cfg.seed);
  const std::size_t len = charlen(text);
  std::vector<int> offsets;
  for (std::size_t i = 0; i < len; ++i) {
    const double rho = rng() * (1.0 / 4294967296.0);
    if (rho > cfg.threshold) offsets.push_back(static_cast<int>(i));
  }
  return SpanSet(std::move(offsets));
}

using Lexicon = std::unordered_set<std::string>;

// Scores 1.0 for every token of a word whose (optionally casefolded)
// surface is in the lexicon, 0.0 otherwise.
inline std::vector<double> lexicon_predict(const TokenSequence& seq, const Lexicon& lexicon,
                                           bool casefold) {
  const std::vector<std::string> words = seq.word_surfaces();
  std::vector<bool> word_hit(words.size(), false);
  for (std::size_t w = 0; w < words.size(); ++w) {
    const std::string key = casefold ? lowercase(words[w]) : words[w];
    word_hit[w] = lexicon.count(key) > 0;
  }
  std::vector<double> scores;
  scores.reserve(seq.tokens.size());
  for (const Token& tok : seq.tokens) {
    scores.push_back(word_hit[static_cast<std::size_t>(tok.word_index)] ? 1.0 : 0.0);
  }
  return scores;
}

class LexiconClassifier : public TokenClassifier {
 public:
  explicit LexiconClassifier(Lexicon lexicon, bool casefold = true)
      : lexicon_(std::move(lexicon)), casefold_(casefold) {}

  std::vector<double> predict(const TokenSequence& seq) const override {
    return lexicon_predict(seq, lexicon_, casefold_);
  }

 private:
  Lexicon lexicon_;
  bool casefold_;
};

// Label 1 iff score > tau.
inline std::vector<int> threshold_labels(const std::vector<double>& scores, double tau) {
  if (tau < 0.0 || tau > 1.0) throw ConfigError("threshold must be in [0, 1]");
  std::vector<int> labels;
  labels.reserve(scores.size());
  for (double s : scores) labels.push_back(s > tau ? 1 : 0);
  return labels;
}

class SentenceClassifier {
 public:
  virtual ~SentenceClassifier() = default;
  // Score in [0, 1]; the sentence is labeled toxic iff score > 0.5.
  virtual double predict(std::string_view sentence) const = 0;
};

class LexiconSentenceClassifier : public SentenceClassifier {
 public:
  explicit LexiconSentenceClassifier(Lexicon lexicon, bool casefold = true)
      : lexicon_(std::move(lexicon)), casefold_(casefold) {}

  double predict(std::string_view sentence) const override {
    for (const Word& word : pre_tokenize(sentence)) {
      const std::string key = casefold_ ? lowercase(word.surface) : word.surface;
      if (lexicon_.count(key) > 0) return 1.0;
    }
    return 0.0;
  }

 private:
  Lexicon lexicon_;
  bool casefold_;
};

// Linear model over bag-of-word features, squashed to [0, 1].
class LinearSentenceClassifier : public SentenceClassifier {
 public:
  LinearSentenceClassifier() = default;
  explicit LinearSentenceClassifier(std::unordered_map<std::string, double> weights)
      : weights_(std::move(weights)) {}

  double predict(std::string_view sentence) const override {
    double margin = 0.0;
    if (auto it = weights_.find("b"); it != weights_.end()) margin += it->second;
    for (const Word& word : pre_tokenize(sentence)) {
      if (auto it = weights_.find("w=" + lowercase(word.surface)); it != weights_.end()) {
        margin += it->second;
      }
    }
    return 1.0 / (1.0 + std::exp(-margin));
  }

  std::unordered_map<std::string, double>& weights() { return weights_; }

 private:
  std::unordered_map<std::string, double> weights_;
};

// Averaged-perceptron training of the bag-of-words sentence classifier over
// (sentence, label) pairs.
inline LinearSentenceClassifier train_sentence_linear(
    const std::vector<std::pair<std::string, int>>& data, int epochs, std::uint32_t seed) {
  if (data.empty()) throw EmptyCorpus("no sentences to train on");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  std::unordered_map<std::string, double> w;
  std::unordered_map<std::string, double> cum;
  std::vector<std::vector<std::string>> feats(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    feats[i].push_back("b");
    for (const Word& word : pre_tokenize(data[i].first)) {
      feats[i].push_back("w=" + lowercase(word.surface));
    }
  }
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937 rng(seed);
  long long t = 1;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng() % i]);
    }
    for (std::size_t i : order) {
      double margin = 0.0;
      for (const std::string& f : feats[i]) {
        if (auto it = w.find(f); it != w.end()) margin += it->second;
      }
      const int y = data[i].second ? 1 : -1;
      if (y * margin <= 0) {
        for (const std::string& f : feats[i]) {
          w[f] += y;
          cum[f] += static_cast<double>(t) * y;
        }
      }
      ++t;
    }
  }
  for (auto& [f, weight] : w) weight -= cum[f] / static_cast<double>(t);
  return LinearSentenceClassifier(std::move(w));
}

// External per-token scores keyed by document id, one JSONL object per line:
// {"id": "...", "scores": [0.1, ...]}. Lets external scorers feed the
// pipeline.
struct ScoreTable {
  std::unordered_map<std::string, std::vector<double>> scores;

  static ScoreTable load_jsonl(std::istream& in) {
    ScoreTable table;
    std::string line;
    std::size_t record = 0;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw MalformedRecord("scores record " + std::to_string(record) + ": " + e.what());
      }
      if (!obj.is_object() || !obj.contains("id") || !obj.contains("scores") ||
          !obj["scores"].is_array()) {
        throw MalformedRecord("scores record " + std::to_string(record) +
                              ": expected {\"id\", \"scores\"}");
      }
      const std::string id =
          obj["id"].is_string() ? obj["id"].get<std::string>() : obj["id"].dump();
      std::vector<double> values;
      for (const auto& v : obj["scores"]) {
        if (!v.is_number()) {
          throw MalformedRecord("scores record " + std::to_string(record) +
                                ": non-numeric score");
        }
        const double s = v.get<double>();
        if (s < 0.0 || s > 1.0) {
          throw MalformedRecord("scores record " + std::to_string(record) +
                                ": score out of [0, 1]");
        }
        values.push_back(s);
      }
      table.scores[id] = std::move(values);
      ++record;
    }
    return table;
  }
};

}  // namespace toxspan
