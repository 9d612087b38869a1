#pragma once

// Feature-based averaged perceptron over tokens: a deterministic,
// dependency-free stand-in for a fine-tuned neural token classifier. The
// per-token margin is squashed through a logistic so scores live in [0, 1]
// with 0.5 at zero margin.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "toxspan/classifiers.hpp"
#include "toxspan/error.hpp"
#include "toxspan/tokenizer.hpp"
#include "toxspan/unicode.hpp"

namespace toxspan {

struct LinearModel {
  static constexpr const char* kFormatVersion = "toxspan-linear/1";
  // The template set behind kFormatVersion; bump the version when it changes.
  static constexpr const char* kFeatureTemplates[] = {
      "bias", "surface", "shape", "prefix3", "suffix3", "prev_word", "next_word",
      "continuation"};

  std::unordered_map<std::string, double> weights;
  int epochs_trained = 0;
  bool averaged = true;
  std::vector<double> epoch_accuracy;  // online accuracy per training epoch

  double margin(const std::vector<std::string>& features) const {
    double m = 0.0;
    for (const std::string& f : features) {
      if (auto it = weights.find(f); it != weights.end()) m += it->second;
    }
    return m;
  }

  double score(const std::vector<std::string>& features) const {
    return 1.0 / (1.0 + std::exp(-margin(features)));
  }
};

namespace detail {

// Word shape with collapsed runs: "Moron!" -> "Xx", "b52" -> "x9".
inline std::string word_shape(std::string_view surface) {
  std::string shape;
  char prev = 0;
  for (char32_t cp : decode_utf8(surface)) {
    char cls;
    if (cp >= U'A' && cp <= U'Z') cls = 'X';
    else if (cp >= U'a' && cp <= U'z') cls = 'x';
    else if (cp >= U'0' && cp <= U'9') cls = '9';
    else if (is_punctuation(cp)) cls = 'p';
    else cls = 'u';
    if (cls != prev) shape.push_back(cls);
    prev = cls;
  }
  return shape;
}

inline std::string char_prefix(const std::u32string& cps, std::size_t n) {
  return encode_utf8(std::u32string_view(cps).substr(0, std::min(n, cps.size())));
}

inline std::string char_suffix(const std::u32string& cps, std::size_t n) {
  const std::size_t take = std::min(n, cps.size());
  return encode_utf8(std::u32string_view(cps).substr(cps.size() - take, take));
}

}  // namespace detail

// Feature template: lowercased surface, word shape, 3-char prefix/suffix,
// previous/next word surface, continuation flag, bias.
inline std::vector<std::string> token_features(const TokenSequence& seq,
                                               const std::vector<std::string>& words,
                                               std::size_t i) {
  const Token& tok = seq.tokens[i];
  const std::string lowered = lowercase(tok.surface);
  const std::u32string lowered_cps = decode_utf8(lowered);
  const auto word_at = [&](int w) -> std::string {
    if (w < 0) return "<s>";
    if (static_cast<std::size_t>(w) >= words.size()) return "</s>";
    return lowercase(words[static_cast<std::size_t>(w)]);
  };
  std::vector<std::string> feats;
  feats.reserve(8);
  feats.push_back("b");
  feats.push_back("s=" + lowered);
  feats.push_back("sh=" + detail::word_shape(tok.surface));
  feats.push_back("p3=" + detail::char_prefix(lowered_cps, 3));
  feats.push_back("s3=" + detail::char_suffix(lowered_cps, 3));
  feats.push_back("pw=" + word_at(tok.word_index - 1));
  feats.push_back("nw=" + word_at(tok.word_index + 1));
  if (tok.is_continuation) feats.push_back("c");
  return feats;
}

inline LinearModel train_linear(const std::vector<LabeledTokenSequence>& corpus, int epochs,
                                std::uint32_t seed) {
  if (corpus.empty()) throw EmptyCorpus("no labeled sequences to train on");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  for (const LabeledTokenSequence& ex : corpus) {
    if (ex.labels.size() != ex.seq.tokens.size()) {
      throw LengthMismatch("labels/tokens length mismatch in training corpus");
    }
  }

  // Precompute features once per token.
  std::vector<std::vector<std::vector<std::string>>> feats(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const std::vector<std::string> words = corpus[d].seq.word_surfaces();
    feats[d].resize(corpus[d].seq.tokens.size());
    for (std::size_t i = 0; i < corpus[d].seq.tokens.size(); ++i) {
      feats[d][i] = token_features(corpus[d].seq, words, i);
    }
  }

  LinearModel model;
  model.epochs_trained = epochs;
  std::unordered_map<std::string, double> w;
  std::unordered_map<std::string, double> cum;
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937 rng(seed);
  long long t = 1;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng() % i]);
    }
    long long seen = 0;
    long long correct = 0;
    for (std::size_t d : order) {
      for (std::size_t i = 0; i < feats[d].size(); ++i) {
        double margin = 0.0;
        for (const std::string& f : feats[d][i]) {
          if (auto it = w.find(f); it != w.end()) margin += it->second;
        }
        const int y = corpus[d].labels[i] ? 1 : -1;
        ++seen;
        if ((margin > 0 ? 1 : -1) == y) ++correct;
        if (y * margin <= 0) {
          for (const std::string& f : feats[d][i]) {
            w[f] += y;
            cum[f] += static_cast<double>(t) * y;
          }
        }
        ++t;
      }
    }
    model.epoch_accuracy.push_back(seen > 0 ? static_cast<double>(correct) / seen : 1.0);
  }
  for (auto& [f, weight] : w) weight -= cum[f] / static_cast<double>(t);
  model.weights = std::move(w);
  return model;
}

inline std::vector<double> predict_linear(const LinearModel& model, const TokenSequence& seq) {
  const std::vector<std::string> words = seq.word_surfaces();
  std::vector<double> scores;
  scores.reserve(seq.tokens.size());
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    scores.push_back(model.score(token_features(seq, words, i)));
  }
  return scores;
}

class LinearTokenClassifier : public TokenClassifier {
 public:
  explicit LinearTokenClassifier(LinearModel model) : model_(std::move(model)) {}

  std::vector<double> predict(const TokenSequence& seq) const override {
    return predict_linear(model_, seq);
  }

  const LinearModel& model() const { return model_; }

 private:
  LinearModel model_;
};

// feature<TAB>weight lines under a header carrying the template version.
// Features are written sorted so identical models serialize byte-identically.
inline void save_model(std::ostream& out, const LinearModel& model) {
  out << LinearModel::kFormatVersion << "\tepochs=" << model.epochs_trained
      << "\taveraged=" << (model.averaged ? 1 : 0) << '\n';
  std::map<std::string, double> sorted(model.weights.begin(), model.weights.end());
  out.precision(17);
  for (const auto& [feature, weight] : sorted) {
    out << feature << '\t' << weight << '\n';
  }
}

inline LinearModel load_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ModelFormatError("empty model file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind(LinearModel::kFormatVersion, 0) != 0) {
    throw ModelFormatError("unsupported model format: '" + line + "'");
  }
  LinearModel model;
  std::size_t pos = 0;
  while ((pos = line.find('\t', pos)) != std::string::npos) {
    const std::size_t end = line.find('\t', pos + 1);
    const std::string kv = line.substr(pos + 1, end == std::string::npos ? end : end - pos - 1);
    if (kv.rfind("epochs=", 0) == 0) model.epochs_trained = std::stoi(kv.substr(7));
    if (kv.rfind("averaged=", 0) == 0) model.averaged = kv.substr(9) != "0";
    pos += 1;
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t tab = line.rfind('\t');
    if (tab == std::string::npos) throw ModelFormatError("malformed weight line: '" + line + "'");
    const std::string feature = line.substr(0, tab);
    double weight = 0.0;
    try {
      weight = std::stod(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw ModelFormatError("malformed weight in line: '" + line + "'");
    }
    if (!std::isfinite(weight)) throw ModelFormatError("non-finite weight for '" + feature + "'");
    model.weights[feature] = weight;
  }
  return model;
}

}  // namespace toxspan
