#pragma once

// Assembles classifier output into character spans: thresholding, the two
// boundary-refining post-processing steps, and sentence-level late fusion.
//
// Post-processing order: word coherence runs before gap filling so that gap
// filling sees complete words; the reverse order is available behind
// coherence_after_gap_fill and never produces more than the default order.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "toxspan/classifiers.hpp"
#include "toxspan/corpus.hpp"
#include "toxspan/error.hpp"
#include "toxspan/span_set.hpp"
#include "toxspan/tokenizer.hpp"
#include "toxspan/unicode.hpp"

namespace toxspan {

// Union over toxic tokens of their inclusive offset ranges.
inline SpanSet decode_spans(const TokenSequence& seq, const std::vector<int>& labels) {
  if (labels.size() != seq.tokens.size()) {
    throw LengthMismatch("decode_spans: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(seq.tokens.size()) + " tokens");
  }
  std::vector<std::pair<int, int>> ranges;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) ranges.emplace_back(seq.tokens[i].start, seq.tokens[i].end);
  }
  return SpanSet::from_ranges(std::move(ranges));
}

// If at least one token of a word is labeled toxic, every token of that word
// becomes toxic. Never clears a label.
inline std::vector<int> word_coherence(const TokenSequence& seq, const std::vector<int>& labels) {
  if (labels.size() != seq.tokens.size()) {
    throw LengthMismatch("word_coherence: labels/tokens length mismatch");
  }
  std::vector<int> word_toxic;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto w = static_cast<std::size_t>(seq.tokens[i].word_index);
    if (w >= word_toxic.size()) word_toxic.resize(w + 1, 0);
    if (labels[i]) word_toxic[w] = 1;
  }
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = word_toxic[static_cast<std::size_t>(seq.tokens[i].word_index)];
  }
  return out;
}

// For every pair of sequence-adjacent tokens both labeled toxic, the
// characters strictly between them become toxic as well. This joins the
// delimiters inside toxic phrases. Expects spans == decode_spans(seq, labels).
inline SpanSet fill_gaps(const TokenSequence& seq, const std::vector<int>& labels,
                         const SpanSet& spans) {
  if (labels.size() != seq.tokens.size()) {
    throw LengthMismatch("fill_gaps: labels/tokens length mismatch");
  }
  std::vector<std::pair<int, int>> ranges = spans.ranges();
  for (std::size_t i = 0; i + 1 < seq.tokens.size(); ++i) {
    if (labels[i] && labels[i + 1]) {
      ranges.emplace_back(seq.tokens[i].end + 1, seq.tokens[i + 1].start - 1);
    }
  }
  return SpanSet::from_ranges(std::move(ranges));
}

struct SentenceSpan {
  int start = 0;
  int end = 0;  // inclusive
  std::string text;
};

// Rule-based splitting: a sentence ends at '.', '!' or '?' followed by
// whitespace or end of text; a trailing fragment forms its own sentence.
// Sentences are disjoint, ordered, and cover every non-whitespace character.
inline std::vector<SentenceSpan> split_sentences(std::string_view text) {
  const std::u32string cps = decode_utf8(text);
  std::vector<SentenceSpan> sentences;
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && is_whitespace(cps[i])) ++i;
    if (i >= cps.size()) break;
    const std::size_t start = i;
    std::size_t last_nonspace = i;
    std::size_t end = cps.size() - 1;
    bool found = false;
    for (std::size_t j = i; j < cps.size(); ++j) {
      if (!is_whitespace(cps[j])) last_nonspace = j;
      const bool terminator = cps[j] == U'.' || cps[j] == U'!' || cps[j] == U'?';
      if (terminator && (j + 1 >= cps.size() || is_whitespace(cps[j + 1]))) {
        end = j;
        found = true;
        break;
      }
    }
    if (!found) end = last_nonspace;  // trailing fragment, trimmed of whitespace
    SentenceSpan s;
    s.start = static_cast<int>(start);
    s.end = static_cast<int>(end);
    s.text = encode_utf8(std::u32string_view(cps).substr(start, end - start + 1));
    sentences.push_back(std::move(s));
    i = end + 1;
  }
  return sentences;
}

// Training-label construction for the sentence classifier: a sentence is
// toxic iff it contains a ground-truth toxic character.
inline int sentence_label(const SpanSet& gold, const SentenceSpan& sentence) {
  return gold.intersects_range(sentence.start, sentence.end) ? 1 : 0;
}

inline std::vector<std::pair<std::string, int>> make_sentence_dataset(
    const std::vector<Document>& docs) {
  std::vector<std::pair<std::string, int>> data;
  for (const Document& doc : docs) {
    for (const SentenceSpan& s : split_sentences(doc.text)) {
      data.emplace_back(s.text, sentence_label(doc.gold, s));
    }
  }
  return data;
}

// Union of character ranges of sentences the classifier marks toxic.
inline SpanSet toxic_sentence_mask(const SentenceClassifier& clf, std::string_view text) {
  std::vector<std::pair<int, int>> ranges;
  for (const SentenceSpan& s : split_sentences(text)) {
    if (clf.predict(s.text) > 0.5) ranges.emplace_back(s.start, s.end);
  }
  return SpanSet::from_ranges(std::move(ranges));
}

struct PipelineConfig {
  const TokenClassifier* classifier = nullptr;
  double tau = 0.5;
  bool gap_fill = true;
  bool word_coherence = true;
  bool coherence_after_gap_fill = false;
  const SentenceClassifier* late_fusion = nullptr;
  std::optional<int> max_tokens;
  bool lowercase_lookup = false;
};

// Threshold -> post-process -> decode; shared by the classifier route and
// the external score-file route.
inline SpanSet assemble_spans(const PipelineConfig& cfg, const TokenSequence& seq,
                              const std::vector<double>& scores) {
  std::vector<int> labels = threshold_labels(scores, cfg.tau);
  if (cfg.word_coherence && !cfg.coherence_after_gap_fill) {
    labels = word_coherence(seq, labels);
  }
  SpanSet spans = decode_spans(seq, labels);
  if (cfg.gap_fill) spans = fill_gaps(seq, labels, spans);
  if (cfg.word_coherence && cfg.coherence_after_gap_fill) {
    spans = spans | decode_spans(seq, word_coherence(seq, labels));
  }
  if (cfg.late_fusion != nullptr) spans = spans & toxic_sentence_mask(*cfg.late_fusion, seq.text);
  return spans;
}

inline SpanSet predict_document(const PipelineConfig& cfg, std::string_view text,
                                const Vocabulary& vocab) {
  if (cfg.classifier == nullptr) throw ConfigError("pipeline has no classifier");
  const TokenSequence seq =
      tokenize(text, vocab, TokenizeOptions{cfg.max_tokens, cfg.lowercase_lookup});
  return assemble_spans(cfg, seq, cfg.classifier->predict(seq));
}

// Token-pipeline spans restricted to sentences classified toxic.
inline SpanSet late_fusion_predict(const PipelineConfig& cfg, std::string_view text,
                                   const Vocabulary& vocab) {
  if (cfg.late_fusion == nullptr) throw ConfigError("late fusion requires a sentence classifier");
  return predict_document(cfg, text, vocab);
}

}  // namespace toxspan
