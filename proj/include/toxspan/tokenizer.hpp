#pragma once

// Whitespace/punctuation pre-tokenization followed by greedy WordPiece
// subword splitting. Every token records the inclusive (start, end) code
// point offsets it covers in the source text, so that token-level label
// predictions can be projected back to character spans.

#include <cstddef>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "toxspan/error.hpp"
#include "toxspan/span_set.hpp"
#include "toxspan/unicode.hpp"

namespace toxspan {

struct Word {
  std::string surface;
  int start = 0;  // inclusive code point offsets
  int end = 0;
  int word_index = 0;

  bool operator==(const Word&) const = default;
};

struct Token {
  std::string piece;    // vocabulary entry matched, "##"-prefixed for continuations
  std::string surface;  // exact text slice covered, original casing
  int start = 0;
  int end = 0;  // inclusive
  int word_index = 0;
  bool is_continuation = false;
  bool is_unknown = false;
};

struct TokenSequence {
  std::vector<Token> tokens;
  std::string text;
  bool truncated = false;

  std::size_t size() const { return tokens.size(); }

  // Surfaces of whole words by word_index. Tokens of a word partition its
  // span, so concatenating their surfaces reproduces the word.
  std::vector<std::string> word_surfaces() const {
    std::vector<std::string> words;
    for (const Token& tok : tokens) {
      if (static_cast<std::size_t>(tok.word_index) >= words.size()) {
        words.resize(static_cast<std::size_t>(tok.word_index) + 1);
      }
      words[static_cast<std::size_t>(tok.word_index)] += tok.surface;
    }
    return words;
  }
};

struct LabeledTokenSequence {
  TokenSequence seq;
  std::vector<int> labels;  // 1 = toxic token, 0 otherwise
};

// Maximal runs of non-whitespace, split further so each punctuation
// character forms its own word.
inline std::vector<Word> pre_tokenize(std::string_view text) {
  const std::u32string cps = decode_utf8(text);
  std::vector<Word> words;
  int word_index = 0;
  std::size_t i = 0;
  const auto emit = [&](std::size_t start, std::size_t end) {
    words.push_back(Word{encode_utf8(std::u32string_view(cps).substr(start, end - start + 1)),
                         static_cast<int>(start), static_cast<int>(end), word_index++});
  };
  while (i < cps.size()) {
    if (is_whitespace(cps[i])) {
      ++i;
      continue;
    }
    if (is_punctuation(cps[i])) {
      emit(i, i);
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < cps.size() && !is_whitespace(cps[j + 1]) && !is_punctuation(cps[j + 1])) ++j;
    emit(i, j);
    i = j + 1;
  }
  return words;
}

namespace detail {
struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
};
using StringSet = std::unordered_set<std::string, StringHash, std::equal_to<>>;
}  // namespace detail

class Vocabulary {
 public:
  Vocabulary(const std::vector<std::string>& pieces, std::string unk_symbol)
      : unk_(std::move(unk_symbol)) {
    if (unk_.empty()) throw VocabularyError("empty unk symbol");
    for (const std::string& piece : pieces) insert(piece);
    insert(unk_);
  }

  // File format: one piece per line; lines starting with "##" are
  // continuation pieces; an optional first line `unk=<symbol>` names the unk
  // symbol, otherwise `[UNK]` must appear in the list.
  static Vocabulary load(std::istream& in) {
    std::vector<std::string> pieces;
    std::string unk;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (first && line.rfind("unk=", 0) == 0) {
        unk = line.substr(4);
        first = false;
        continue;
      }
      first = false;
      if (!line.empty()) pieces.push_back(line);
    }
    if (pieces.empty()) throw VocabularyError("vocabulary is empty");
    if (unk.empty()) {
      unk = "[UNK]";
      bool found = false;
      for (const std::string& piece : pieces) {
        if (piece == unk) {
          found = true;
          break;
        }
      }
      if (!found) {
        throw VocabularyError("vocabulary names no unk symbol and contains no [UNK] entry");
      }
    }
    return Vocabulary(pieces, std::move(unk));
  }

  bool contains(std::string_view piece) const { return entries_.find(piece) != entries_.end(); }
  const std::string& unk_symbol() const { return unk_; }
  std::size_t size() const { return entries_.size(); }
  // Code point length of the longest entry, the greedy match cap.
  std::size_t max_piece_chars() const { return max_piece_chars_; }

 private:
  void insert(const std::string& piece) {
    if (piece.empty()) return;
    if (entries_.insert(piece).second) {
      const std::size_t len = charlen(piece);
      if (len > max_piece_chars_) max_piece_chars_ = len;
    }
  }

  detail::StringSet entries_;
  std::string unk_;
  std::size_t max_piece_chars_ = 0;
};

// Greedy longest-match-first WordPiece split. Non-initial pieces carry the
// "##" prefix. If any position has no vocabulary match the whole word
// becomes a single unk piece.
inline std::vector<std::string> wordpiece(std::string_view word, const Vocabulary& vocab) {
  const std::u32string cps = decode_utf8(word);
  if (cps.empty()) throw Error("wordpiece: empty word");
  std::vector<std::string> pieces;
  std::size_t start = 0;
  while (start < cps.size()) {
    const std::size_t prefix_chars = start > 0 ? 2 : 0;
    std::size_t longest = vocab.max_piece_chars() > prefix_chars
                              ? vocab.max_piece_chars() - prefix_chars
                              : 0;
    if (longest > cps.size() - start) longest = cps.size() - start;
    std::string match;
    std::size_t matched_len = 0;
    for (std::size_t len = longest; len >= 1; --len) {
      std::string candidate = start > 0 ? "##" : "";
      candidate += encode_utf8(std::u32string_view(cps).substr(start, len));
      if (vocab.contains(candidate)) {
        match = std::move(candidate);
        matched_len = len;
        break;
      }
    }
    if (matched_len == 0) return {vocab.unk_symbol()};
    pieces.push_back(std::move(match));
    start += matched_len;
  }
  return pieces;
}

struct TokenizeOptions {
  std::optional<int> max_tokens;  // truncate and flag when set
  bool lowercase_lookup = false;  // uncased vocab lookup; offsets stay on the original text
};

inline TokenSequence tokenize(std::string_view text, const Vocabulary& vocab,
                              const TokenizeOptions& opts = {}) {
  TokenSequence seq;
  seq.text = std::string(text);
  const std::u32string cps = decode_utf8(text);
  for (const Word& word : pre_tokenize(text)) {
    const std::string lookup = opts.lowercase_lookup ? lowercase(word.surface) : word.surface;
    const std::vector<std::string> pieces = wordpiece(lookup, vocab);
    std::vector<Token> tokens;
    if (pieces.size() == 1 && pieces[0] == vocab.unk_symbol() && !vocab.contains(lookup)) {
      // Unk piece covers the whole word.
      tokens.push_back(Token{vocab.unk_symbol(), word.surface, word.start, word.end,
                             word.word_index, false, true});
    } else {
      int pos = word.start;
      for (std::size_t k = 0; k < pieces.size(); ++k) {
        const bool cont = k > 0;
        const int consumed = static_cast<int>(charlen(pieces[k])) - (cont ? 2 : 0);
        Token tok;
        tok.piece = pieces[k];
        tok.surface = encode_utf8(std::u32string_view(cps).substr(
            static_cast<std::size_t>(pos), static_cast<std::size_t>(consumed)));
        tok.start = pos;
        tok.end = pos + consumed - 1;
        tok.word_index = word.word_index;
        tok.is_continuation = cont;
        tokens.push_back(std::move(tok));
        pos += consumed;
      }
    }
    for (Token& tok : tokens) {
      if (opts.max_tokens && seq.tokens.size() >= static_cast<std::size_t>(*opts.max_tokens)) {
        seq.truncated = true;
        return seq;
      }
      seq.tokens.push_back(std::move(tok));
    }
  }
  return seq;
}

// A word is toxic iff any of its characters is in gold; every token of a
// toxic word is labeled 1.
inline LabeledTokenSequence project_labels(TokenSequence seq, const SpanSet& gold) {
  std::vector<std::pair<int, int>> word_spans;  // by word_index
  for (const Token& tok : seq.tokens) {
    const auto idx = static_cast<std::size_t>(tok.word_index);
    if (idx >= word_spans.size()) word_spans.resize(idx + 1, {-1, -1});
    auto& [ws, we] = word_spans[idx];
    if (ws < 0 || tok.start < ws) ws = tok.start;
    if (tok.end > we) we = tok.end;
  }
  std::vector<int> labels;
  labels.reserve(seq.tokens.size());
  for (const Token& tok : seq.tokens) {
    const auto& [ws, we] = word_spans[static_cast<std::size_t>(tok.word_index)];
    labels.push_back(gold.intersects_range(ws, we) ? 1 : 0);
  }
  return LabeledTokenSequence{std::move(seq), std::move(labels)};
}

}  // namespace toxspan
