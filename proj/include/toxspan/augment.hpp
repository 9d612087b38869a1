#pragma once

// EDA-style data augmentation over span-annotated documents. Toxicity flags
// travel with word surfaces through every operation and the gold set is
// rebuilt from the flags afterwards, so labels survive exactly.
//
// The rebuild joins words with single spaces; original inter-word whitespace
// is not preserved. This is a lossy transform meant for training copies,
// never for evaluation data.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "toxspan/corpus.hpp"
#include "toxspan/error.hpp"
#include "toxspan/span_set.hpp"
#include "toxspan/unicode.hpp"

namespace toxspan {

enum class EdaOp { SR, RI, RS, RD };

using SynonymLexicon = std::unordered_map<std::string, std::vector<std::string>>;

// File format: word<TAB>syn1,syn2,... per line, lowercase keys.
inline SynonymLexicon load_synonyms(std::istream& in) {
  SynonymLexicon lex;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
      throw MalformedRecord("malformed synonym line: '" + line + "'");
    }
    std::vector<std::string> synonyms;
    std::size_t pos = tab + 1;
    while (pos <= line.size()) {
      const std::size_t comma = line.find(',', pos);
      const std::string syn =
          line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (!syn.empty()) synonyms.push_back(syn);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (synonyms.empty()) throw MalformedRecord("no synonyms for '" + line.substr(0, tab) + "'");
    lex[line.substr(0, tab)] = std::move(synonyms);
  }
  return lex;
}

// Words under whitespace splitting; a word is toxic iff any of its
// characters is in gold. start/end are offsets in the document the view was
// derived from; words inserted by an operation carry -1.
struct WordView {
  struct Entry {
    std::string surface;
    int start = -1;
    int end = -1;
    bool toxic = false;
  };
  std::vector<Entry> words;

  static WordView of(const Document& doc) {
    WordView view;
    const std::u32string cps = decode_utf8(doc.text);
    for (std::size_t i = 0; i < cps.size();) {
      if (is_whitespace(cps[i])) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j + 1 < cps.size() && !is_whitespace(cps[j + 1])) ++j;
      Entry e;
      e.surface = encode_utf8(std::u32string_view(cps).substr(i, j - i + 1));
      e.start = static_cast<int>(i);
      e.end = static_cast<int>(j);
      e.toxic = doc.gold.intersects_range(static_cast<int>(i), static_cast<int>(j));
      view.words.push_back(std::move(e));
      i = j + 1;
    }
    return view;
  }

  // Words joined by single spaces; gold covers each toxic word in full.
  Document rebuild(std::string id) const {
    Document doc;
    doc.id = std::move(id);
    std::vector<std::pair<int, int>> gold_ranges;
    int pos = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i > 0) {
        doc.text += ' ';
        ++pos;
      }
      const int len = static_cast<int>(charlen(words[i].surface));
      if (words[i].toxic) gold_ranges.emplace_back(pos, pos + len - 1);
      doc.text += words[i].surface;
      pos += len;
    }
    doc.gold = SpanSet::from_ranges(std::move(gold_ranges));
    return doc;
  }
};

// n = max(1, round(alpha * l)) for non-empty documents.
inline int budget(int word_count, double alpha) {
  if (word_count <= 0) return 0;
  const int n = static_cast<int>(std::lround(alpha * word_count));
  return n < 1 ? 1 : n;
}

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Bounded draw from raw generator output; deterministic across platforms.
inline std::size_t pick(std::mt19937_64& rng, std::size_t n) { return rng() % n; }

// k distinct indices from [0, n), in selection order.
inline std::vector<std::size_t> sample_indices(std::mt19937_64& rng, std::size_t n,
                                               std::size_t k) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  if (k > n) k = n;
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(pool[i], pool[i + pick(rng, n - i)]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace detail

// Replaces up to n lexicon-eligible words with uniformly chosen synonyms.
// Replacements inherit the original word's toxicity.
inline Document synonym_replacement(const Document& doc, int n, const SynonymLexicon& lex,
                                    std::mt19937_64& rng) {
  WordView view = WordView::of(doc);
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < view.words.size(); ++i) {
    if (lex.count(lowercase(view.words[i].surface)) > 0) eligible.push_back(i);
  }
  if (n > 0 && !eligible.empty()) {
    for (std::size_t e :
         detail::sample_indices(rng, eligible.size(), static_cast<std::size_t>(n))) {
      const std::size_t w = eligible[e];
      const auto& synonyms = lex.at(lowercase(view.words[w].surface));
      view.words[w].surface = synonyms[detail::pick(rng, synonyms.size())];
      view.words[w].start = view.words[w].end = -1;
    }
  }
  return view.rebuild(doc.id);
}

// Inserts n synonyms of random eligible words at random positions, always
// as non-toxic words.
inline Document random_insertion(const Document& doc, int n, const SynonymLexicon& lex,
                                 std::mt19937_64& rng) {
  WordView view = WordView::of(doc);
  for (int k = 0; k < n; ++k) {
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < view.words.size(); ++i) {
      if (lex.count(lowercase(view.words[i].surface)) > 0) eligible.push_back(i);
    }
    if (eligible.empty()) break;
    const std::size_t w = eligible[detail::pick(rng, eligible.size())];
    const auto& synonyms = lex.at(lowercase(view.words[w].surface));
    WordView::Entry inserted{synonyms[detail::pick(rng, synonyms.size())], -1, -1, false};
    const std::size_t pos = detail::pick(rng, view.words.size() + 1);
    view.words.insert(view.words.begin() + static_cast<std::ptrdiff_t>(pos),
                      std::move(inserted));
  }
  return view.rebuild(doc.id);
}

// Swaps n pairs of distinct word positions; flags travel with surfaces.
inline Document random_swap(const Document& doc, int n, std::mt19937_64& rng) {
  WordView view = WordView::of(doc);
  if (view.words.size() >= 2) {
    for (int k = 0; k < n; ++k) {
      const std::size_t i = detail::pick(rng, view.words.size());
      std::size_t j = detail::pick(rng, view.words.size() - 1);
      if (j >= i) ++j;
      std::swap(view.words[i], view.words[j]);
    }
  }
  return view.rebuild(doc.id);
}

// Deletes n uniformly chosen words; at least one word always survives.
inline Document random_deletion(const Document& doc, int n, std::mt19937_64& rng) {
  WordView view = WordView::of(doc);
  if (n > 0 && !view.words.empty()) {
    if (static_cast<std::size_t>(n) >= view.words.size()) {
      const std::size_t survivor = detail::pick(rng, view.words.size());
      WordView::Entry kept = view.words[survivor];
      view.words.assign(1, std::move(kept));
    } else {
      std::vector<std::size_t> doomed =
          detail::sample_indices(rng, view.words.size(), static_cast<std::size_t>(n));
      std::sort(doomed.begin(), doomed.end());
      for (std::size_t k = doomed.size(); k > 0; --k) {
        view.words.erase(view.words.begin() + static_cast<std::ptrdiff_t>(doomed[k - 1]));
      }
    }
  }
  return view.rebuild(doc.id);
}

struct AugmentConfig {
  double alpha = 0.1;  // fraction of words modified per document
  std::vector<EdaOp> operations{EdaOp::SR, EdaOp::RI, EdaOp::RS, EdaOp::RD};
  std::uint64_t seed = 0;
  SynonymLexicon synonyms;
  int per_doc_copies = 1;
};

inline void validate_config(const AugmentConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) throw ConfigError("alpha must be in (0, 1]");
  if (cfg.per_doc_copies < 1) throw ConfigError("per_doc_copies must be >= 1");
  for (EdaOp op : cfg.operations) {
    if ((op == EdaOp::SR || op == EdaOp::RI) && cfg.synonyms.empty()) {
      throw ConfigError("SR/RI require a non-empty synonym lexicon");
    }
  }
}

// Output = original corpus ++ augmented copies; with no operations enabled
// the corpus passes through unchanged. For each copy the enabled operations
// run once each, in the fixed order SR, RI, RS, RD, every one with its own
// n = budget(l, alpha) over the current word count. Per-copy RNG streams
// derive from (seed, doc id, copy), so results do not depend on processing
// order.
inline std::vector<Document> augment_corpus(const std::vector<Document>& corpus,
                                            const AugmentConfig& cfg) {
  validate_config(cfg);
  bool enabled[4] = {false, false, false, false};
  for (EdaOp op : cfg.operations) enabled[static_cast<int>(op)] = true;
  if (cfg.operations.empty()) return corpus;

  std::vector<Document> out = corpus;
  for (const Document& doc : corpus) {
    for (int copy = 1; copy <= cfg.per_doc_copies; ++copy) {
      const std::uint64_t h = detail::fnv1a(doc.id);
      std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                        static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                        static_cast<std::uint32_t>(copy)};
      std::mt19937_64 rng(seq);
      Document aug = doc;
      aug.id = doc.id + "-aug" + std::to_string(copy);
      const auto word_count = [&] {
        return static_cast<int>(WordView::of(aug).words.size());
      };
      if (enabled[static_cast<int>(EdaOp::SR)]) {
        aug = synonym_replacement(aug, budget(word_count(), cfg.alpha), cfg.synonyms, rng);
      }
      if (enabled[static_cast<int>(EdaOp::RI)]) {
        aug = random_insertion(aug, budget(word_count(), cfg.alpha), cfg.synonyms, rng);
      }
      if (enabled[static_cast<int>(EdaOp::RS)]) {
        aug = random_swap(aug, budget(word_count(), cfg.alpha), rng);
      }
      if (enabled[static_cast<int>(EdaOp::RD)]) {
        aug = random_deletion(aug, budget(word_count(), cfg.alpha), rng);
      }
      out.push_back(std::move(aug));
    }
  }
  return out;
}

}  // namespace toxspan
