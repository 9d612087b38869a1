#pragma once

// SpanSet: a set of zero-indexed character offsets, stored as a sorted
// ascending vector. This is the currency of both predictions and gold
// annotations.

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "toxspan/error.hpp"

namespace toxspan {

class SpanSet {
 public:
  SpanSet() = default;

  // Accepts offsets in any order, removes duplicates. Rejects negatives.
  explicit SpanSet(std::vector<int> offsets) : offsets_(std::move(offsets)) {
    for (int off : offsets_) {
      if (off < 0) throw MalformedSpanList("negative offset " + std::to_string(off));
    }
    std::sort(offsets_.begin(), offsets_.end());
    offsets_.erase(std::unique(offsets_.begin(), offsets_.end()), offsets_.end());
  }

  static SpanSet from_range(int start, int end) {
    SpanSet s;
    s.add_range(start, end);
    return s;
  }

  // Union of inclusive ranges, materialized in one pass. Empty ranges
  // (start > end) are skipped.
  static SpanSet from_ranges(std::vector<std::pair<int, int>> ranges) {
    std::sort(ranges.begin(), ranges.end());
    SpanSet s;
    for (const auto& [start, end] : ranges) {
      if (start > end) continue;
      if (start < 0) throw MalformedSpanList("negative offset " + std::to_string(start));
      int from = start;
      if (!s.offsets_.empty() && from <= s.offsets_.back()) from = s.offsets_.back() + 1;
      for (int off = from; off <= end; ++off) s.offsets_.push_back(off);
    }
    return s;
  }

  // Inclusive range [start, end]; no-op when start > end.
  void add_range(int start, int end) {
    if (start > end) return;
    if (start < 0) throw MalformedSpanList("negative offset " + std::to_string(start));
    std::vector<int> merged;
    merged.reserve(offsets_.size() + static_cast<std::size_t>(end - start + 1));
    auto it = offsets_.begin();
    while (it != offsets_.end() && *it < start) merged.push_back(*it++);
    for (int off = start; off <= end; ++off) {
      while (it != offsets_.end() && *it < off) merged.push_back(*it++);
      if (it != offsets_.end() && *it == off) ++it;
      merged.push_back(off);
    }
    while (it != offsets_.end()) merged.push_back(*it++);
    offsets_ = std::move(merged);
  }

  bool contains(int offset) const {
    return std::binary_search(offsets_.begin(), offsets_.end(), offset);
  }

  // True when any offset falls inside the inclusive range [start, end].
  bool intersects_range(int start, int end) const {
    auto it = std::lower_bound(offsets_.begin(), offsets_.end(), start);
    return it != offsets_.end() && *it <= end;
  }

  std::size_t size() const { return offsets_.size(); }
  bool empty() const { return offsets_.empty(); }
  const std::vector<int>& offsets() const { return offsets_; }
  auto begin() const { return offsets_.begin(); }
  auto end() const { return offsets_.end(); }

  friend SpanSet operator&(const SpanSet& a, const SpanSet& b) {
    SpanSet out;
    std::set_intersection(a.offsets_.begin(), a.offsets_.end(), b.offsets_.begin(),
                          b.offsets_.end(), std::back_inserter(out.offsets_));
    return out;
  }

  friend SpanSet operator|(const SpanSet& a, const SpanSet& b) {
    SpanSet out;
    std::set_union(a.offsets_.begin(), a.offsets_.end(), b.offsets_.begin(),
                   b.offsets_.end(), std::back_inserter(out.offsets_));
    return out;
  }

  // Set difference a \ b.
  friend SpanSet operator-(const SpanSet& a, const SpanSet& b) {
    SpanSet out;
    std::set_difference(a.offsets_.begin(), a.offsets_.end(), b.offsets_.begin(),
                        b.offsets_.end(), std::back_inserter(out.offsets_));
    return out;
  }

  bool operator==(const SpanSet& other) const = default;

  // Maximal contiguous runs as inclusive (start, end) pairs.
  std::vector<std::pair<int, int>> ranges() const {
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < offsets_.size();) {
      std::size_t j = i;
      while (j + 1 < offsets_.size() && offsets_[j + 1] == offsets_[j] + 1) ++j;
      out.emplace_back(offsets_[i], offsets_[j]);
      i = j + 1;
    }
    return out;
  }

  // Bracketed ascending list, e.g. "[15, 16, 17]". Empty set -> "[]".
  std::string to_string() const {
    std::string out = "[";
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
      if (i > 0) out += ", ";
      out += std::to_string(offsets_[i]);
    }
    out += "]";
    return out;
  }

  // Parses the bracketed list format. Optional whitespace around numbers
  // and brackets is accepted.
  static SpanSet parse(std::string_view text) {
    std::size_t i = 0;
    const auto skip_ws = [&] {
      while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    };
    const auto fail = [&](const char* what) {
      throw MalformedSpanList(std::string(what) + " in span list '" + std::string(text) + "'");
    };
    skip_ws();
    if (i >= text.size() || text[i] != '[') fail("missing '['");
    ++i;
    std::vector<int> offsets;
    skip_ws();
    if (i < text.size() && text[i] == ']') {
      ++i;
    } else {
      for (;;) {
        skip_ws();
        std::size_t start = i;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
        if (i == start) fail("expected integer");
        if (i - start > 9) fail("offset too large");
        offsets.push_back(std::stoi(std::string(text.substr(start, i - start))));
        skip_ws();
        if (i < text.size() && text[i] == ',') {
          ++i;
          continue;
        }
        if (i < text.size() && text[i] == ']') {
          ++i;
          break;
        }
        fail("expected ',' or ']'");
      }
    }
    skip_ws();
    if (i != text.size()) fail("trailing characters");
    return SpanSet(std::move(offsets));
  }

 private:
  std::vector<int> offsets_;
};

}  // namespace toxspan
