#pragma once

// Span-annotated documents in the shared-task data format.
//
// CSV input: header row with `spans` and `text` columns (extra columns are
// ignored, an `id` column is honored). A missing `spans` column yields empty
// gold sets, for prediction-only corpora. JSONL input: one object per line
// with "spans", "text" and optional "id".
//
// Gold offsets index code points of the text; the parser bounds-checks them
// but never recomputes them.

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "toxspan/error.hpp"
#include "toxspan/span_set.hpp"
#include "toxspan/unicode.hpp"

namespace toxspan {

struct Document {
  std::string id;
  std::string text;
  SpanSet gold;

  bool operator==(const Document&) const = default;
};

enum class Format { csv, jsonl };

inline Format parse_format(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "jsonl") return Format::jsonl;
  throw ConfigError("unknown format '" + std::string(name) + "' (expected csv or jsonl)");
}

// Throws OffsetOutOfBounds unless every gold offset is < charlen(text).
inline void validate_document(const Document& doc) {
  const std::size_t len = charlen(doc.text);
  if (doc.gold.empty()) return;
  const int max_offset = doc.gold.offsets().back();
  if (static_cast<std::size_t>(max_offset) >= len) {
    throw OffsetOutOfBounds("document '" + doc.id + "': offset " + std::to_string(max_offset) +
                            " out of bounds (text has " + std::to_string(len) + " characters)");
  }
}

namespace detail {

// RFC-4180 style CSV: quoted fields may contain commas, escaped quotes ("")
// and newlines. Returns false when the stream is exhausted.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  int c = in.get();
  if (c == std::istream::traits_type::eof()) return false;
  std::string field;
  bool in_quotes = false;
  for (;; c = in.get()) {
    if (c == std::istream::traits_type::eof()) {
      fields.push_back(field);
      return true;
    }
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty()) {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else if (ch == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      fields.push_back(field);
      return true;
    } else {
      field.push_back(ch);
    }
  }
}

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += "\"\"";
    else out.push_back(ch);
  }
  out += "\"";
  return out;
}

inline int find_column(const std::vector<std::string>& header, std::string_view name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

struct CsvColumns {
  int spans = -1;
  int text = -1;
  int id = -1;
};

inline Document doc_from_csv_record(const std::vector<std::string>& fields,
                                    const CsvColumns& cols, std::size_t record) {
  if (static_cast<std::size_t>(cols.text) >= fields.size()) {
    throw MalformedRecord("record " + std::to_string(record) + ": missing text field");
  }
  Document doc;
  doc.text = fields[static_cast<std::size_t>(cols.text)];
  decode_utf8(doc.text);  // EncodingError on invalid input
  if (cols.spans >= 0) {
    if (static_cast<std::size_t>(cols.spans) >= fields.size()) {
      throw MalformedRecord("record " + std::to_string(record) + ": missing spans field");
    }
    doc.gold = SpanSet::parse(fields[static_cast<std::size_t>(cols.spans)]);
  }
  if (cols.id >= 0 && static_cast<std::size_t>(cols.id) < fields.size() &&
      !fields[static_cast<std::size_t>(cols.id)].empty()) {
    doc.id = fields[static_cast<std::size_t>(cols.id)];
  } else {
    doc.id = std::to_string(record);
  }
  validate_document(doc);
  return doc;
}

inline Document doc_from_jsonl_line(const std::string& line, std::size_t record) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedRecord("record " + std::to_string(record) + ": " + e.what());
  }
  if (!obj.is_object() || !obj.contains("text") || !obj["text"].is_string()) {
    throw MalformedRecord("record " + std::to_string(record) + ": missing 'text' string");
  }
  Document doc;
  doc.text = obj["text"].get<std::string>();
  decode_utf8(doc.text);
  if (obj.contains("spans")) {
    if (!obj["spans"].is_array()) {
      throw MalformedSpanList("record " + std::to_string(record) + ": 'spans' is not an array");
    }
    std::vector<int> offsets;
    for (const auto& v : obj["spans"]) {
      if (!v.is_number_integer()) {
        throw MalformedSpanList("record " + std::to_string(record) + ": non-integer span offset");
      }
      offsets.push_back(v.get<int>());
    }
    doc.gold = SpanSet(std::move(offsets));
  }
  if (obj.contains("id")) {
    const auto& id = obj["id"];
    doc.id = id.is_string() ? id.get<std::string>() : id.dump();
  } else {
    doc.id = std::to_string(record);
  }
  validate_document(doc);
  return doc;
}

}  // namespace detail

inline std::vector<Document> parse_csv(std::istream& in) {
  std::vector<std::string> fields;
  if (!detail::read_csv_record(in, fields)) return {};
  detail::CsvColumns cols;
  cols.spans = detail::find_column(fields, "spans");
  cols.text = detail::find_column(fields, "text");
  cols.id = detail::find_column(fields, "id");
  if (cols.text < 0) throw MalformedRecord("csv header is missing the 'text' column");

  std::vector<Document> docs;
  std::size_t record = 0;
  while (detail::read_csv_record(in, fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
    docs.push_back(detail::doc_from_csv_record(fields, cols, record));
    ++record;
  }
  return docs;
}

inline std::vector<Document> parse_jsonl(std::istream& in) {
  std::vector<Document> docs;
  std::string line;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    docs.push_back(detail::doc_from_jsonl_line(line, record));
    ++record;
  }
  return docs;
}

inline std::vector<Document> parse_dataset(std::istream& in, Format format) {
  return format == Format::csv ? parse_csv(in) : parse_jsonl(in);
}

struct ValidationReport {
  std::size_t n_records = 0;
  std::vector<std::pair<std::size_t, std::string>> errors;  // (record index, message)

  bool clean() const { return errors.empty(); }
};

// Checks every record, collecting errors instead of stopping at the first.
inline ValidationReport validate_dataset(std::istream& in, Format format) {
  ValidationReport report;
  if (format == Format::csv) {
    std::vector<std::string> fields;
    if (!detail::read_csv_record(in, fields)) return report;
    detail::CsvColumns cols;
    cols.spans = detail::find_column(fields, "spans");
    cols.text = detail::find_column(fields, "text");
    cols.id = detail::find_column(fields, "id");
    if (cols.text < 0) {
      report.errors.emplace_back(0, "csv header is missing the 'text' column");
      return report;
    }
    std::size_t record = 0;
    while (detail::read_csv_record(in, fields)) {
      if (fields.size() == 1 && fields[0].empty()) continue;
      try {
        detail::doc_from_csv_record(fields, cols, record);
      } catch (const Error& e) {
        report.errors.emplace_back(record, e.what());
      }
      ++record;
      ++report.n_records;
    }
  } else {
    std::string line;
    std::size_t record = 0;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      try {
        detail::doc_from_jsonl_line(line, record);
      } catch (const Error& e) {
        report.errors.emplace_back(record, e.what());
      }
      ++record;
      ++report.n_records;
    }
  }
  return report;
}

inline void write_dataset(std::ostream& out, const std::vector<Document>& docs, Format format) {
  if (format == Format::csv) {
    out << "spans,text,id\n";
    for (const Document& doc : docs) {
      out << detail::csv_escape(doc.gold.to_string()) << ',' << detail::csv_escape(doc.text)
          << ',' << detail::csv_escape(doc.id) << '\n';
    }
  } else {
    for (const Document& doc : docs) {
      nlohmann::json obj;
      obj["id"] = doc.id;
      obj["spans"] = doc.gold.offsets();
      obj["text"] = doc.text;
      out << obj.dump() << '\n';
    }
  }
}

// Submission format: one serialized span list per line, in input order.
inline void write_predictions(std::ostream& out, const std::vector<SpanSet>& preds) {
  for (const SpanSet& s : preds) out << s.to_string() << '\n';
}

inline std::vector<SpanSet> read_predictions(std::istream& in) {
  std::vector<SpanSet> preds;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    preds.push_back(SpanSet::parse(line));
  }
  return preds;
}

// One lowercase word per line.
inline std::unordered_set<std::string> load_word_list(std::istream& in) {
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) words.insert(line);
  }
  return words;
}

// Drops gold labels from function words that are entirely toxic, together
// with the in-gold whitespace runs touching them. Used to normalize corpora
// whose annotation style marks stop words between offensive words as toxic.
// Idempotent; only ever shrinks the gold set.
inline Document normalize_annotations(const Document& doc,
                                      const std::unordered_set<std::string>& function_words) {
  if (doc.gold.empty() || function_words.empty()) return doc;
  const std::u32string cps = decode_utf8(doc.text);
  SpanSet gold = doc.gold;

  // Whitespace-delimited words with code point offsets.
  struct Span {
    std::size_t start;
    std::size_t end;  // inclusive
  };
  std::vector<Span> removed;
  for (std::size_t i = 0; i < cps.size();) {
    if (is_whitespace(cps[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < cps.size() && !is_whitespace(cps[j + 1])) ++j;
    bool fully_gold = true;
    for (std::size_t k = i; k <= j; ++k) {
      if (!gold.contains(static_cast<int>(k))) {
        fully_gold = false;
        break;
      }
    }
    if (fully_gold) {
      std::u32string lowered = cps.substr(i, j - i + 1);
      for (char32_t& cp : lowered) cp = to_lower(cp);
      if (function_words.count(encode_utf8(lowered)) > 0) removed.push_back({i, j});
    }
    i = j + 1;
  }

  std::vector<std::pair<int, int>> drop_ranges;
  for (const Span& w : removed) {
    drop_ranges.emplace_back(static_cast<int>(w.start), static_cast<int>(w.end));
    // Whitespace runs adjacent to the removed word.
    if (w.start > 0 && is_whitespace(cps[w.start - 1])) {
      std::size_t k = w.start - 1;
      while (k > 0 && is_whitespace(cps[k - 1])) --k;
      drop_ranges.emplace_back(static_cast<int>(k), static_cast<int>(w.start - 1));
    }
    if (w.end + 1 < cps.size() && is_whitespace(cps[w.end + 1])) {
      std::size_t k = w.end + 1;
      while (k + 1 < cps.size() && is_whitespace(cps[k + 1])) ++k;
      drop_ranges.emplace_back(static_cast<int>(w.end + 1), static_cast<int>(k));
    }
  }
  Document out = doc;
  out.gold = gold - SpanSet::from_ranges(std::move(drop_ranges));
  return out;
}

}  // namespace toxspan
