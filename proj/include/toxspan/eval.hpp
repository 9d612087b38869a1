#pragma once

// The shared-task evaluation metric over character-offset sets, with its
// empty-set cases, plus corpus aggregation, a token-level confusion matrix
// and a precision-recall sweep.

#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "toxspan/corpus.hpp"
#include "toxspan/error.hpp"
#include "toxspan/span_set.hpp"

namespace toxspan {

struct DocScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Per-document precision/recall/F1 by exact set arithmetic:
//   both sets empty        -> (1, 1, 1)
//   exactly one set empty  -> (0, 0, 0)
//   otherwise P = |S∩G|/|S|, R = |S∩G|/|G|, F1 = 2PR/(P+R) (0 when P=R=0)
inline DocScore f1_document(const SpanSet& system, const SpanSet& gold) {
  if (system.empty() && gold.empty()) return {1.0, 1.0, 1.0};
  if (system.empty() || gold.empty()) return {0.0, 0.0, 0.0};
  const double overlap = static_cast<double>((system & gold).size());
  DocScore score;
  score.precision = overlap / static_cast<double>(system.size());
  score.recall = overlap / static_cast<double>(gold.size());
  score.f1 = (score.precision + score.recall) > 0.0
                 ? 2.0 * score.precision * score.recall / (score.precision + score.recall)
                 : 0.0;
  return score;
}

struct MetricsReport {
  std::vector<DocScore> per_doc;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_f1 = 0.0;
  int n_docs = 0;
  std::vector<std::string> missing_ids;  // gold docs with no prediction (scored as empty)

  nlohmann::json to_json() const {
    nlohmann::json obj;
    obj["n_docs"] = n_docs;
    obj["mean_precision"] = mean_precision;
    obj["mean_recall"] = mean_recall;
    obj["mean_f1"] = mean_f1;
    obj["missing_predictions"] = missing_ids;
    nlohmann::json docs = nlohmann::json::array();
    for (const DocScore& d : per_doc) {
      docs.push_back({{"precision", d.precision}, {"recall", d.recall}, {"f1", d.f1}});
    }
    obj["per_document"] = docs;
    return obj;
  }

  std::string to_table() const {
    std::ostringstream out;
    out << std::fixed << std::setprecision(3);
    out << "documents       " << n_docs << '\n';
    out << "mean_precision  " << mean_precision << '\n';
    out << "mean_recall     " << mean_recall << '\n';
    out << "mean_f1         " << mean_f1 << '\n';
    if (!missing_ids.empty()) {
      out << "missing_preds   " << missing_ids.size() << '\n';
    }
    return out.str();
  }
};

// Scores each gold document against its prediction; a document without a
// prediction is scored against the empty set and reported in missing_ids.
// Prediction ids not present in the gold corpus raise UnknownDocumentId.
inline MetricsReport evaluate_corpus(const std::unordered_map<std::string, SpanSet>& preds,
                                     const std::vector<Document>& golds) {
  std::unordered_set<std::string> gold_ids;
  for (const Document& doc : golds) gold_ids.insert(doc.id);
  for (const auto& [id, spans] : preds) {
    if (gold_ids.count(id) == 0) {
      throw UnknownDocumentId("prediction for unknown document id '" + id + "'");
    }
  }
  MetricsReport report;
  report.n_docs = static_cast<int>(golds.size());
  for (const Document& doc : golds) {
    const auto it = preds.find(doc.id);
    if (it == preds.end()) {
      report.missing_ids.push_back(doc.id);
      report.per_doc.push_back(f1_document(SpanSet{}, doc.gold));
    } else {
      report.per_doc.push_back(f1_document(it->second, doc.gold));
    }
  }
  for (const DocScore& d : report.per_doc) {
    report.mean_precision += d.precision;
    report.mean_recall += d.recall;
    report.mean_f1 += d.f1;
  }
  if (report.n_docs > 0) {
    report.mean_precision /= report.n_docs;
    report.mean_recall /= report.n_docs;
    report.mean_f1 /= report.n_docs;
  }
  return report;
}

// Pairs predictions with gold documents by record order.
inline MetricsReport evaluate_ordered(const std::vector<SpanSet>& preds,
                                      const std::vector<Document>& golds) {
  if (preds.size() != golds.size()) {
    throw LengthMismatch("got " + std::to_string(preds.size()) + " predictions for " +
                         std::to_string(golds.size()) + " gold documents");
  }
  std::unordered_map<std::string, SpanSet> by_id;
  for (std::size_t i = 0; i < golds.size(); ++i) by_id[golds[i].id] = preds[i];
  if (by_id.size() != golds.size()) {
    // Duplicate ids; fall back to direct pairing.
    MetricsReport report;
    report.n_docs = static_cast<int>(golds.size());
    for (std::size_t i = 0; i < golds.size(); ++i) {
      report.per_doc.push_back(f1_document(preds[i], golds[i].gold));
      report.mean_precision += report.per_doc.back().precision;
      report.mean_recall += report.per_doc.back().recall;
      report.mean_f1 += report.per_doc.back().f1;
    }
    if (report.n_docs > 0) {
      report.mean_precision /= report.n_docs;
      report.mean_recall /= report.n_docs;
      report.mean_f1 /= report.n_docs;
    }
    return report;
  }
  return evaluate_corpus(by_id, golds);
}

struct ConfusionMatrix {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }

  std::string to_csv() const {
    std::string out = "category,count\n";
    out += "tp," + std::to_string(tp) + "\n";
    out += "fp," + std::to_string(fp) + "\n";
    out += "fn," + std::to_string(fn) + "\n";
    out += "tn," + std::to_string(tn) + "\n";
    return out;
  }
};

// Element-wise token counts over aligned per-document label sequences.
inline ConfusionMatrix token_confusion(const std::vector<std::vector<int>>& pred_labels,
                                       const std::vector<std::vector<int>>& gold_labels) {
  if (pred_labels.size() != gold_labels.size()) {
    throw LengthMismatch("confusion: document count mismatch");
  }
  ConfusionMatrix cm;
  for (std::size_t d = 0; d < pred_labels.size(); ++d) {
    if (pred_labels[d].size() != gold_labels[d].size()) {
      throw LengthMismatch("confusion: token count mismatch in document " + std::to_string(d));
    }
    for (std::size_t i = 0; i < pred_labels[d].size(); ++i) {
      const bool p = pred_labels[d][i] != 0;
      const bool g = gold_labels[d][i] != 0;
      if (p && g) ++cm.tp;
      else if (p && !g) ++cm.fp;
      else if (!p && g) ++cm.fn;
      else ++cm.tn;
    }
  }
  return cm;
}

struct PRPoint {
  double tau = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  bool zero_predictions = false;  // no token scored above tau; precision pinned to 1
};

struct PRCurve {
  std::vector<PRPoint> points;  // sorted by tau ascending
  double auc = 0.0;

  std::string to_csv() const {
    std::ostringstream out;
    out << "# auc=" << auc << '\n';
    out << "tau,precision,recall,zero_predictions\n";
    for (const PRPoint& p : points) {
      out << p.tau << ',' << p.precision << ',' << p.recall << ',' << (p.zero_predictions ? 1 : 0)
          << '\n';
    }
    return out.str();
  }
};

// Micro (pooled-token) precision/recall per threshold. A grid point with no
// predicted positives reports precision 1.0 and sets the flag. The AUC is a
// trapezoid over the (recall, precision) points, anchored at (0, 1) when the
// sweep does not reach recall 0.
inline PRCurve pr_curve(const std::vector<std::vector<double>>& scores,
                        const std::vector<std::vector<int>>& gold_labels,
                        const std::vector<double>& grid) {
  if (scores.size() != gold_labels.size()) {
    throw LengthMismatch("pr_curve: document count mismatch");
  }
  std::vector<std::pair<double, int>> tokens;
  for (std::size_t d = 0; d < scores.size(); ++d) {
    if (scores[d].size() != gold_labels[d].size()) {
      throw LengthMismatch("pr_curve: token count mismatch in document " + std::to_string(d));
    }
    for (std::size_t i = 0; i < scores[d].size(); ++i) {
      tokens.emplace_back(scores[d][i], gold_labels[d][i] != 0 ? 1 : 0);
    }
  }
  double prev_tau = -1.0;
  std::int64_t gold_positives = 0;
  for (const auto& [s, g] : tokens) gold_positives += g;

  PRCurve curve;
  for (double tau : grid) {
    if (tau < 0.0 || tau > 1.0 || tau <= prev_tau) {
      throw ConfigError("pr grid must be strictly ascending within [0, 1]");
    }
    prev_tau = tau;
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    for (const auto& [s, g] : tokens) {
      if (s > tau) {
        if (g) ++tp;
        else ++fp;
      }
    }
    PRPoint point;
    point.tau = tau;
    point.zero_predictions = (tp + fp) == 0;
    point.precision = point.zero_predictions ? 1.0 : static_cast<double>(tp) / (tp + fp);
    point.recall = gold_positives > 0 ? static_cast<double>(tp) / gold_positives : 0.0;
    curve.points.push_back(point);
  }
  // Trapezoid over (recall, precision), walking recall downwards.
  std::vector<std::pair<double, double>> rp;
  for (const PRPoint& p : curve.points) rp.emplace_back(p.recall, p.precision);
  if (!rp.empty() && rp.back().first > 0.0) rp.emplace_back(0.0, 1.0);
  for (std::size_t i = 0; i + 1 < rp.size(); ++i) {
    curve.auc += (rp[i].first - rp[i + 1].first) * (rp[i].second + rp[i + 1].second) / 2.0;
  }
  return curve;
}

}  // namespace toxspan
