// Command-line front end: corpus validation, training, prediction,
// augmentation and evaluation wired into reproducible runs.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "toxspan/toxspan.hpp"

namespace {

constexpr std::uint32_t kDefaultSeed = 42;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw toxspan::Error("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw toxspan::Error("cannot open '" + path + "' for writing");
  return out;
}

std::vector<toxspan::Document> load_dataset(const std::string& path, const std::string& format) {
  auto in = open_input(path);
  return toxspan::parse_dataset(in, toxspan::parse_format(format));
}

toxspan::Vocabulary load_vocab(const std::string& path) {
  auto in = open_input(path);
  return toxspan::Vocabulary::load(in);
}

toxspan::Lexicon load_lexicon(const std::string& path) {
  auto in = open_input(path);
  return toxspan::load_word_list(in);
}

std::vector<double> parse_grid(const std::string& list) {
  std::vector<double> grid;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) grid.push_back(std::stod(item));
  }
  if (grid.empty()) throw toxspan::ConfigError("empty threshold grid");
  return grid;
}

std::vector<double> default_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i * 0.05);
  return grid;
}

struct CommonOpts {
  std::string input;
  std::string output;
  std::string format = "csv";
  std::uint32_t seed = kDefaultSeed;
};

int run_validate(const CommonOpts& opts) {
  auto in = open_input(opts.input);
  const toxspan::ValidationReport report =
      toxspan::validate_dataset(in, toxspan::parse_format(opts.format));
  std::cout << "records " << report.n_records << "\n";
  for (const auto& [record, message] : report.errors) {
    std::cout << "record " << record << ": " << message << "\n";
  }
  if (report.clean()) {
    std::cout << "clean\n";
    return 0;
  }
  std::cout << report.errors.size() << " errors\n";
  return 2;
}

struct TrainOpts : CommonOpts {
  std::string vocab;
  std::string model;
  int epochs = 5;
};

int run_train(const TrainOpts& opts) {
  const auto docs = load_dataset(opts.input, opts.format);
  const toxspan::Vocabulary vocab = load_vocab(opts.vocab);
  std::vector<toxspan::LabeledTokenSequence> corpus;
  corpus.reserve(docs.size());
  for (const auto& doc : docs) {
    corpus.push_back(toxspan::project_labels(toxspan::tokenize(doc.text, vocab), doc.gold));
  }
  const toxspan::LinearModel model = toxspan::train_linear(corpus, opts.epochs, opts.seed);
  for (std::size_t epoch = 0; epoch < model.epoch_accuracy.size(); ++epoch) {
    std::cout << "epoch " << (epoch + 1) << " accuracy " << std::fixed << std::setprecision(4)
              << model.epoch_accuracy[epoch] << "\n";
  }
  auto out = open_output(opts.model);
  toxspan::save_model(out, model);
  std::cout << "model written to " << opts.model << " (" << model.weights.size()
            << " features)\n";
  return 0;
}

struct PredictOpts : CommonOpts {
  std::string vocab;
  std::string model;
  std::string lexicon;
  std::string baseline;
  std::string scores;
  std::string scores_out;
  double tau = 0.5;
  bool no_gap_fill = false;
  bool no_word_coherence = false;
  bool fusion = false;
  bool uncased = false;
  std::optional<int> max_tokens;
};

int run_predict(const PredictOpts& opts) {
  const auto docs = load_dataset(opts.input, opts.format);
  std::vector<toxspan::SpanSet> predictions;
  predictions.reserve(docs.size());

  std::ostringstream scores_dump;

  if (!opts.baseline.empty()) {
    // The random baseline draws per character; no tokenization involved.
    for (std::size_t i = 0; i < docs.size(); ++i) {
      toxspan::RandomBaselineConfig cfg;
      cfg.threshold = opts.tau;
      cfg.seed = opts.seed + static_cast<std::uint32_t>(i);
      predictions.push_back(toxspan::random_char_predict(docs[i].text, cfg));
    }
  } else {
    const toxspan::Vocabulary vocab = load_vocab(opts.vocab);

    std::unique_ptr<toxspan::TokenClassifier> classifier;
    toxspan::ScoreTable table;
    if (!opts.model.empty()) {
      auto in = open_input(opts.model);
      classifier = std::make_unique<toxspan::LinearTokenClassifier>(toxspan::load_model(in));
    } else if (!opts.scores.empty()) {
      auto in = open_input(opts.scores);
      table = toxspan::ScoreTable::load_jsonl(in);
    } else {
      classifier = std::make_unique<toxspan::LexiconClassifier>(load_lexicon(opts.lexicon));
    }

    std::unique_ptr<toxspan::SentenceClassifier> sentence_clf;
    if (opts.fusion) {
      sentence_clf =
          std::make_unique<toxspan::LexiconSentenceClassifier>(load_lexicon(opts.lexicon));
    }

    toxspan::PipelineConfig cfg;
    cfg.classifier = classifier.get();
    cfg.tau = opts.tau;
    cfg.gap_fill = !opts.no_gap_fill;
    cfg.word_coherence = !opts.no_word_coherence;
    cfg.late_fusion = sentence_clf.get();
    cfg.max_tokens = opts.max_tokens;
    cfg.lowercase_lookup = opts.uncased;

    for (const auto& doc : docs) {
      const toxspan::TokenSequence seq = toxspan::tokenize(
          doc.text, vocab, toxspan::TokenizeOptions{cfg.max_tokens, cfg.lowercase_lookup});
      std::vector<double> scores;
      if (classifier != nullptr) {
        scores = classifier->predict(seq);
      } else {
        const auto it = table.scores.find(doc.id);
        if (it == table.scores.end()) {
          throw toxspan::UnknownDocumentId("no scores for document '" + doc.id + "'");
        }
        if (it->second.size() != seq.tokens.size()) {
          throw toxspan::LengthMismatch("document '" + doc.id + "': " +
                                        std::to_string(it->second.size()) + " scores for " +
                                        std::to_string(seq.tokens.size()) + " tokens");
        }
        scores = it->second;
      }
      if (!opts.scores_out.empty()) {
        nlohmann::json obj;
        obj["id"] = doc.id;
        obj["scores"] = scores;
        scores_dump << obj.dump() << '\n';
      }
      predictions.push_back(toxspan::assemble_spans(cfg, seq, scores));
    }
  }

  if (opts.output.empty()) {
    toxspan::write_predictions(std::cout, predictions);
  } else {
    auto out = open_output(opts.output);
    toxspan::write_predictions(out, predictions);
  }
  if (!opts.scores_out.empty()) {
    auto out = open_output(opts.scores_out);
    out << scores_dump.str();
  }
  return 0;
}

struct EvaluateOpts : CommonOpts {
  std::string pred;
};

int run_evaluate(const EvaluateOpts& opts) {
  const auto golds = load_dataset(opts.input, opts.format);
  auto pred_in = open_input(opts.pred);
  const auto preds = toxspan::read_predictions(pred_in);
  const toxspan::MetricsReport report = toxspan::evaluate_ordered(preds, golds);
  std::cout << report.to_table();
  if (!opts.output.empty()) {
    auto out = open_output(opts.output);
    out << report.to_json().dump(2) << '\n';
  }
  return 0;
}

struct AugmentOpts : CommonOpts {
  std::string synonyms;
  std::string ops = "sr,ri,rs,rd";
  double alpha = 0.1;
  int copies = 1;
};

int run_augment(const AugmentOpts& opts) {
  const auto docs = load_dataset(opts.input, opts.format);
  toxspan::AugmentConfig cfg;
  cfg.alpha = opts.alpha;
  cfg.seed = opts.seed;
  cfg.per_doc_copies = opts.copies;
  cfg.operations.clear();
  std::stringstream ss(opts.ops);
  std::string op;
  while (std::getline(ss, op, ',')) {
    if (op == "sr" || op == "SR") cfg.operations.push_back(toxspan::EdaOp::SR);
    else if (op == "ri" || op == "RI") cfg.operations.push_back(toxspan::EdaOp::RI);
    else if (op == "rs" || op == "RS") cfg.operations.push_back(toxspan::EdaOp::RS);
    else if (op == "rd" || op == "RD") cfg.operations.push_back(toxspan::EdaOp::RD);
    else if (!op.empty()) throw toxspan::ConfigError("unknown augmentation op '" + op + "'");
  }
  if (!opts.synonyms.empty()) {
    auto in = open_input(opts.synonyms);
    cfg.synonyms = toxspan::load_synonyms(in);
  }
  const auto augmented = toxspan::augment_corpus(docs, cfg);
  auto out = open_output(opts.output);
  toxspan::write_dataset(out, augmented, toxspan::parse_format(opts.format));
  std::cout << "wrote " << augmented.size() << " records (" << docs.size() << " original)\n";
  return 0;
}

struct ReportOpts : CommonOpts {
  std::string scores;
  std::string vocab;
  std::string grid;
  std::string pr_out = "pr.csv";
  std::string confusion_out = "confusion.csv";
  double tau = 0.5;
  bool uncased = false;
  std::optional<int> max_tokens;
};

int run_report(const ReportOpts& opts) {
  const auto golds = load_dataset(opts.input, opts.format);
  const toxspan::Vocabulary vocab = load_vocab(opts.vocab);
  auto scores_in = open_input(opts.scores);
  const toxspan::ScoreTable table = toxspan::ScoreTable::load_jsonl(scores_in);

  std::vector<std::vector<double>> scores;
  std::vector<std::vector<int>> gold_labels;
  std::vector<std::vector<int>> pred_labels;
  for (const auto& doc : golds) {
    const toxspan::TokenSequence seq = toxspan::tokenize(
        doc.text, vocab, toxspan::TokenizeOptions{opts.max_tokens, opts.uncased});
    const auto it = table.scores.find(doc.id);
    if (it == table.scores.end()) {
      throw toxspan::UnknownDocumentId("no scores for document '" + doc.id + "'");
    }
    if (it->second.size() != seq.tokens.size()) {
      throw toxspan::LengthMismatch("document '" + doc.id + "': " +
                                    std::to_string(it->second.size()) + " scores for " +
                                    std::to_string(seq.tokens.size()) + " tokens");
    }
    gold_labels.push_back(toxspan::project_labels(seq, doc.gold).labels);
    pred_labels.push_back(toxspan::threshold_labels(it->second, opts.tau));
    scores.push_back(it->second);
  }

  const std::vector<double> grid =
      opts.grid.empty() ? default_grid() : parse_grid(opts.grid);
  const toxspan::PRCurve curve = toxspan::pr_curve(scores, gold_labels, grid);
  const toxspan::ConfusionMatrix cm = toxspan::token_confusion(pred_labels, gold_labels);

  open_output(opts.pr_out) << curve.to_csv();
  open_output(opts.confusion_out) << cm.to_csv();
  std::cout << "auc " << std::fixed << std::setprecision(4) << curve.auc << "\n";
  std::cout << "tokens " << cm.total() << " tp " << cm.tp << " fp " << cm.fp << " fn " << cm.fn
            << " tn " << cm.tn << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toxic span detection pipeline"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file (key=value; sections per subcommand)")
      ->envname("TOXSPAN_CONFIG");

  CommonOpts validate_opts;
  auto* validate = app.add_subcommand("validate", "Parse and bounds-check a dataset");
  validate->add_option("--input", validate_opts.input, "Dataset file")->required();
  validate->add_option("--format", validate_opts.format, "Input format")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  TrainOpts train_opts;
  auto* train = app.add_subcommand("train", "Train the linear token classifier");
  train->add_option("--input", train_opts.input, "Training dataset")->required();
  train->add_option("--vocab", train_opts.vocab, "Vocabulary file")->required();
  train->add_option("--model", train_opts.model, "Model output path")->required();
  train->add_option("--epochs", train_opts.epochs, "Training epochs");
  train->add_option("--seed", train_opts.seed, "Random seed");
  train->add_option("--format", train_opts.format, "Input format")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  PredictOpts predict_opts;
  auto* predict = app.add_subcommand("predict", "Predict toxic spans");
  predict->add_option("--input", predict_opts.input, "Dataset file")->required();
  predict->add_option("--output", predict_opts.output, "Predictions file (default stdout)");
  predict->add_option("--vocab", predict_opts.vocab, "Vocabulary file");
  predict->add_option("--model", predict_opts.model, "Trained model file");
  predict->add_option("--lexicon", predict_opts.lexicon, "Lexicon file (one word per line)");
  predict->add_option("--baseline", predict_opts.baseline, "Baseline predictor")
      ->check(CLI::IsMember({"random"}));
  predict->add_option("--scores", predict_opts.scores, "External per-token scores (jsonl)");
  predict->add_option("--scores-out", predict_opts.scores_out,
                      "Write per-token scores (jsonl)");
  predict->add_option("--tau", predict_opts.tau, "Decision threshold");
  predict->add_option("--seed", predict_opts.seed, "Random seed");
  predict->add_option("--max-tokens", predict_opts.max_tokens, "Truncate sequences");
  predict->add_flag("--no-gap-fill", predict_opts.no_gap_fill, "Disable gap filling");
  predict->add_flag("--no-word-coherence", predict_opts.no_word_coherence,
                    "Disable word coherence");
  predict->add_flag("--fusion", predict_opts.fusion,
                    "Gate spans by a lexicon sentence classifier");
  predict->add_flag("--uncased", predict_opts.uncased, "Lowercase vocabulary lookup");
  predict->add_option("--format", predict_opts.format, "Input format")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  EvaluateOpts evaluate_opts;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against gold spans");
  evaluate->add_option("--input", evaluate_opts.input, "Gold dataset")->required();
  evaluate->add_option("--pred", evaluate_opts.pred, "Predictions file")->required();
  evaluate->add_option("--output", evaluate_opts.output, "Metrics JSON output path");
  evaluate->add_option("--format", evaluate_opts.format, "Input format")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  AugmentOpts augment_opts;
  auto* augment = app.add_subcommand("augment", "Write an EDA-augmented dataset");
  augment->add_option("--input", augment_opts.input, "Dataset file")->required();
  augment->add_option("--output", augment_opts.output, "Augmented dataset path")->required();
  augment->add_option("--synonyms", augment_opts.synonyms, "Synonym lexicon (tsv)");
  augment->add_option("--alpha", augment_opts.alpha, "Fraction of words modified");
  augment->add_option("--ops", augment_opts.ops, "Comma list of sr,ri,rs,rd");
  augment->add_option("--copies", augment_opts.copies, "Augmented copies per document");
  augment->add_option("--seed", augment_opts.seed, "Random seed");
  augment->add_option("--format", augment_opts.format, "Input format")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  ReportOpts report_opts;
  auto* report = app.add_subcommand("report", "Emit PR-curve and confusion CSVs");
  report->add_option("--input", report_opts.input, "Gold dataset")->required();
  report->add_option("--scores", report_opts.scores, "Per-token scores (jsonl)")->required();
  report->add_option("--vocab", report_opts.vocab, "Vocabulary file")->required();
  report->add_option("--grid", report_opts.grid, "Comma list of thresholds");
  report->add_option("--tau", report_opts.tau, "Confusion matrix threshold");
  report->add_option("--pr-out", report_opts.pr_out, "PR curve CSV path");
  report->add_option("--confusion-out", report_opts.confusion_out, "Confusion CSV path");
  report->add_option("--max-tokens", report_opts.max_tokens, "Truncate sequences");
  report->add_flag("--uncased", report_opts.uncased, "Lowercase vocabulary lookup");
  report->add_option("--format", report_opts.format, "Input format")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (validate->parsed()) return run_validate(validate_opts);
    if (train->parsed()) return run_train(train_opts);
    if (predict->parsed()) {
      // --lexicon doubles as the token classifier when it is the only
      // source, and as the fusion sentence classifier otherwise.
      int primary = 0;
      for (const std::string& s :
           {predict_opts.model, predict_opts.baseline, predict_opts.scores}) {
        if (!s.empty()) ++primary;
      }
      const bool lexicon_given = !predict_opts.lexicon.empty();
      if (primary > 1 || (primary == 0 && !lexicon_given)) {
        std::cerr << "predict requires exactly one of --model, --lexicon, --baseline, --scores"
                  << std::endl;
        return 1;
      }
      if (primary == 1 && lexicon_given && !predict_opts.fusion) {
        std::cerr << "--lexicon alongside another classifier source needs --fusion" << std::endl;
        return 1;
      }
      if (predict_opts.fusion && predict_opts.lexicon.empty()) {
        std::cerr << "--fusion requires --lexicon for the sentence classifier" << std::endl;
        return 1;
      }
      if (predict_opts.fusion && !predict_opts.baseline.empty()) {
        std::cerr << "--fusion applies to the token pipeline, not --baseline" << std::endl;
        return 1;
      }
      if (predict_opts.baseline.empty() && predict_opts.vocab.empty()) {
        std::cerr << "predict requires --vocab unless --baseline is used" << std::endl;
        return 1;
      }
      return run_predict(predict_opts);
    }
    if (evaluate->parsed()) return run_evaluate(evaluate_opts);
    if (augment->parsed()) return run_augment(augment_opts);
    if (report->parsed()) return run_report(report_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 0;
}
