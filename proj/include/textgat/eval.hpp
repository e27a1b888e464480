#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "textgat/corpus.hpp"
#include "textgat/graph.hpp"
#include "textgat/train.hpp"

namespace textgat {

// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes = 0) : classes_(classes), counts_(classes * classes, 0) {}

  std::size_t classes() const { return classes_; }
  std::uint64_t operator()(std::size_t truth, std::size_t pred) const { return counts_[truth * classes_ + pred]; }
  std::uint64_t& operator()(std::size_t truth, std::size_t pred) { return counts_[truth * classes_ + pred]; }
  std::uint64_t total() const;
  std::uint64_t trace() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t classes_;
  std::vector<std::uint64_t> counts_;
};

// Tallies (labels[i], preds[i]) for every i in `nodes`.
ConfusionMatrix confusion(std::span<const std::size_t> preds, std::span<const std::size_t> labels,
                          std::span<const std::size_t> nodes, std::size_t classes);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
};

// One-vs-rest per class; 0/0 cells are 0. macro_f is the harmonic combination
// of macro_precision and macro_recall, not the mean of per-class F.
struct MetricsReport {
  std::vector<ClassMetrics> per_class;
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f = 0.0;
};

MetricsReport metrics(const ConfusionMatrix& cm);

std::string report_to_json(const MetricsReport& report, const ConfusionMatrix& cm,
                           const std::vector<std::string>& class_names);
// Header: class,precision,recall,f_score ; then per-class rows and
// macro/accuracy rows.
void report_to_csv(const MetricsReport& report, const std::vector<std::string>& class_names, std::ostream& out);

// Metrics of a prediction over one split of the graph.
MetricsReport evaluate_split(const TextGraph& graph, const Prediction& prediction, Split split, ConfusionMatrix* cm = nullptr);

// --- Summary statistics over repeated runs ---

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 for a single value
};
Summary summarize(std::span<const double> values);

// Welch two-sample t-test (unequal variances), two-sided.
struct TTest {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};
TTest welch_t_test(std::span<const double> a, std::span<const double> b);

// Trains with seeds config.seed + 0 .. repeats-1 and evaluates each best
// checkpoint on `split`.
std::vector<MetricsReport> repeated_runs(const TextGraph& graph, const TrainConfig& config, std::size_t repeats,
                                         Split split, std::size_t jobs = 1);

// --- Ablation harnesses ---

struct HeadAblationRow {
  std::size_t heads = 0;
  double test_accuracy = 0.0;
  double mean_epoch_ms = 0.0;
  RunLog log;
};
std::vector<HeadAblationRow> ablate_heads(const TextGraph& graph, const TrainConfig& base,
                                          std::span<const std::size_t> head_counts, std::size_t jobs = 1);
// heads,test_accuracy,mean_epoch_ms
void write_heads_csv(std::span<const HeadAblationRow> rows, std::ostream& out);
// heads,epoch,train_loss,val_loss
void write_loss_curves_csv(std::span<const HeadAblationRow> rows, std::ostream& out);

// Class-stratified draw of floor(fraction * n_c) training documents per
// class, in ascending node order. Throws when a class would end up empty.
std::vector<std::size_t> stratified_subsample(const TextGraph& graph, std::span<const std::size_t> train_nodes,
                                              double fraction, std::uint64_t seed);

struct LabelFractionRow {
  double fraction = 0.0;
  std::size_t train_docs = 0;
  double test_accuracy = 0.0;
};
std::vector<LabelFractionRow> ablate_label_fraction(const TextGraph& graph, const TrainConfig& config,
                                                    std::span<const double> fractions, std::size_t jobs = 1);
// fraction,train_docs,test_accuracy
void write_label_fraction_csv(std::span<const LabelFractionRow> rows, std::ostream& out);

struct TokenizationRow {
  std::string mode;
  std::size_t nodes = 0;
  std::size_t vocab = 0;
  double test_accuracy = 0.0;
  double macro_f = 0.0;
};
// Builds one graph per tokenization and trains both identically.
std::vector<TokenizationRow> compare_tokenization(const Corpus& corpus_char, const Corpus& corpus_word,
                                                  const TrainConfig& config, std::size_t jobs = 1);
// mode,nodes,vocab,test_accuracy,macro_f
void write_tokenization_csv(std::span<const TokenizationRow> rows, std::ostream& out);

// Runs task(i) for i in [0, n) on up to `jobs` threads; results are written
// by index so the output order never depends on scheduling.
void run_parallel(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& task);

}  // namespace textgat
