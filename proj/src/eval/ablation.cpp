#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "textgat/error.hpp"
#include "textgat/eval.hpp"

namespace textgat {

void run_parallel(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& task) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

double test_accuracy(const TextGraph& graph, const Checkpoint& ck) {
  return evaluate_split(graph, predict(ck, graph), Split::test).accuracy;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::vector<MetricsReport> repeated_runs(const TextGraph& graph, const TrainConfig& config, std::size_t repeats,
                                         Split split, std::size_t jobs) {
  if (repeats == 0) throw Error("repeats must be at least 1");
  std::vector<MetricsReport> out(repeats);
  run_parallel(repeats, jobs, [&](std::size_t r) {
    TrainConfig c = config;
    c.seed = config.seed + r;
    TrainResult res = train(graph, c);
    out[r] = evaluate_split(graph, predict(res.checkpoint, graph), split);
  });
  return out;
}

std::vector<HeadAblationRow> ablate_heads(const TextGraph& graph, const TrainConfig& base,
                                          std::span<const std::size_t> head_counts, std::size_t jobs) {
  if (head_counts.empty()) throw Error("ablate_heads: no head counts given");
  std::vector<HeadAblationRow> rows(head_counts.size());
  run_parallel(head_counts.size(), jobs, [&](std::size_t i) {
    TrainConfig c = base;
    c.heads = head_counts[i];
    TrainResult res = train(graph, c);
    rows[i].heads = head_counts[i];
    rows[i].test_accuracy = test_accuracy(graph, res.checkpoint);
    rows[i].mean_epoch_ms = res.log.mean_epoch_ms();
    rows[i].log = std::move(res.log);
  });
  return rows;
}

void write_heads_csv(std::span<const HeadAblationRow> rows, std::ostream& out) {
  out << "heads,test_accuracy,mean_epoch_ms\n";
  for (const auto& r : rows) out << r.heads << ',' << num(r.test_accuracy) << ',' << num(r.mean_epoch_ms) << '\n';
}

void write_loss_curves_csv(std::span<const HeadAblationRow> rows, std::ostream& out) {
  out << "heads,epoch,train_loss,val_loss\n";
  for (const auto& r : rows)
    for (const auto& e : r.log.records)
      out << r.heads << ',' << e.epoch << ',' << num(e.train_loss) << ',' << num(e.val_loss) << '\n';
}

std::vector<std::size_t> stratified_subsample(const TextGraph& graph, std::span<const std::size_t> train_nodes,
                                              double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0) throw Error("label fraction must be in (0, 1]");
  std::map<std::size_t, std::vector<std::size_t>> by_class;
  for (std::size_t v : train_nodes) by_class[graph.labels.at(v)].push_back(v);
  for (std::size_t c = 0; c < graph.n_classes(); ++c)
    if (!by_class.contains(c)) throw Error("class '" + graph.class_names[c] + "' has no training documents");

  Rng rng(seed);
  std::vector<std::size_t> out;
  for (auto& [cls, nodes] : by_class) {
    std::size_t take = fraction == 1.0 ? nodes.size()
                                       : static_cast<std::size_t>(fraction * static_cast<double>(nodes.size()));
    if (take == 0)
      throw Error("label fraction " + num(fraction) + " leaves class '" + graph.class_names[cls] + "' without training documents");
    rng.shuffle(nodes);
    out.insert(out.end(), nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<LabelFractionRow> ablate_label_fraction(const TextGraph& graph, const TrainConfig& config,
                                                    std::span<const double> fractions, std::size_t jobs) {
  if (fractions.empty()) throw Error("ablate_label_fraction: no fractions given");
  const auto train_nodes = graph.nodes_in(Split::train);
  std::vector<std::vector<std::size_t>> subsets;
  for (double f : fractions) subsets.push_back(stratified_subsample(graph, train_nodes, f, config.seed));

  std::vector<LabelFractionRow> rows(fractions.size());
  run_parallel(fractions.size(), jobs, [&](std::size_t i) {
    TrainOptions opts;
    opts.train_nodes = subsets[i];
    TrainResult res = train(graph, config, opts);
    rows[i] = {fractions[i], subsets[i].size(), test_accuracy(graph, res.checkpoint)};
  });
  return rows;
}

void write_label_fraction_csv(std::span<const LabelFractionRow> rows, std::ostream& out) {
  out << "fraction,train_docs,test_accuracy\n";
  for (const auto& r : rows) out << num(r.fraction) << ',' << r.train_docs << ',' << num(r.test_accuracy) << '\n';
}

std::vector<TokenizationRow> compare_tokenization(const Corpus& corpus_char, const Corpus& corpus_word,
                                                  const TrainConfig& config, std::size_t jobs) {
  const Corpus* corpora[2] = {&corpus_char, &corpus_word};
  std::vector<TokenizationRow> rows(2);
  run_parallel(2, jobs, [&](std::size_t i) {
    const Corpus& c = *corpora[i];
    Vocabulary vocab = build_vocabulary(c);
    TextGraph g = build_graph(c, vocab, config.window_size);
    TrainResult res = train(g, config);
    MetricsReport m = evaluate_split(g, predict(res.checkpoint, g), Split::test);
    rows[i] = {i == 0 ? "char" : "word", g.n_nodes(), vocab.size(), m.accuracy, m.macro_f};
  });
  return rows;
}

void write_tokenization_csv(std::span<const TokenizationRow> rows, std::ostream& out) {
  out << "mode,nodes,vocab,test_accuracy,macro_f\n";
  for (const auto& r : rows)
    out << r.mode << ',' << r.nodes << ',' << r.vocab << ',' << num(r.test_accuracy) << ',' << num(r.macro_f) << '\n';
}

}  // namespace textgat
