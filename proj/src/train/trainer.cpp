#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "textgat/error.hpp"
#include "textgat/layers/loss.hpp"
#include "textgat/train.hpp"

namespace textgat {

void RunLog::write_csv(std::ostream& out) const {
  out << "epoch,train_loss,val_loss,val_acc,wall_ms\n";
  std::ostringstream os;
  os.precision(17);
  for (const auto& r : records)
    os << r.epoch << ',' << r.train_loss << ',' << r.val_loss << ',' << r.val_accuracy << ',' << r.wall_ms << '\n';
  out << os.str();
}

double RunLog::mean_epoch_ms() const {
  if (records.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : records) s += r.wall_ms;
  return s / static_cast<double>(records.size());
}

std::size_t argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < row.size(); ++c)
    if (row[c] > row[best]) best = c;
  return best;
}

DenseMatrix load_features(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open features file '" + path + "'");
  std::vector<double> values;
  std::size_t rows = 0, cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) throw Error("features file: unparsable value on row " + std::to_string(rows + 1));
    if (row.empty()) continue;
    if (rows == 0) cols = row.size();
    if (row.size() != cols) throw Error("features file: row " + std::to_string(rows + 1) + " has a different width");
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw Error("features file is empty");
  DenseMatrix m(rows, cols, std::move(values));
  if (!m.all_finite()) throw Error("features file contains non-finite values");
  return m;
}

ModelInputs make_inputs(const TextGraph& graph, const std::optional<DenseMatrix>& features) {
  ModelInputs in;
  if (features) {
    if (features->rows() != graph.n_nodes())
      throw Error("features have " + std::to_string(features->rows()) + " rows but the graph has " +
                  std::to_string(graph.n_nodes()) + " nodes");
    in.features = SparseMatrix::from_dense(*features);
  } else {
    in.features = SparseMatrix::identity(graph.n_nodes());
  }
  in.pattern = graph.adjacency;
  in.a_hat = normalize_adjacency(graph.adjacency);
  return in;
}

namespace {

double accuracy(const DenseMatrix& probs, const std::vector<std::size_t>& labels, const std::vector<std::size_t>& nodes) {
  std::size_t hit = 0;
  for (std::size_t v : nodes)
    if (argmax(probs.row(v)) == labels[v]) ++hit;
  return static_cast<double>(hit) / static_cast<double>(nodes.size());
}

}  // namespace

TrainResult train(const TextGraph& graph, const TrainConfig& config, const TrainOptions& options) {
  config.validate();
  std::vector<std::size_t> train_nodes = options.train_nodes ? *options.train_nodes : graph.nodes_in(Split::train);
  std::vector<std::size_t> val_nodes = graph.nodes_in(Split::val);
  if (train_nodes.empty()) throw Error("train: the training mask is empty");
  if (val_nodes.empty()) throw Error("train: the validation mask is empty");
  if (graph.n_classes() < 2) throw Error("train: need at least 2 classes");

  ModelInputs inputs = make_inputs(graph, options.features);
  ModelConfig mc = model_config(config, feature_cols(inputs.features), graph.n_classes());
  // Labels indexed by node; term nodes carry no label and never appear in a mask.
  std::vector<std::size_t> labels(graph.n_nodes(), 0);
  for (std::size_t d = 0; d < graph.n_docs; ++d) labels[d] = graph.labels[d];

  Rng rng(config.seed);
  ModelParams params = init_params(mc, rng);
  Adam adam(params, config.learning_rate, config.beta1, config.beta2, config.adam_epsilon);

  TrainResult result;
  result.checkpoint.config = config;
  result.checkpoint.model = mc;
  result.checkpoint.rng_algorithm = std::string(Rng::kAlgorithm);
  result.checkpoint.seed = config.seed;
  result.checkpoint.params = params;
  result.best_val_loss = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    LossAndGrad lg = loss_and_grad(mc, params, inputs, labels, train_nodes, Mode::train, &rng);
    if (!std::isfinite(lg.loss)) throw Error("train: non-finite loss at epoch " + std::to_string(epoch));
    adam.step(params, lg.grads);

    ForwardPass eval = model_forward(mc, params, inputs, Mode::eval, nullptr);
    double val_loss = cross_entropy(eval.probs, labels, val_nodes);
    if (!std::isfinite(val_loss)) throw Error("train: non-finite validation loss at epoch " + std::to_string(epoch));
    double val_acc = accuracy(eval.probs, labels, val_nodes);
    auto t1 = std::chrono::steady_clock::now();

    EpochRecord rec{epoch, lg.loss, val_loss, val_acc, std::chrono::duration<double, std::milli>(t1 - t0).count()};
    result.log.records.push_back(rec);
    if (options.on_epoch) options.on_epoch(rec);

    if (val_loss < result.best_val_loss) {
      result.best_val_loss = val_loss;
      result.checkpoint.params = params;
      result.checkpoint.epoch = epoch;
      since_best = 0;
    } else if (config.patience > 0 && ++since_best >= config.patience) {
      result.early_stopped = true;
      break;
    }
  }
  return result;
}

Prediction predict(const Checkpoint& ck, const TextGraph& graph, const std::optional<DenseMatrix>& features) {
  ModelInputs inputs = make_inputs(graph, features);
  if (feature_cols(inputs.features) != ck.model.input_dim)
    throw Error("predict: checkpoint expects input width " + std::to_string(ck.model.input_dim) + ", graph gives " +
                std::to_string(feature_cols(inputs.features)));
  if (graph.n_classes() != ck.model.classes)
    throw Error("predict: checkpoint has " + std::to_string(ck.model.classes) + " classes, graph has " +
                std::to_string(graph.n_classes()));
  ForwardPass fp = model_forward(ck.model, ck.params, inputs, Mode::eval, nullptr);
  Prediction p;
  p.probs = DenseMatrix(graph.n_docs, ck.model.classes);
  for (std::size_t d = 0; d < graph.n_docs; ++d) {
    std::copy(fp.probs.row(d).begin(), fp.probs.row(d).end(), p.probs.row(d).begin());
    p.classes.push_back(argmax(fp.probs.row(d)));
  }
  return p;
}

}  // namespace textgat
