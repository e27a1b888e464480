#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "textgat/graph.hpp"
#include "textgat/layers/model.hpp"

namespace textgat {

// Training hyperparameters. Defaults: 1000 epochs, learning rate 0.005, 8
// hidden units, 8 heads, dropout 0.5, LeakyReLU slope 0.2, L2 5e-4, window 25.
struct TrainConfig {
  std::size_t epochs = 1000;
  double learning_rate = 0.005;
  std::size_t hidden_units = 8;
  std::size_t heads = 8;
  double dropout = 0.5;
  double leaky_alpha = 0.2;
  double l2 = 5e-4;
  std::size_t window_size = 25;
  std::uint64_t seed = 0;
  std::size_t patience = 100;  // 0 disables early stopping

  Architecture architecture = Architecture::gat;
  std::size_t output_heads = 1;
  bool attention_dropout = true;
  L2Scope l2_scope = L2Scope::first_layer;
  EdgeWeighting edge_weighting = EdgeWeighting::mask;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Sets one field by its name; throws on unknown keys or unparsable values.
void apply_setting(TrainConfig& config, const std::string& key, const std::string& value);
// Flat `key = value` lines; '#' starts a comment.
TrainConfig parse_config(std::istream& in, TrainConfig base = {});
TrainConfig load_config(const std::string& path, TrainConfig base = {});
// Every field as `key = value`, in declaration order.
std::string config_to_text(const TrainConfig& config);
std::vector<std::string> config_keys();

ModelConfig model_config(const TrainConfig& config, std::size_t input_dim, std::size_t classes);

class Adam {
 public:
  Adam(const ModelParams& shape, double lr, double beta1, double beta2, double eps);
  void step(ModelParams& params, const ModelParams& grads);
  std::size_t steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

struct Checkpoint {
  TrainConfig config;
  ModelConfig model;
  std::string rng_algorithm;
  std::uint64_t seed = 0;
  std::size_t epoch = 0;  // epoch whose parameters are stored
  ModelParams params;
};

inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

void write_checkpoint(const Checkpoint& ckpt, std::ostream& out);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  double wall_ms = 0.0;
};

struct RunLog {
  std::vector<EpochRecord> records;
  // Header: epoch,train_loss,val_loss,val_acc,wall_ms
  void write_csv(std::ostream& out) const;
  double mean_epoch_ms() const;
};

struct TrainOptions {
  // Replaces the graph's training split when set (document node indices).
  std::optional<std::vector<std::size_t>> train_nodes;
  // Dense node features (n_nodes rows); identity one-hot features when unset.
  std::optional<DenseMatrix> features;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  Checkpoint checkpoint;  // best validation loss
  RunLog log;
  double best_val_loss = 0.0;
  bool early_stopped = false;
};

ModelInputs make_inputs(const TextGraph& graph, const std::optional<DenseMatrix>& features = std::nullopt);

// Full-batch Adam on the masked cross-entropy. Keeps the parameters with the
// lowest validation loss; stops after `patience` epochs without improvement.
TrainResult train(const TextGraph& graph, const TrainConfig& config, const TrainOptions& options = {});

struct Prediction {
  std::vector<std::size_t> classes;  // per document, argmax with ties to the lowest index
  DenseMatrix probs;                 // n_docs x classes
};

Prediction predict(const Checkpoint& ckpt, const TextGraph& graph, const std::optional<DenseMatrix>& features = std::nullopt);

// Index of the largest entry; ties resolve to the lowest index.
std::size_t argmax(std::span<const double> row);

// Whitespace-separated rows of numbers, one row per graph node.
DenseMatrix load_features(const std::string& path);

}  // namespace textgat
