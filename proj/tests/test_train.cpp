#include <cmath>
#include <sstream>

#include "doctest.h"
#include "support/oracles.hpp"
#include "textgat/error.hpp"
#include "textgat/train.hpp"

using namespace textgat;

namespace {

std::string checkpoint_bytes(const Checkpoint& c) {
  std::ostringstream os;
  write_checkpoint(c, os);
  return os.str();
}

TrainConfig quick(std::size_t epochs) {
  TrainConfig c;
  c.epochs = epochs;
  c.hidden_units = 4;
  c.heads = 2;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_CASE("default hyperparameters") {
  TrainConfig c;
  CHECK(c.epochs == 1000);
  CHECK(c.learning_rate == 0.005);
  CHECK(c.hidden_units == 8);
  CHECK(c.heads == 8);
  CHECK(c.dropout == 0.5);
  CHECK(c.leaky_alpha == 0.2);
  CHECK(c.l2 == 5e-4);
  CHECK(c.window_size == 25);
  CHECK(c.patience == 100);
  CHECK(c.beta1 == 0.9);
  CHECK(c.beta2 == 0.999);
  CHECK(c.adam_epsilon == 1e-8);
}

TEST_CASE("config parsing, overrides and round trip") {
  std::istringstream in("# comment\nepochs = 12\nlearning_rate=0.01  # trailing\n\narchitecture = gcn\n");
  TrainConfig c = parse_config(in);
  CHECK(c.epochs == 12);
  CHECK(c.learning_rate == 0.01);
  CHECK(c.architecture == Architecture::gcn);
  CHECK(c.heads == 8);
  apply_setting(c, "heads", "4");
  CHECK(c.heads == 4);
  std::istringstream again(config_to_text(c));
  CHECK(parse_config(again) == c);
  CHECK_THROWS_AS(apply_setting(c, "nonsense", "1"), Error);
  CHECK_THROWS_AS(apply_setting(c, "epochs", "ten"), Error);
  TrainConfig out_of_range = c;
  apply_setting(out_of_range, "dropout", "1.5");
  CHECK_THROWS_AS(out_of_range.validate(), Error);
  std::istringstream bad("epochs 5\n");
  CHECK_THROWS_AS(parse_config(bad), Error);
  CHECK(config_keys().size() == 18);
}

TEST_CASE("adam matches a hand-rolled update") {
  ModelConfig mc;
  mc.architecture = Architecture::gcn;
  mc.input_dim = 2;
  mc.hidden_units = 1;
  mc.heads = 1;
  mc.classes = 2;
  ModelParams p = make_params(mc), g = make_params(mc);
  for (auto* t : g.tensors())
    for (double& v : t->values()) v = 0.5;
  Adam adam(p, 0.1, 0.9, 0.999, 1e-8);
  adam.step(p, g);
  adam.step(p, g);
  // Constant gradient: m_hat = v_hat^(1/2) = 0.5, so each step moves by lr * 0.5 / (0.5 + eps).
  const double step = 0.1 * 0.5 / (0.5 + 1e-8);
  for (const auto* t : p.tensors())
    for (double v : t->values()) CHECK(v == doctest::Approx(-2.0 * step).epsilon(1e-12));
  CHECK(adam.steps() == 2);
}

TEST_CASE("training loss decreases over the first ten epochs on the seven-node fixture") {
  TextGraph g = testing::seven_node_graph();
  TrainConfig c;
  c.epochs = 10;
  c.patience = 0;
  // Dropout off so the per-epoch objective is the same function every epoch.
  c.dropout = 0.0;
  TrainResult r = train(g, c);
  REQUIRE(r.log.records.size() == 10);
  for (std::size_t i = 1; i < 10; ++i) {
    CAPTURE(i);
    CHECK(r.log.records[i].train_loss < r.log.records[i - 1].train_loss);
  }
}

TEST_CASE("patience zero runs every epoch; epochs are strictly increasing") {
  TextGraph g = testing::seven_node_graph();
  TrainConfig c = quick(25);
  c.patience = 0;
  TrainResult r = train(g, c);
  CHECK(r.log.records.size() == 25);
  CHECK_FALSE(r.early_stopped);
  for (std::size_t i = 0; i < r.log.records.size(); ++i) CHECK(r.log.records[i].epoch == i + 1);
}

TEST_CASE("early stopping and the best checkpoint") {
  TextGraph g = testing::seven_node_graph();
  TrainConfig c = quick(400);
  c.patience = 5;
  c.learning_rate = 0.05;
  TrainResult r = train(g, c);
  CHECK(r.early_stopped);
  CHECK(r.log.records.size() < 400);
  for (const auto& rec : r.log.records) CHECK(r.best_val_loss <= rec.val_loss);
  CHECK(r.log.records[r.checkpoint.epoch - 1].val_loss == r.best_val_loss);
}

TEST_CASE("same seed and config give bit-identical checkpoints") {
  TextGraph g = testing::seven_node_graph();
  TrainConfig c = quick(30);
  CHECK(checkpoint_bytes(train(g, c).checkpoint) == checkpoint_bytes(train(g, c).checkpoint));
  TrainConfig other = c;
  other.seed = 4;
  CHECK(checkpoint_bytes(train(g, other).checkpoint) != checkpoint_bytes(train(g, c).checkpoint));
}

TEST_CASE("checkpoint round trip and prediction") {
  TextGraph g = testing::seven_node_graph();
  TrainConfig c = quick(200);
  c.dropout = 0.0;
  c.learning_rate = 0.05;
  c.patience = 0;
  TrainResult r = train(g, c);
  std::string bytes = checkpoint_bytes(r.checkpoint);
  std::istringstream in(bytes);
  Checkpoint back = read_checkpoint(in);
  CHECK(checkpoint_bytes(back) == bytes);
  CHECK(back.config == c);
  CHECK(back.rng_algorithm == "mt19937_64");

  Prediction p = predict(back, g);
  Prediction direct = predict(r.checkpoint, g);
  CHECK(p.classes == direct.classes);
  CHECK(p.probs == direct.probs);
  for (std::size_t d = 0; d < g.n_docs; ++d) {
    double s = 0.0;
    for (double v : p.probs.row(d)) s += v;
    CHECK(std::abs(s - 1.0) <= 1e-9);
  }
  std::string truncated = bytes.substr(0, bytes.size() - 5);
  std::istringstream tin(truncated);
  CHECK_THROWS_AS(read_checkpoint(tin), Error);
}

TEST_CASE("prediction rejects a mismatched graph") {
  TextGraph g = testing::seven_node_graph();
  TrainResult r = train(g, quick(2));
  Corpus other = testing::make_corpus({"a b", "c d", "e f", "g"}, {"x", "y", "x", "y"},
                                      {Split::train, Split::train, Split::val, Split::test});
  TextGraph h = build_graph(other, build_vocabulary(other), 2);
  CHECK_THROWS_AS(predict(r.checkpoint, h), Error);
}

TEST_CASE("argmax breaks ties toward the lowest index") {
  CHECK(argmax(std::vector<double>{0.2, 0.2, 0.2, 0.2, 0.2}) == 0);
  CHECK(argmax(std::vector<double>{0.1, 0.45, 0.45}) == 1);
}

TEST_CASE("empty masks are rejected") {
  TextGraph g = testing::seven_node_graph();
  for (auto& s : g.splits) s = Split::train;
  CHECK_THROWS_AS(train(g, quick(1)), Error);
}

TEST_CASE("run log csv") {
  RunLog log;
  log.records.push_back({1, 0.5, 0.6, 0.75, 2.0});
  log.records.push_back({2, 0.4, 0.5, 1.0, 4.0});
  std::ostringstream os;
  log.write_csv(os);
  CHECK(os.str().rfind("epoch,train_loss,val_loss,val_acc,wall_ms\n1,0.5,", 0) == 0);
  CHECK(log.mean_epoch_ms() == 3.0);
}

TEST_CASE("dense external features") {
  TextGraph g = testing::seven_node_graph();
  Rng rng(1);
  TrainOptions o;
  o.features = testing::random_dense(g.n_nodes(), 3, rng);
  TrainResult r = train(g, quick(5), o);
  CHECK(r.checkpoint.model.input_dim == 3);
  CHECK(predict(r.checkpoint, g, o.features).classes.size() == g.n_docs);
  TrainOptions wrong;
  wrong.features = testing::random_dense(g.n_nodes() + 1, 3, rng);
  CHECK_THROWS_AS(train(g, quick(1), wrong), Error);
}
