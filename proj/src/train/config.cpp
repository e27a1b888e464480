#include <charconv>
#include <fstream>
#include <sstream>

#include "textgat/error.hpp"
#include "textgat/train.hpp"

namespace textgat {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw Error("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error("config: '" + key + "' expects true or false, got '" + v + "'");
}

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs == 0) throw Error("config: epochs must be positive");
  if (!(learning_rate > 0.0)) throw Error("config: learning_rate must be positive");
  if (hidden_units == 0 || heads == 0 || output_heads == 0) throw Error("config: hidden_units and head counts must be positive");
  if (dropout < 0.0 || dropout >= 1.0) throw Error("config: dropout must be in [0, 1)");
  if (leaky_alpha < 0.0) throw Error("config: leaky_alpha must be non-negative");
  if (l2 < 0.0) throw Error("config: l2 must be non-negative");
  if (window_size == 0) throw Error("config: window_size must be positive");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) throw Error("config: Adam betas must be in [0, 1)");
  if (!(adam_epsilon > 0.0)) throw Error("config: adam_epsilon must be positive");
}

void apply_setting(TrainConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "epochs") c.epochs = to_size(key, v);
  else if (key == "learning_rate") c.learning_rate = to_double(key, v);
  else if (key == "hidden_units") c.hidden_units = to_size(key, v);
  else if (key == "heads") c.heads = to_size(key, v);
  else if (key == "dropout") c.dropout = to_double(key, v);
  else if (key == "leaky_alpha") c.leaky_alpha = to_double(key, v);
  else if (key == "l2") c.l2 = to_double(key, v);
  else if (key == "window_size") c.window_size = to_size(key, v);
  else if (key == "seed") c.seed = to_size(key, v);
  else if (key == "patience") c.patience = to_size(key, v);
  else if (key == "architecture") c.architecture = parse_architecture(v);
  else if (key == "output_heads") c.output_heads = to_size(key, v);
  else if (key == "attention_dropout") c.attention_dropout = to_bool(key, v);
  else if (key == "l2_scope") c.l2_scope = parse_l2_scope(v);
  else if (key == "edge_weighting") c.edge_weighting = parse_edge_weighting(v);
  else if (key == "beta1") c.beta1 = to_double(key, v);
  else if (key == "beta2") c.beta2 = to_double(key, v);
  else if (key == "adam_epsilon") c.adam_epsilon = to_double(key, v);
  else throw Error("config: unknown key '" + key + "'");
}

std::vector<std::string> config_keys() {
  return {"epochs", "learning_rate", "hidden_units", "heads", "dropout", "leaky_alpha", "l2", "window_size", "seed",
          "patience", "architecture", "output_heads", "attention_dropout", "l2_scope", "edge_weighting", "beta1",
          "beta2", "adam_epsilon"};
}

TrainConfig parse_config(std::istream& in, TrainConfig base) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    try {
      apply_setting(base, key, value);
    } catch (const Error& e) {
      throw Error("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  base.validate();
  return base;
}

TrainConfig load_config(const std::string& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  return parse_config(in, std::move(base));
}

std::string config_to_text(const TrainConfig& c) {
  std::ostringstream os;
  os << "epochs = " << c.epochs << "\n"
     << "learning_rate = " << fmt(c.learning_rate) << "\n"
     << "hidden_units = " << c.hidden_units << "\n"
     << "heads = " << c.heads << "\n"
     << "dropout = " << fmt(c.dropout) << "\n"
     << "leaky_alpha = " << fmt(c.leaky_alpha) << "\n"
     << "l2 = " << fmt(c.l2) << "\n"
     << "window_size = " << c.window_size << "\n"
     << "seed = " << c.seed << "\n"
     << "patience = " << c.patience << "\n"
     << "architecture = " << to_string(c.architecture) << "\n"
     << "output_heads = " << c.output_heads << "\n"
     << "attention_dropout = " << (c.attention_dropout ? "true" : "false") << "\n"
     << "l2_scope = " << to_string(c.l2_scope) << "\n"
     << "edge_weighting = " << to_string(c.edge_weighting) << "\n"
     << "beta1 = " << fmt(c.beta1) << "\n"
     << "beta2 = " << fmt(c.beta2) << "\n"
     << "adam_epsilon = " << fmt(c.adam_epsilon) << "\n";
  return os.str();
}

ModelConfig model_config(const TrainConfig& c, std::size_t input_dim, std::size_t classes) {
  ModelConfig m;
  m.architecture = c.architecture;
  m.input_dim = input_dim;
  m.hidden_units = c.hidden_units;
  m.heads = c.heads;
  m.output_heads = c.output_heads;
  m.classes = classes;
  m.dropout = c.dropout;
  m.attention_dropout = c.attention_dropout;
  m.leaky_alpha = c.leaky_alpha;
  m.l2 = c.l2;
  m.l2_scope = c.l2_scope;
  m.edge_weighting = c.edge_weighting;
  return m;
}

}  // namespace textgat
