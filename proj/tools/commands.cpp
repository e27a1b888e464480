#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "textgat/error.hpp"
#include "textgat/eval.hpp"
#include "textgat/graph.hpp"
#include "textgat/numcore/kernels.hpp"
#include "textgat/synth.hpp"
#include "textgat/train.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace textgat::cli {
namespace {

constexpr const char* kVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Output helpers

void ensure_parent(const std::string& path) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

// Fails before any work starts when `path` cannot be created or written.
void check_writable(const std::string& path) {
  ensure_parent(path);
  bool existed = fs::exists(path);
  {
    std::ofstream probe(path, std::ios::app | std::ios::binary);
    if (!probe) throw Error("output path is not writable: " + path);
  }
  if (!existed) fs::remove(path);
}

void check_writable_dir(const std::string& dir) {
  fs::create_directories(dir);
  check_writable((fs::path(dir) / ".write_probe").string());
}

void write_text(const std::string& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("failed writing " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

// Path with its extension replaced (or appended).
std::string sibling(const std::string& path, const std::string& ext) {
  fs::path p(path);
  p.replace_extension(ext);
  return p.string();
}

void write_manifest(const std::string& path, const std::string& command, const std::vector<std::string>& argv,
                    const ojson& settings) {
  ojson m;
  m["tool"] = "textgat";
  m["version"] = kVersion;
  m["command"] = command;
  m["argv"] = std::vector<std::string>(argv.begin() + 1, argv.end());
  m["settings"] = settings;
  write_text(path, m.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Training configuration flags: every TrainConfig key is accepted as
// --key-with-hyphens and overrides the config file.

struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags, const std::string& skip = "") {
  cmd->add_option("--config", flags.config_path, "key = value training configuration file");
  for (const auto& key : config_keys()) {
    if (key == skip) continue;
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    cmd->add_option_function<std::string>(
        "--" + flag, [&flags, key](const std::string& v) { flags.overrides[key] = v; },
        "override config key '" + key + "'");
  }
}

TrainConfig resolve_config(const ConfigFlags& flags, std::optional<TrainConfig> base = std::nullopt) {
  TrainConfig c = base ? *base : TrainConfig{};
  if (!flags.config_path.empty()) c = load_config(flags.config_path, c);
  for (const auto& [k, v] : flags.overrides) apply_setting(c, k, v);
  c.validate();
  return c;
}

ojson config_json(const TrainConfig& c) {
  ojson j;
  std::istringstream text(config_to_text(c));
  std::string line;
  while (std::getline(text, line)) {
    auto eq = line.find(" = ");
    j[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return j;
}

std::optional<DenseMatrix> maybe_features(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_features(path);
}

template <class T>
std::vector<T> parse_list(const std::string& csv, const char* what) {
  std::vector<T> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v;
    if (!(is >> v) || !is.eof()) throw Error(std::string("cannot parse ") + what + " list entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Error(std::string("empty ") + what + " list");
  return out;
}

Corpus prepare_corpus(const std::string& input, TokenMode mode, const std::string& stoplist, bool keep_special,
                      double val_fraction, std::uint64_t seed) {
  Corpus c = ingest(input, mode);
  if (c.documents.empty()) throw Error("corpus '" + input + "' has no documents");
  if (!keep_special) c = strip_special_tokens(c);
  if (!stoplist.empty()) c = remove_stopwords(c, load_stoplist(stoplist));
  return ensure_validation_split(c, val_fraction, seed);
}

// ---------------------------------------------------------------------------
// Subcommands

struct SynthArgs {
  SynthOptions opts;
  std::string out;
};

int cmd_synth(const SynthArgs& a, const std::vector<std::string>& argv) {
  check_writable(a.out);
  write_text(a.out, synth_corpus_jsonl(a.opts));
  ojson s;
  s["classes"] = a.opts.classes;
  s["docs_per_class"] = a.opts.docs_per_class;
  s["vocab_per_class"] = a.opts.vocab_per_class;
  s["overlap"] = a.opts.overlap;
  s["overlap_rate"] = a.opts.overlap_rate;
  s["min_len"] = a.opts.min_len;
  s["max_len"] = a.opts.max_len;
  s["seed"] = a.opts.seed;
  write_manifest(a.out + ".manifest.json", "synth", argv, s);
  ojson summary;
  summary["documents"] = a.opts.classes * a.opts.docs_per_class;
  summary["out"] = a.out;
  std::cout << summary.dump() << "\n";
  return 0;
}

struct IngestArgs {
  std::string input, mode, stoplist, out;
  double val_fraction = 0.1;
  std::uint64_t seed = 0;
  bool keep_special = false;
};

int cmd_ingest(const IngestArgs& a, const std::vector<std::string>& argv) {
  const std::string stats_path = a.out + ".stats.json";
  check_writable(a.out);
  check_writable(stats_path);
  Corpus c = prepare_corpus(a.input, parse_token_mode(a.mode), a.stoplist, a.keep_special, a.val_fraction, a.seed);
  std::ostringstream os;
  write_corpus(c, os);
  write_text(a.out, os.str());
  std::string stats = stats_to_json(corpus_stats(c));
  write_text(stats_path, stats + "\n");

  ojson s;
  s["input"] = a.input;
  s["mode"] = a.mode;
  s["stoplist"] = a.stoplist;
  s["val_fraction"] = a.val_fraction;
  s["seed"] = a.seed;
  s["keep_special"] = a.keep_special;
  s["vocab_size"] = build_vocabulary(c).size();
  write_manifest(a.out + ".manifest.json", "ingest", argv, s);
  std::cout << stats << "\n";
  return 0;
}

struct BuildGraphArgs {
  std::string corpus, mode = "word", out;
  std::size_t window_size = 25;
};

int cmd_build_graph(const BuildGraphArgs& a, const std::vector<std::string>& argv) {
  check_writable(a.out);
  Corpus c = ingest(a.corpus, parse_token_mode(a.mode));
  Vocabulary vocab = build_vocabulary(c);
  TextGraph g = build_graph(c, vocab, a.window_size);
  save_graph(g, a.out);

  ojson summary;
  summary["nodes"] = g.n_nodes();
  summary["documents"] = g.n_docs;
  summary["terms"] = g.n_terms;
  summary["edges"] = g.edge_count();
  summary["W"] = g.total_windows;
  summary["window_size"] = g.window_size;
  summary["classes"] = g.class_names;
  ojson s;
  s["corpus"] = a.corpus;
  s["mode"] = a.mode;
  s["window_size"] = a.window_size;
  s["graph_hash"] = fnv1a_hex(read_text(a.out));
  write_manifest(a.out + ".manifest.json", "build-graph", argv, s);
  std::cout << summary.dump() << "\n";
  return 0;
}

struct TrainArgs {
  std::string graph, features, out_dir;
  ConfigFlags flags;
  bool quiet = false;
};

int cmd_train(const TrainArgs& a, const std::vector<std::string>& argv) {
  check_writable_dir(a.out_dir);
  const fs::path dir(a.out_dir);
  TrainConfig config = resolve_config(a.flags);
  TextGraph g = load_graph(a.graph);
  TrainOptions opts;
  opts.features = maybe_features(a.features);
  if (!a.quiet) {
    opts.on_epoch = [](const EpochRecord& r) {
      if (r.epoch % 50 == 0 || r.epoch == 1)
        std::cerr << "epoch " << r.epoch << " train_loss " << r.train_loss << " val_loss " << r.val_loss << " val_acc "
                  << r.val_accuracy << "\n";
    };
  }
  TrainResult res = train(g, config, opts);

  const std::string ckpt_path = (dir / "checkpoint.bin").string();
  save_checkpoint(res.checkpoint, ckpt_path);
  std::ostringstream log;
  res.log.write_csv(log);
  write_text((dir / "runlog.csv").string(), log.str());
  write_text((dir / "config.txt").string(), config_to_text(config));

  ojson s;
  s["graph"] = a.graph;
  s["features"] = a.features;
  s["config"] = config_json(config);
  s["simd"] = std::string(simd::isa_name(simd::active().isa));
  s["checkpoint_hash"] = fnv1a_hex(read_text(ckpt_path));
  write_manifest((dir / "manifest.json").string(), "train", argv, s);

  ojson summary;
  summary["epochs_run"] = res.log.records.size();
  summary["best_epoch"] = res.checkpoint.epoch;
  summary["best_val_loss"] = res.best_val_loss;
  summary["early_stopped"] = res.early_stopped;
  summary["checkpoint"] = ckpt_path;
  summary["checkpoint_hash"] = s["checkpoint_hash"];
  std::cout << summary.dump() << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string graph, checkpoint, split = "test", out, features, baseline;
  std::size_t repeats = 1;
  std::size_t jobs = 1;
};

int cmd_evaluate(const EvaluateArgs& a, const std::vector<std::string>& argv) {
  const std::string csv_path = sibling(a.out, ".csv");
  check_writable(a.out);
  check_writable(csv_path);
  if (a.repeats == 0) throw Error("--repeats must be at least 1");
  const Split split = parse_split(a.split);
  TextGraph g = load_graph(a.graph);
  Checkpoint ck = load_checkpoint(a.checkpoint);
  auto features = maybe_features(a.features);

  ConfusionMatrix cm;
  MetricsReport report = evaluate_split(g, predict(ck, g, features), split, &cm);
  std::string json_text;
  std::ostringstream csv;

  if (a.repeats == 1 && a.baseline.empty()) {
    json_text = report_to_json(report, cm, g.class_names);
    report_to_csv(report, g.class_names, csv);
  } else {
    if (features) throw Error("--repeats/--baseline retrain from scratch and support identity features only");
    auto runs = repeated_runs(g, ck.config, a.repeats, split, a.jobs);
    std::vector<MetricsReport> base_runs;
    if (!a.baseline.empty()) {
      TrainConfig bc = ck.config;
      bc.architecture = parse_architecture(a.baseline);
      base_runs = repeated_runs(g, bc, a.repeats, split, a.jobs);
    }
    using Getter = double (*)(const MetricsReport&);
    const std::pair<const char*, Getter> fields[] = {
        {"accuracy", [](const MetricsReport& r) { return r.accuracy; }},
        {"macro_precision", [](const MetricsReport& r) { return r.macro_precision; }},
        {"macro_recall", [](const MetricsReport& r) { return r.macro_recall; }},
        {"macro_f", [](const MetricsReport& r) { return r.macro_f; }},
    };
    ojson j = ojson::parse(report_to_json(report, cm, g.class_names));
    ojson rep;
    rep["repeats"] = a.repeats;
    rep["seeds_from"] = ck.config.seed;
    csv.precision(17);
    csv << "metric,mean,std";
    if (!base_runs.empty()) csv << ",baseline_mean,baseline_std,t,p_value";
    csv << "\n";
    for (const auto& [name, get] : fields) {
      std::vector<double> v, b;
      for (const auto& r : runs) v.push_back(get(r));
      for (const auto& r : base_runs) b.push_back(get(r));
      Summary s = summarize(v);
      ojson e;
      e["mean"] = s.mean;
      e["std"] = s.std;
      csv << name << ',' << s.mean << ',' << s.std;
      if (!b.empty()) {
        Summary sb = summarize(b);
        e["baseline"] = a.baseline;
        e["baseline_mean"] = sb.mean;
        e["baseline_std"] = sb.std;
        csv << ',' << sb.mean << ',' << sb.std;
        if (a.repeats >= 2) {
          TTest t = welch_t_test(v, b);
          e["t"] = t.t;
          e["p_value"] = t.p_value;
          csv << ',' << t.t << ',' << t.p_value;
        } else {
          csv << ",,";
        }
      }
      csv << "\n";
      rep[name] = e;
    }
    j["repeated"] = rep;
    json_text = j.dump(2);
  }

  write_text(a.out, json_text + "\n");
  write_text(csv_path, csv.str());
  ojson s;
  s["graph"] = a.graph;
  s["checkpoint"] = a.checkpoint;
  s["split"] = a.split;
  s["repeats"] = a.repeats;
  s["baseline"] = a.baseline;
  write_manifest(a.out + ".manifest.json", "evaluate", argv, s);
  std::cout << json_text << "\n";
  return 0;
}

struct PredictArgs {
  std::string graph, checkpoint, out, features;
};

int cmd_predict(const PredictArgs& a, const std::vector<std::string>& argv) {
  check_writable(a.out);
  TextGraph g = load_graph(a.graph);
  Checkpoint ck = load_checkpoint(a.checkpoint);
  Prediction p = predict(ck, g, maybe_features(a.features));
  std::ostringstream os;
  os.precision(17);
  os << "doc_id,split,label,predicted";
  for (const auto& c : g.class_names) os << ",p_" << c;
  os << "\n";
  for (std::size_t d = 0; d < g.n_docs; ++d) {
    os << g.doc_ids[d] << ',' << to_string(g.splits[d]) << ',' << g.class_names[g.labels[d]] << ','
       << g.class_names[p.classes[d]];
    for (double v : p.probs.row(d)) os << ',' << v;
    os << "\n";
  }
  write_text(a.out, os.str());
  ojson s;
  s["graph"] = a.graph;
  s["checkpoint"] = a.checkpoint;
  write_manifest(a.out + ".manifest.json", "predict", argv, s);
  return 0;
}

struct AblateArgs {
  std::string graph, kind, out, heads = "1,4,8,12", fractions = "0.2,0.4,0.6,0.8,1.0";
  std::string input, stoplist;
  bool keep_special = false;
  double val_fraction = 0.1;
  std::size_t jobs = 1;
  ConfigFlags flags;
};

int cmd_ablate(const AblateArgs& a, const std::vector<std::string>& argv) {
  check_writable(a.out);
  TrainConfig config = resolve_config(a.flags);
  ojson s;
  s["kind"] = a.kind;
  s["config"] = config_json(config);
  s["jobs"] = a.jobs;
  std::ostringstream csv;

  if (a.kind == "heads") {
    if (a.graph.empty()) throw Error("--graph is required for --kind heads");
    const std::string curves_path = sibling(a.out, ".loss.csv");
    check_writable(curves_path);
    auto counts = parse_list<std::size_t>(a.heads, "head count");
    auto rows = ablate_heads(load_graph(a.graph), config, counts, a.jobs);
    write_heads_csv(rows, csv);
    std::ostringstream curves;
    write_loss_curves_csv(rows, curves);
    write_text(curves_path, curves.str());
    s["graph"] = a.graph;
    s["heads"] = a.heads;
  } else if (a.kind == "labels") {
    if (a.graph.empty()) throw Error("--graph is required for --kind labels");
    auto fractions = parse_list<double>(a.fractions, "fraction");
    auto rows = ablate_label_fraction(load_graph(a.graph), config, fractions, a.jobs);
    write_label_fraction_csv(rows, csv);
    s["graph"] = a.graph;
    s["fractions"] = a.fractions;
  } else if (a.kind == "tokenization") {
    if (a.input.empty()) throw Error("--input (raw corpus) is required for --kind tokenization");
    Corpus c = prepare_corpus(a.input, TokenMode::character, a.stoplist, a.keep_special, a.val_fraction, config.seed);
    Corpus w = prepare_corpus(a.input, TokenMode::word, a.stoplist, a.keep_special, a.val_fraction, config.seed);
    auto rows = compare_tokenization(c, w, config, a.jobs);
    write_tokenization_csv(rows, csv);
    s["input"] = a.input;
    s["stoplist"] = a.stoplist;
  } else {
    throw Error("unknown ablation kind '" + a.kind + "' (expected heads, labels or tokenization)");
  }
  write_text(a.out, csv.str());
  write_manifest(a.out + ".manifest.json", "ablate", argv, s);
  std::cout << csv.str();
  return 0;
}

int cmd_replay(const std::string& manifest_path) {
  ojson m = ojson::parse(read_text(manifest_path));
  if (!m.contains("argv") || !m["argv"].is_array()) throw Error("manifest has no argv array: " + manifest_path);
  std::vector<std::string> argv{"textgat"};
  for (const auto& a : m["argv"]) argv.push_back(a.get<std::string>());
  if (argv.size() > 1 && argv[1] == "replay") throw Error("refusing to replay a replay manifest");
  return run(argv);
}

}  // namespace

int run(const std::vector<std::string>& argv) {
  CLI::App app{"Heterogeneous text-graph construction and graph-attention document classification"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic labeled corpus");
  c_synth->add_option("--classes", synth.opts.classes, "number of classes")->capture_default_str();
  c_synth->add_option("--docs-per-class", synth.opts.docs_per_class)->capture_default_str();
  c_synth->add_option("--vocab-per-class", synth.opts.vocab_per_class)->capture_default_str();
  c_synth->add_option("--overlap", synth.opts.overlap, "size of the shared word pool")->capture_default_str();
  c_synth->add_option("--overlap-rate", synth.opts.overlap_rate, "probability of drawing a shared word")->capture_default_str();
  c_synth->add_option("--min-len", synth.opts.min_len)->capture_default_str();
  c_synth->add_option("--max-len", synth.opts.max_len)->capture_default_str();
  c_synth->add_option("--seed", synth.opts.seed)->capture_default_str();
  c_synth->add_option("--out", synth.out, "output corpus file")->required();

  IngestArgs ing;
  auto* c_ingest = app.add_subcommand("ingest", "Tokenize and preprocess a raw corpus");
  c_ingest->add_option("--input", ing.input, "JSON-lines corpus")->required();
  c_ingest->add_option("--mode", ing.mode, "char or word")->required()->check(CLI::IsMember({"char", "word"}));
  c_ingest->add_option("--stoplist", ing.stoplist, "stopword file, one term per line");
  c_ingest->add_option("--val-fraction", ing.val_fraction, "share of train moved to val when no val rows exist")->capture_default_str();
  c_ingest->add_option("--seed", ing.seed, "seed for the validation draw")->capture_default_str();
  c_ingest->add_flag("--keep-special", ing.keep_special, "keep tokens without letters, digits or ideographs");
  c_ingest->add_option("--out", ing.out, "canonical corpus output")->required();

  BuildGraphArgs bg;
  auto* c_build = app.add_subcommand("build-graph", "Build the document/term graph");
  c_build->add_option("--corpus", bg.corpus, "corpus file (canonical or raw)")->required();
  c_build->add_option("--mode", bg.mode, "tokenization for lines without tokens")->check(CLI::IsMember({"char", "word"}))->capture_default_str();
  c_build->add_option("--window-size", bg.window_size, "sliding window length in tokens")->capture_default_str();
  c_build->add_option("--out", bg.out, "graph output file")->required();

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Train a model on a graph");
  c_train->add_option("--graph", tr.graph)->required();
  c_train->add_option("--features", tr.features, "dense node features, one row per node");
  c_train->add_option("--out-dir", tr.out_dir)->required();
  c_train->add_flag("--quiet", tr.quiet, "no per-epoch progress on stderr");
  add_config_flags(c_train, tr.flags);

  EvaluateArgs ev;
  auto* c_eval = app.add_subcommand("evaluate", "Compute metrics for a checkpoint");
  c_eval->add_option("--graph", ev.graph)->required();
  c_eval->add_option("--checkpoint", ev.checkpoint)->required();
  c_eval->add_option("--split", ev.split)->check(CLI::IsMember({"train", "val", "test"}))->capture_default_str();
  c_eval->add_option("--repeats", ev.repeats, "retrain with seeds seed..seed+R-1 and report mean and std")->capture_default_str();
  c_eval->add_option("--baseline", ev.baseline, "architecture to compare against (gat or gcn)")->check(CLI::IsMember({"gat", "gcn"}));
  c_eval->add_option("--jobs", ev.jobs, "parallel runs")->capture_default_str();
  c_eval->add_option("--features", ev.features);
  c_eval->add_option("--out", ev.out, "JSON report (CSV written alongside)")->required();

  PredictArgs pr;
  auto* c_pred = app.add_subcommand("predict", "Predict document classes");
  c_pred->add_option("--graph", pr.graph)->required();
  c_pred->add_option("--checkpoint", pr.checkpoint)->required();
  c_pred->add_option("--features", pr.features);
  c_pred->add_option("--out", pr.out, "CSV output")->required();

  AblateArgs ab;
  auto* c_ablate = app.add_subcommand("ablate", "Run an ablation harness");
  c_ablate->add_option("--kind", ab.kind)->required()->check(CLI::IsMember({"heads", "labels", "tokenization"}));
  c_ablate->add_option("--graph", ab.graph);
  c_ablate->add_option("--heads", ab.heads)->capture_default_str();
  c_ablate->add_option("--fractions", ab.fractions)->capture_default_str();
  c_ablate->add_option("--input", ab.input, "raw corpus for --kind tokenization");
  c_ablate->add_option("--stoplist", ab.stoplist);
  c_ablate->add_flag("--keep-special", ab.keep_special);
  c_ablate->add_option("--val-fraction", ab.val_fraction)->capture_default_str();
  c_ablate->add_option("--jobs", ab.jobs, "parallel runs (distorts per-epoch timings)")->capture_default_str();
  c_ablate->add_option("--out", ab.out, "CSV output")->required();
  // --heads is the swept list here, not a config override.
  add_config_flags(c_ablate, ab.flags, "heads");

  std::string manifest;
  auto* c_replay = app.add_subcommand("replay", "Re-run the invocation recorded in a manifest");
  c_replay->add_option("--manifest", manifest)->required();

  std::vector<const char*> raw;
  for (const auto& a : argv) raw.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (c_synth->parsed()) return cmd_synth(synth, argv);
    if (c_ingest->parsed()) return cmd_ingest(ing, argv);
    if (c_build->parsed()) return cmd_build_graph(bg, argv);
    if (c_train->parsed()) return cmd_train(tr, argv);
    if (c_eval->parsed()) return cmd_evaluate(ev, argv);
    if (c_pred->parsed()) return cmd_predict(pr, argv);
    if (c_ablate->parsed()) return cmd_ablate(ab, argv);
    if (c_replay->parsed()) return cmd_replay(manifest);
  } catch (const std::exception& e) {
    std::cerr << "textgat: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace textgat::cli
