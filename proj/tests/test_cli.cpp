#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "textgat/graph.hpp"
#include "textgat/train.hpp"

namespace fs = std::filesystem;
using namespace textgat;

namespace {

struct Result {
  int code;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const fs::path& p) {
  std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

class Sandbox {
 public:
  Sandbox() {
    dir_ = fs::temp_directory_path() / ("textgat_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Sandbox() { fs::remove_all(dir_); }
  fs::path operator/(const std::string& name) const { return dir_ / name; }

  Result run(const std::string& args) const {
    const fs::path out = dir_ / ".stdout", err = dir_ / ".stderr";
    std::string cmd = "cd '" + dir_.string() + "' && '" TEXTGAT_CLI_PATH "' " + args + " >'" + out.string() + "' 2>'" +
                      err.string() + "'";
    int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

 private:
  static inline int counter_ = 0;
  fs::path dir_;
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

const char* kFixture =
    R"({"id":"a","text":"ab cd","label":"p","split":"train"}
{"id":"b","text":"cd ef","label":"q","split":"train"}
{"id":"c","text":"ab gh","label":"p","split":"val"}
{"id":"d","text":"ef ij","label":"q","split":"test"}
)";

}  // namespace

TEST_CASE("ingest in char mode, word mode and with a stoplist") {
  Sandbox box;
  write_file(box / "raw.jsonl", kFixture);
  REQUIRE(box.run("ingest --input raw.jsonl --mode char --out c.jsonl").code == 0);
  CHECK(slurp(box / "c.jsonl").find(R"("tokens":["a","b","c","d"])") != std::string::npos);
  REQUIRE(box.run("ingest --input raw.jsonl --mode word --out w.jsonl").code == 0);
  CHECK(slurp(box / "w.jsonl").find(R"("tokens":["ab","cd"])") != std::string::npos);
  CHECK(fs::exists(box / "w.jsonl.stats.json"));
  CHECK(fs::exists(box / "w.jsonl.manifest.json"));
  write_file(box / "stop.txt", "cd\n");
  REQUIRE(box.run("ingest --input raw.jsonl --mode word --stoplist stop.txt --out s.jsonl").code == 0);
  CHECK(slurp(box / "s.jsonl").find(R"("tokens":["ab"])") != std::string::npos);
}

TEST_CASE("ingest failures exit nonzero with a message on stderr") {
  Sandbox box;
  write_file(box / "bad.jsonl", "{\"id\":\"a\",\"text\":\"x\",\"label\":\"p\",\"split\":\"nope\"}\n");
  Result r = box.run("ingest --input bad.jsonl --mode word --out o.jsonl");
  CHECK(r.code != 0);
  CHECK(r.err.find("line 1") != std::string::npos);
  CHECK(r.out.empty());
  CHECK(box.run("ingest --input missing.jsonl --mode word --out o.jsonl").code != 0);
  CHECK(box.run("ingest --input bad.jsonl --mode syllable --out o.jsonl").code != 0);
  write_file(box / "raw.jsonl", kFixture);
  write_file(box / "stop.txt", "ab\ncd\n");
  Result emptied = box.run("ingest --input raw.jsonl --mode word --stoplist stop.txt --out o.jsonl");
  CHECK(emptied.code != 0);
  CHECK(emptied.err.find(" a") != std::string::npos);
}

TEST_CASE("unwritable output is rejected before work starts") {
  Sandbox box;
  write_file(box / "raw.jsonl", kFixture);
  fs::create_directories(box / "ro");
  fs::permissions(box / "ro", fs::perms::owner_read | fs::perms::owner_exec);
  Result r = box.run("ingest --input raw.jsonl --mode word --out ro/sub/o.jsonl");
  fs::permissions(box / "ro", fs::perms::owner_all);
  if (::geteuid() != 0) CHECK(r.code != 0);
  write_file(box / "file", "x");
  CHECK(box.run("ingest --input raw.jsonl --mode word --out file/o.jsonl").code != 0);
}

TEST_CASE("build-graph summary and window size 1") {
  Sandbox box;
  write_file(box / "raw.jsonl", kFixture);
  Result r = box.run("build-graph --corpus raw.jsonl --window-size 2 --out g.bin");
  REQUIRE(r.code == 0);
  auto summary = nlohmann::json::parse(r.out);
  TextGraph g = load_graph((box / "g.bin").string());
  Corpus c = ingest((box / "raw.jsonl").string(), TokenMode::word);
  Vocabulary v = build_vocabulary(c);
  CHECK(summary["nodes"] == c.size() + v.size());
  CHECK(summary["W"] == count_windows(c, v, 2).total());
  CHECK(summary["edges"] == g.edge_count());

  REQUIRE(box.run("build-graph --corpus raw.jsonl --window-size 1 --out g1.bin").code == 0);
  TextGraph g1 = load_graph((box / "g1.bin").string());
  for (std::size_t i = g1.n_docs; i < g1.n_nodes(); ++i)
    for (std::size_t j : g1.adjacency.row_cols(i)) CHECK((j == i || j < g1.n_docs));
}

TEST_CASE("build-graph names an isolated document") {
  Sandbox box;
  write_file(box / "raw.jsonl", R"({"id":"one","text":"a b","label":"p","split":"train"}
{"id":"two","text":"a b","label":"p","split":"val"}
{"id":"three","text":"c d","label":"q","split":"test"}
)");
  Result r = box.run("build-graph --corpus raw.jsonl --window-size 2 --out g.bin");
  CHECK(r.code != 0);
  CHECK(r.err.find("'one'") != std::string::npos);
}

TEST_CASE("train, replay, evaluate and predict") {
  Sandbox box;
  REQUIRE(box.run("synth --classes 3 --docs-per-class 20 --vocab-per-class 10 --overlap 5 --out raw.jsonl").code == 0);
  REQUIRE(box.run("build-graph --corpus raw.jsonl --window-size 5 --out g.bin").code == 0);
  REQUIRE(box.run("train --graph g.bin --epochs 5 --heads 2 --hidden-units 4 --quiet --out-dir run").code == 0);
  CHECK(line_count(box / "run/runlog.csv") == 6);
  auto manifest = nlohmann::json::parse(slurp(box / "run/manifest.json"));
  CHECK(manifest["settings"]["config"]["learning_rate"] == "0.005");
  CHECK(manifest["settings"]["config"]["dropout"] == "0.5");
  const std::string ckpt = slurp(box / "run/checkpoint.bin");
  fs::rename(box / "run", box / "first");
  REQUIRE(box.run("replay --manifest first/manifest.json").code == 0);
  CHECK(slurp(box / "run/checkpoint.bin") == ckpt);

  write_file(box / "cfg.txt", "epochs = 3\nheads = 1\n");
  REQUIRE(box.run("train --graph g.bin --config cfg.txt --epochs 4 --quiet --out-dir run2").code == 0);
  CHECK(line_count(box / "run2/runlog.csv") == 5);
  CHECK(load_checkpoint((box / "run2/checkpoint.bin").string()).config.heads == 1);

  Result ev = box.run("evaluate --graph g.bin --checkpoint run/checkpoint.bin --out ev.json");
  REQUIRE(ev.code == 0);
  auto report = nlohmann::json::parse(slurp(box / "ev.json"));
  CHECK(report.contains("macro_f"));
  CHECK(slurp(box / "ev.csv").rfind("class,precision,recall,f_score", 0) == 0);

  REQUIRE(box.run("evaluate --graph g.bin --checkpoint run/checkpoint.bin --repeats 3 --baseline gcn --out rep.json").code == 0);
  auto rep = nlohmann::json::parse(slurp(box / "rep.json"));
  CHECK(rep["repeated"]["accuracy"].contains("mean"));
  CHECK(rep["repeated"]["accuracy"].contains("std"));
  CHECK(rep["repeated"]["accuracy"].contains("p_value"));
  CHECK(slurp(box / "rep.csv").rfind("metric,mean,std,baseline_mean,baseline_std,t,p_value", 0) == 0);

  REQUIRE(box.run("predict --graph g.bin --checkpoint run/checkpoint.bin --out p.csv").code == 0);
  CHECK(line_count(box / "p.csv") == 61);

  CHECK(box.run("train --graph g.bin --epochs zero --out-dir bad").code != 0);
  CHECK(box.run("train --graph g.bin --dropout 1.0 --out-dir bad").code != 0);
  CHECK(box.run("evaluate --graph g.bin --checkpoint missing.bin --out e.json").code != 0);
}

TEST_CASE("ablation outputs") {
  Sandbox box;
  REQUIRE(box.run("synth --classes 3 --docs-per-class 10 --vocab-per-class 8 --overlap 4 --out raw.jsonl").code == 0);
  REQUIRE(box.run("build-graph --corpus raw.jsonl --window-size 5 --out g.bin").code == 0);
  REQUIRE(box.run("ablate --kind heads --graph g.bin --epochs 2 --hidden-units 2 --out heads.csv").code == 0);
  CHECK(line_count(box / "heads.csv") == 5);
  CHECK(line_count(box / "heads.loss.csv") == 1 + 4 * 2);
  REQUIRE(box.run("ablate --kind labels --graph g.bin --fractions 0.5,1.0 --epochs 2 --out labels.csv").code == 0);
  CHECK(line_count(box / "labels.csv") == 3);
  REQUIRE(box.run("ablate --kind tokenization --input raw.jsonl --epochs 2 --out tok.csv").code == 0);
  CHECK(line_count(box / "tok.csv") == 3);
  CHECK(box.run("ablate --kind heads --out x.csv").code != 0);
  CHECK(box.run("ablate --kind labels --graph g.bin --fractions 0.5,abc --out x.csv").code != 0);
}

TEST_CASE("synth is deterministic and sized") {
  Sandbox box;
  REQUIRE(box.run("synth --out a.jsonl").code == 0);
  REQUIRE(box.run("synth --out b.jsonl").code == 0);
  CHECK(line_count(box / "a.jsonl") == 1000);
  CHECK(slurp(box / "a.jsonl") == slurp(box / "b.jsonl"));
  CHECK(box.run("synth --classes 1 --out c.jsonl").code != 0);
}

TEST_CASE("usage errors") {
  Sandbox box;
  CHECK(box.run("").code != 0);
  CHECK(box.run("frobnicate").code != 0);
  CHECK(box.run("train --graph g.bin").code != 0);
  CHECK(box.run("--help").code == 0);
}
