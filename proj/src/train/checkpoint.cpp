#include <fstream>
#include <sstream>

#include "textgat/binary_io.hpp"
#include "textgat/error.hpp"
#include "textgat/numcore/rng.hpp"
#include "textgat/train.hpp"

namespace textgat {

namespace {
constexpr std::string_view kMagic{"TXTGATCK", 8};
}

// Layout (little-endian):
//   magic[8] "TXTGATCK", u32 format_version,
//   str config (key = value text), u64 input_dim, u64 classes,
//   str rng_algorithm, u64 seed, u64 epoch,
//   u64 n_tensors, then per tensor: str name, u64 rows, u64 cols, f64 values[rows * cols]
void write_checkpoint(const Checkpoint& ck, std::ostream& out) {
  binary::Writer w(out);
  w.bytes(kMagic);
  w.u32(kCheckpointFormatVersion);
  w.str(config_to_text(ck.config));
  w.u64(ck.model.input_dim);
  w.u64(ck.model.classes);
  w.str(ck.rng_algorithm);
  w.u64(ck.seed);
  w.u64(ck.epoch);
  auto tensors = ck.params.tensors();
  auto names = ck.params.tensor_names();
  w.u64(tensors.size());
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    w.str(names[i]);
    w.u64(tensors[i]->rows());
    w.u64(tensors[i]->cols());
    for (double v : tensors[i]->values()) w.f64(v);
  }
  if (!out) throw Error("failed writing checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  binary::Reader r(in, "checkpoint");
  if (r.bytes(kMagic.size()) != kMagic) r.fail("bad magic (not a checkpoint)");
  std::uint32_t version = r.u32();
  if (version != kCheckpointFormatVersion) r.fail("unsupported format version " + std::to_string(version));

  Checkpoint ck;
  std::istringstream cfg(r.str());
  ck.config = parse_config(cfg);
  std::size_t input_dim = r.u64();
  std::size_t classes = r.u64();
  ck.model = model_config(ck.config, input_dim, classes);
  ck.rng_algorithm = r.str(256);
  if (ck.rng_algorithm != Rng::kAlgorithm) r.fail("unknown rng algorithm '" + ck.rng_algorithm + "'");
  ck.seed = r.u64();
  ck.epoch = r.u64();

  ck.params = make_params(ck.model);
  auto tensors = ck.params.tensors();
  auto names = ck.params.tensor_names();
  if (r.u64() != tensors.size()) r.fail("tensor count does not match the configuration");
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    if (r.str(256) != names[i]) r.fail("unexpected tensor name at position " + std::to_string(i));
    std::uint64_t rows = r.u64(), cols = r.u64();
    if (rows != tensors[i]->rows() || cols != tensors[i]->cols()) r.fail("tensor " + names[i] + " has the wrong shape");
    for (double& v : tensors[i]->values()) v = r.f64();
  }
  return ck;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint '" + path + "'");
  write_checkpoint(ckpt, out);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint '" + path + "'");
  return read_checkpoint(in);
}

}  // namespace textgat
