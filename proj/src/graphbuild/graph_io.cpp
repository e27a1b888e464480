#include <fstream>

#include "textgat/binary_io.hpp"
#include "textgat/graph.hpp"

namespace textgat {

namespace {
constexpr std::string_view kMagic{"TXTGRAPH", 8};
constexpr std::uint64_t kMaxCount = std::uint64_t{1} << 40;
}  // namespace

// Layout (little-endian):
//   magic[8] "TXTGRAPH", u32 format_version,
//   u64 n_docs, u64 n_terms, u64 window_size, u64 total_windows,
//   u64 n_classes, str class_name[n_classes],
//   u64 n_entries, (u64 row, u64 col, f64 weight)[n_entries]   upper triangle + diagonal, row-major, ties by column
//   u64 label[n_docs],
//   u8 train_mask[n_docs], u8 val_mask[n_docs], u8 test_mask[n_docs],
//   str doc_id[n_docs], str term[n_terms]
// where str = u64 length + bytes.
void write_graph(const TextGraph& g, std::ostream& out) {
  binary::Writer w(out);
  w.bytes(kMagic);
  w.u32(kGraphFormatVersion);
  w.u64(g.n_docs);
  w.u64(g.n_terms);
  w.u64(g.window_size);
  w.u64(g.total_windows);
  w.u64(g.class_names.size());
  for (const auto& c : g.class_names) w.str(c);

  std::uint64_t upper = 0;
  for (std::size_t r = 0; r < g.adjacency.rows(); ++r)
    for (std::size_t c : g.adjacency.row_cols(r))
      if (c >= r) ++upper;
  w.u64(upper);
  for (std::size_t r = 0; r < g.adjacency.rows(); ++r) {
    auto cols = g.adjacency.row_cols(r);
    auto vals = g.adjacency.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k] < r) continue;
      w.u64(r);
      w.u64(cols[k]);
      w.f64(vals[k]);
    }
  }
  for (std::size_t l : g.labels) w.u64(l);
  for (Split s : {Split::train, Split::val, Split::test})
    for (Split d : g.splits) w.u8(d == s ? 1 : 0);
  for (const auto& id : g.doc_ids) w.str(id);
  for (const auto& t : g.terms) w.str(t);
  if (!out) throw Error("failed writing graph");
}

TextGraph read_graph(std::istream& in) {
  binary::Reader r(in, "graph file");
  if (r.bytes(kMagic.size()) != kMagic) r.fail("bad magic (not a graph file)");
  std::uint32_t version = r.u32();
  if (version != kGraphFormatVersion) r.fail("unsupported format version " + std::to_string(version));

  TextGraph g;
  g.n_docs = r.count(kMaxCount, "n_docs");
  g.n_terms = r.count(kMaxCount, "n_terms");
  g.window_size = r.u64();
  g.total_windows = r.u64();
  const std::size_t n = g.n_nodes();
  std::uint64_t n_classes = r.count(1u << 20, "n_classes");
  for (std::uint64_t c = 0; c < n_classes; ++c) g.class_names.push_back(r.str());

  std::uint64_t n_entries = r.count(kMaxCount, "n_entries");
  std::vector<Triplet> entries;
  entries.reserve(2 * n_entries);
  std::size_t prev_r = 0, prev_c = 0;
  for (std::uint64_t e = 0; e < n_entries; ++e) {
    std::size_t row = r.u64();
    std::size_t col = r.u64();
    double v = r.f64();
    if (row >= n || col >= n || col < row) r.fail("entry outside the upper triangle");
    if (e > 0 && (row < prev_r || (row == prev_r && col <= prev_c))) r.fail("entries not in canonical order");
    prev_r = row;
    prev_c = col;
    entries.push_back({row, col, v});
    if (col != row) entries.push_back({col, row, v});
  }
  g.adjacency = SparseMatrix::from_triplets(n, n, std::move(entries));

  for (std::size_t d = 0; d < g.n_docs; ++d) {
    std::uint64_t l = r.u64();
    if (l >= n_classes) r.fail("label out of range");
    g.labels.push_back(l);
  }
  std::vector<std::uint8_t> masks[3];
  for (auto& m : masks)
    for (std::size_t d = 0; d < g.n_docs; ++d) m.push_back(r.u8());
  for (std::size_t d = 0; d < g.n_docs; ++d) {
    int set = masks[0][d] + masks[1][d] + masks[2][d];
    if (set != 1) r.fail("masks must be disjoint and cover every document");
    g.splits.push_back(masks[0][d] ? Split::train : (masks[1][d] ? Split::val : Split::test));
  }
  for (std::size_t d = 0; d < g.n_docs; ++d) g.doc_ids.push_back(r.str());
  for (std::size_t t = 0; t < g.n_terms; ++t) g.terms.push_back(r.str());
  return g;
}

void save_graph(const TextGraph& graph, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write graph file '" + path + "'");
  write_graph(graph, out);
}

TextGraph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open graph file '" + path + "'");
  return read_graph(in);
}

}  // namespace textgat
