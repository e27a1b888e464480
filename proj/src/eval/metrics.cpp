#include <numeric>
#include <sstream>

#include "json.hpp"
#include "textgat/error.hpp"
#include "textgat/eval.hpp"

namespace textgat {

std::uint64_t ConfusionMatrix::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}); }

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t c = 0; c < classes_; ++c) t += (*this)(c, c);
  return t;
}

ConfusionMatrix confusion(std::span<const std::size_t> preds, std::span<const std::size_t> labels,
                          std::span<const std::size_t> nodes, std::size_t classes) {
  if (nodes.empty()) throw Error("confusion: empty mask");
  ConfusionMatrix cm(classes);
  for (std::size_t v : nodes) {
    if (v >= preds.size() || v >= labels.size()) throw Error("confusion: node " + std::to_string(v) + " out of range");
    if (labels[v] >= classes) throw Error("confusion: label " + std::to_string(labels[v]) + " out of range");
    if (preds[v] >= classes) throw Error("confusion: prediction " + std::to_string(preds[v]) + " out of range");
    ++cm(labels[v], preds[v]);
  }
  return cm;
}

namespace {
double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }
double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }
}  // namespace

MetricsReport metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw Error("metrics: empty confusion matrix");
  const std::size_t k = cm.classes();
  MetricsReport r;
  r.per_class.resize(k);
  double sum_p = 0.0, sum_r = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    std::uint64_t tp = cm(c, c), row = 0, col = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row += cm(c, j);
      col += cm(j, c);
    }
    auto& m = r.per_class[c];
    m.precision = ratio(static_cast<double>(tp), static_cast<double>(col));
    m.recall = ratio(static_cast<double>(tp), static_cast<double>(row));
    m.f_score = harmonic(m.precision, m.recall);
    sum_p += m.precision;
    sum_r += m.recall;
  }
  r.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
  r.macro_precision = sum_p / static_cast<double>(k);
  r.macro_recall = sum_r / static_cast<double>(k);
  r.macro_f = harmonic(r.macro_precision, r.macro_recall);
  return r;
}

std::string report_to_json(const MetricsReport& r, const ConfusionMatrix& cm, const std::vector<std::string>& names) {
  nlohmann::ordered_json j;
  j["accuracy"] = r.accuracy;
  j["macro_precision"] = r.macro_precision;
  j["macro_recall"] = r.macro_recall;
  j["macro_f"] = r.macro_f;
  nlohmann::ordered_json classes = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    nlohmann::ordered_json e;
    e["class"] = c < names.size() ? names[c] : std::to_string(c);
    e["precision"] = r.per_class[c].precision;
    e["recall"] = r.per_class[c].recall;
    e["f_score"] = r.per_class[c].f_score;
    classes.push_back(e);
  }
  j["per_class"] = classes;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t t = 0; t < cm.classes(); ++t) {
    std::vector<std::uint64_t> row;
    for (std::size_t p = 0; p < cm.classes(); ++p) row.push_back(cm(t, p));
    rows.push_back(row);
  }
  j["confusion"] = rows;
  return j.dump(2);
}

void report_to_csv(const MetricsReport& r, const std::vector<std::string>& names, std::ostream& out) {
  std::ostringstream os;
  os.precision(17);
  os << "class,precision,recall,f_score\n";
  for (std::size_t c = 0; c < r.per_class.size(); ++c)
    os << (c < names.size() ? names[c] : std::to_string(c)) << ',' << r.per_class[c].precision << ','
       << r.per_class[c].recall << ',' << r.per_class[c].f_score << '\n';
  os << "macro," << r.macro_precision << ',' << r.macro_recall << ',' << r.macro_f << '\n';
  os << "accuracy," << r.accuracy << ',' << r.accuracy << ',' << r.accuracy << '\n';
  out << os.str();
}

MetricsReport evaluate_split(const TextGraph& graph, const Prediction& prediction, Split split, ConfusionMatrix* cm_out) {
  auto nodes = graph.nodes_in(split);
  if (nodes.empty()) throw Error("evaluate: the " + std::string(to_string(split)) + " split is empty");
  ConfusionMatrix cm = confusion(prediction.classes, graph.labels, nodes, graph.n_classes());
  if (cm_out) *cm_out = cm;
  return metrics(cm);
}

}  // namespace textgat
