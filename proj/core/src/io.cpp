#include "shufflebn/io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "shufflebn/error.hpp"

namespace shufflebn {

using json = nlohmann::json;

const char* library_version() { return SHUFFLEBN_VERSION_STRING; }

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream s(line);
  while (std::getline(s, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(Errc::io_error, "line " + std::to_string(line) + ": '" + s + "' is not a number");
  }
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write " + path);
  return out;
}

json matrix_json(const Matrix& m) {
  json values = json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) values.push_back(m(i, j));
  return {{"shape", {m.rows(), m.cols()}}, {"values", values}};
}

Matrix matrix_from_json(const json& j) {
  Index rows = j.at("shape").at(0).get<Index>();
  Index cols = j.at("shape").at(1).get<Index>();
  const auto& values = j.at("values");
  if (static_cast<Index>(values.size()) != rows * cols)
    fail(Errc::io_error, "checkpoint value count does not match its shape");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index k = 0; k < cols; ++k) m(i, k) = values.at(static_cast<std::size_t>(i * cols + k)).get<double>();
  return m;
}

std::string dump(const json& j) {
  // nlohmann prints doubles in shortest round-trip form, which never needs
  // more than 17 significant digits.
  return j.dump(2) + "\n";
}

json layer_json(const ModelParams& p) {
  return {{"W", matrix_json(p.W)}, {"Gamma", matrix_json(p.gamma.transpose())}};
}

ModelParams layer_from_json(const json& j) {
  ModelParams p;
  p.W = matrix_from_json(j.at("W"));
  p.gamma = matrix_from_json(j.at("Gamma")).transpose();
  if (p.gamma.size() != p.W.cols()) fail(Errc::io_error, "checkpoint Gamma does not match W");
  return p;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::io_error, std::string("invalid JSON: ") + e.what());
  }
}

// Missing keys or wrong types in otherwise valid JSON become io_error.
template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(Errc::io_error, std::string("malformed document: ") + e.what());
  }
}

}  // namespace

void write_dataset_csv(const Dataset& ds, std::ostream& out) {
  for (Index k = 0; k < ds.d(); ++k) out << (k ? "," : "") << "x" << (k + 1);
  if (ds.kind == TargetKind::classification) out << ",y";
  else
    for (Index k = 0; k < ds.p(); ++k) out << ",y" << (k + 1);
  out << "\n";
  for (Index j = 0; j < ds.n(); ++j) {
    for (Index k = 0; k < ds.d(); ++k) out << (k ? "," : "") << fmt(ds.X(k, j));
    for (Index k = 0; k < ds.p(); ++k) out << "," << fmt(ds.Y(k, j));
    out << "\n";
  }
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
  auto out = open_out(path);
  write_dataset_csv(ds, out);
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(Errc::io_error, "empty dataset file");
  auto header = split_csv_line(line);
  Index d = 0;
  while (d < static_cast<Index>(header.size()) && header[static_cast<std::size_t>(d)] == "x" + std::to_string(d + 1)) ++d;
  Index p = static_cast<Index>(header.size()) - d;
  if (d < 1 || p < 1) fail(Errc::io_error, "header must be x1..xd followed by y or y1..yp");
  bool single_y = p == 1 && header.back() == "y";
  for (Index k = 0; k < p && !single_y; ++k)
    if (header[static_cast<std::size_t>(d + k)] != "y" + std::to_string(k + 1))
      fail(Errc::io_error, "unexpected target column '" + header[static_cast<std::size_t>(d + k)] + "'");
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (static_cast<Index>(cells.size()) != d + p)
      fail(Errc::io_error, "line " + std::to_string(lineno) + " has " +
                               std::to_string(cells.size()) + " fields, expected " +
                               std::to_string(d + p));
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c, lineno));
    rows.push_back(std::move(row));
  }
  Index n = static_cast<Index>(rows.size());
  Matrix X(d, n), Y(p, n);
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < d; ++k) X(k, j) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
    for (Index k = 0; k < p; ++k) Y(k, j) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(d + k)];
  }
  if (single_y && n > 0 && (Y.array().abs() == 1.0).all())
    return Dataset::classification(std::move(X), Y.row(0));
  return Dataset::regression(std::move(X), std::move(Y));
}

Dataset read_dataset_csv(const std::string& path) {
  auto in = open_in(path);
  return read_dataset_csv(in);
}

void write_normalized_dataset(const NormalizedDataset& nds, const std::string& csv_path,
                              const std::string& json_path) {
  Dataset view;
  view.X = nds.Xbar;
  view.Y = nds.Y;
  view.kind = nds.target_kind;
  write_dataset_csv(view, csv_path);
  json batches = json::array();
  for (const auto& b : nds.batches) batches.push_back({b.begin, b.size});
  json side = {{"kind", norm_kind_name(nds.kind)},
               {"B", nds.batch_size},
               {"epsilon", nds.epsilon},
               {"n", nds.n_original},
               {"target", nds.target_kind == TargetKind::classification ? "classification" : "regression"},
               {"perms", nds.perms},
               {"source", nds.source},
               {"batches", batches}};
  write_text_file(json_path, dump(side));
}

NormalizedDataset read_normalized_dataset(const std::string& csv_path, const std::string& json_path) {
  json side = parse_json(read_text_file(json_path));
  auto in = open_in(csv_path);
  Dataset view = read_dataset_csv(in);
  return guarded([&] {
    NormalizedDataset nds;
    nds.Xbar = std::move(view.X);
    nds.Y = std::move(view.Y);
    nds.target_kind = side.at("target").get<std::string>() == "classification"
                          ? TargetKind::classification
                          : TargetKind::regression;
    std::string kind = side.at("kind").get<std::string>();
    if (kind == "SS") nds.kind = NormKind::ss;
    else if (kind == "GD") nds.kind = NormKind::gd;
    else if (kind == "RR-full") nds.kind = NormKind::rr_full;
    else if (kind == "RR-sampled") nds.kind = NormKind::rr_sampled;
    else fail(Errc::io_error, "unknown normalized dataset kind '" + kind + "'");
    nds.batch_size = side.at("B").get<Index>();
    nds.epsilon = side.at("epsilon").get<double>();
    nds.n_original = side.at("n").get<Index>();
    nds.perms = side.at("perms").get<std::vector<std::vector<Index>>>();
    nds.source = side.at("source").get<std::vector<Index>>();
    for (const auto& b : side.at("batches")) nds.batches.push_back({b.at(0).get<Index>(), b.at(1).get<Index>()});
    return nds;
  });
}

std::string checkpoint_json(const ModelParams& params) {
  json j = layer_json(params);
  j["depth"] = 1;
  return dump(j);
}

ModelParams parse_checkpoint(const std::string& text) {
  json j = parse_json(text);
  return guarded([&] { return layer_from_json(j); });
}

std::string checkpoint_json(const DeepLinearParams& params) {
  json j;
  j["depth"] = params.depth();
  if (params.input) j["input"] = matrix_json(*params.input);
  json layers = json::array();
  for (const auto& l : params.layers) layers.push_back(layer_json(l));
  j["layers"] = layers;
  return dump(j);
}

DeepLinearParams parse_deep_checkpoint(const std::string& text) {
  json j = parse_json(text);
  return guarded([&] {
    DeepLinearParams p;
    if (j.contains("input")) p.input = matrix_from_json(j.at("input"));
    for (const auto& l : j.at("layers")) p.layers.push_back(layer_from_json(l));
    if (p.layers.empty()) fail(Errc::io_error, "checkpoint has no layers");
    return p;
  });
}

void write_trace_csv(const TrainTrace& trace, std::ostream& out) {
  out << "epoch,eta,L_dist,L_gd,normD,normW,normG,normM\n";
  auto row = [&](const EpochRecord& r) {
    out << r.epoch << "," << fmt(r.eta) << "," << fmt(r.L_dist) << "," << fmt(r.L_gd) << ","
        << fmt(r.normD) << "," << fmt(r.normW) << "," << fmt(r.normG) << "," << fmt(r.normM)
        << "\n";
  };
  row(trace.initial);
  for (const auto& r : trace.epochs) row(r);
}

void write_trace_csv(const TrainTrace& trace, const std::string& path) {
  auto out = open_out(path);
  write_trace_csv(trace, out);
}

void write_risk_row(std::ostream& out, Index epoch, const RiskReport& report) {
  out << epoch << "," << norm_kind_name(report.kind) << "," << loss_name(report.loss) << ","
      << fmt(report.value) << "\n";
}

std::string decomposition_json(const SeparabilityDecomposition& dec) {
  json j = {{"kind", sep_kind_name(dec.kind)},
            {"ls_indices", dec.ls_indices},
            {"sc_indices", dec.sc_indices},
            {"witness", std::vector<double>(dec.witness.data(), dec.witness.data() + dec.witness.size())},
            {"margins", dec.margins}};
  return dump(j);
}

std::string robustness_json(const RobustnessReport& rep) {
  json j = {{"gamma", rep.gamma},
            {"gd_kind", sep_kind_name(rep.gd_kind)},
            {"condition1", rep.condition1},
            {"min_scale_ratio", rep.min_scale_ratio},
            {"condition2", rep.condition2},
            {"norm_ratio", rep.norm_ratio},
            {"condition3", rep.condition3},
            {"robust", rep.robust}};
  j["margin"] = rep.margin ? json(*rep.margin) : json(nullptr);
  j["penetration_depth"] = rep.penetration_depth ? json(*rep.penetration_depth) : json(nullptr);
  if (rep.gd_kind == SepKind::PLS) j["note"] = "PLS datasets are not robust for any gamma";
  return dump(j);
}

std::string read_text_file(const std::string& path) {
  auto in = open_in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace shufflebn
