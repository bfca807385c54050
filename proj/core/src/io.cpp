#include "gbs/io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gbs::io {

using nlohmann::json;

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument(path + ": invalid JSON: " + e.what());
  }
  return j;
}

Complex parse_complex(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument("model: field '" + field + "' expects complex entries [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Matrix parse_dense_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("model: field '" + field + "' must be a non-empty 2D array");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols)
      throw std::invalid_argument("model: field '" + field + "' is ragged");
    for (int c = 0; c < cols; ++c) m(r, c) = parse_complex(j[r][c], field);
  }
  return m;
}

std::string dir_of(const std::string& path) {
  auto pos = path.find_last_of('/');
  return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

}  // namespace

ModelSpec load_model(const std::string& path) {
  json j = read_json_file(path);
  ModelSpec spec;
  if (!j.contains("modes") || !j["modes"].is_number_integer())
    throw std::invalid_argument("model: missing integer field 'modes'");
  spec.modes = j["modes"].get<int>();
  const int M = spec.modes;
  if (M < 1) throw std::invalid_argument("model: field 'modes' must be >= 1");

  if (!j.contains("hopping")) throw std::invalid_argument("model: missing field 'hopping'");
  const json& hop = j["hopping"];
  if (hop.contains("dense")) {
    spec.hopping = parse_dense_matrix(hop["dense"], "hopping.dense");
    if (spec.hopping.rows() != M || spec.hopping.cols() != M)
      throw std::invalid_argument("model: 'hopping.dense' must be modes x modes");
  } else if (hop.contains("triplets")) {
    spec.hopping = Matrix::Zero(M, M);
    for (const auto& t : hop["triplets"]) {
      if (!t.is_array() || t.size() != 4)
        throw std::invalid_argument("model: 'hopping.triplets' entries are [p, q, re, im]");
      int p = t[0].get<int>(), q = t[1].get<int>();
      if (p < 1 || p > M || q < 1 || q > M)
        throw std::invalid_argument("model: 'hopping.triplets' index out of range");
      Complex v{t[2].get<double>(), t[3].get<double>()};
      spec.hopping(p - 1, q - 1) += v;
      if (p != q) spec.hopping(q - 1, p - 1) += std::conj(v);  // Hermitian completion
    }
  } else {
    throw std::invalid_argument("model: 'hopping' needs 'dense' or 'triplets'");
  }

  if (j.contains("interaction") && !j["interaction"].is_null()) {
    spec.interaction.assign(static_cast<size_t>(M) * M * M * M, Complex{});
    for (const auto& e : j["interaction"]) {
      if (!e.is_array() || e.size() != 6)
        throw std::invalid_argument("model: 'interaction' entries are [p, q, r, s, re, im]");
      int p = e[0].get<int>(), q = e[1].get<int>(), r = e[2].get<int>(), s = e[3].get<int>();
      for (int idx : {p, q, r, s})
        if (idx < 1 || idx > M)
          throw std::invalid_argument("model: 'interaction' index out of range");
      spec.interaction[static_cast<size_t>((((p - 1) * M + (q - 1)) * M + (r - 1)) * M +
                                           (s - 1))] += Complex{e[4].get<double>(), e[5].get<double>()};
    }
  }

  if (!j.contains("initial_state"))
    throw std::invalid_argument("model: missing field 'initial_state'");
  if (j["initial_state"].is_string()) {
    spec.initial_state = j["initial_state"].get<std::string>();
  } else if (j["initial_state"].is_object() && j["initial_state"].contains("density_matrix_file")) {
    std::string rel = j["initial_state"]["density_matrix_file"].get<std::string>();
    std::string full = rel.starts_with('/') ? rel : dir_of(path) + "/" + rel;
    json dj = read_json_file(full);
    if (!dj.contains("matrix"))
      throw std::invalid_argument("density matrix file: missing field 'matrix'");
    spec.initial_state = parse_dense_matrix(dj["matrix"], "matrix");
  } else {
    throw std::invalid_argument(
        "model: 'initial_state' is an occupation string or {\"density_matrix_file\": path}");
  }

  if (!j.contains("time_grid") || !j["time_grid"].is_object())
    throw std::invalid_argument("model: missing object field 'time_grid'");
  const json& tg = j["time_grid"];
  if (!tg.contains("t_max") || !tg.contains("points"))
    throw std::invalid_argument("model: 'time_grid' needs 't_max' and 'points'");
  double t_max = tg["t_max"].get<double>();
  int points = tg["points"].get<int>();
  if (points < 1 || (points == 1 && t_max != 0.0) || t_max < 0.0)
    throw std::invalid_argument("model: 'time_grid' needs t_max >= 0 and points >= 2 (or {0,1})");
  spec.time_grid.clear();
  for (int i = 0; i < points; ++i)
    spec.time_grid.push_back(points == 1 ? 0.0 : t_max * i / (points - 1));

  return ModelSpec::validated(std::move(spec));
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

json meta_to_json(const RunMetadata& m) {
  return json{{"engine", m.engine},     {"model_hash", m.model_hash}, {"scheme", m.scheme},
              {"dt", m.dt},             {"n_traj", m.n_traj},         {"seed", m.seed},
              {"version", m.version},   {"timestamp", m.timestamp}};
}

}  // namespace

std::string render_csv(const ResultTable& table) {
  std::ostringstream os;
  os << "t,observable,mean_re,mean_im,se_re,se_im,engine\n";
  for (const auto& r : table.rows) {
    os << fmt_double(r.t) << "," << r.observable << "," << fmt_double(r.mean.real()) << ","
       << fmt_double(r.mean.imag()) << "," << fmt_double(r.se.real()) << ","
       << fmt_double(r.se.imag()) << "," << r.engine << "\n";
  }
  return os.str();
}

void write_csv(const ResultTable& table, const std::string& path) {
  {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << render_csv(table);
  }
  std::ofstream meta(path + ".meta.json");
  if (!meta) throw std::runtime_error("cannot write: " + path + ".meta.json");
  meta << meta_to_json(table.meta).dump(2) << "\n";
}

void write_json(const ResultTable& table, const std::string& path) {
  json rows = json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"t", r.t},
                    {"observable", r.observable},
                    {"mean", {r.mean.real(), r.mean.imag()}},
                    {"se", {r.se.real(), r.se.imag()}},
                    {"engine", r.engine}});
  }
  json doc{{"metadata", meta_to_json(table.meta)}, {"rows", rows}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);
  out << doc.dump(2) << "\n";
}

ResultTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  ResultTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument(path + ": empty result file");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw std::invalid_argument(path + ": malformed row: " + line);
    ResultRow r;
    r.t = std::stod(cells[0]);
    r.observable = cells[1];
    r.mean = {std::stod(cells[2]), std::stod(cells[3])};
    r.se = {std::stod(cells[4]), std::stod(cells[5])};
    r.engine = cells[6];
    table.rows.push_back(std::move(r));
  }
  return table;
}

CompareReport compare_results(const ResultTable& a, const ResultTable& b) {
  auto key_of = [](const ResultRow& r) { return std::pair<std::string, double>(r.observable, r.t); };
  std::map<std::pair<std::string, double>, const ResultRow*> bmap;
  for (const auto& r : b.rows) bmap[key_of(r)] = &r;
  CompareReport rep;
  size_t matched = 0;
  for (const auto& ra : a.rows) {
    auto it = bmap.find(key_of(ra));
    if (it == bmap.end()) continue;
    ++matched;
    const ResultRow& rb = *it->second;
    ComparePoint p;
    p.t = ra.t;
    p.observable = ra.observable;
    p.a = ra.mean;
    p.b = rb.mean;
    p.diff = ra.mean - rb.mean;
    double se_re = std::hypot(ra.se.real(), rb.se.real());
    double se_im = std::hypot(ra.se.imag(), rb.se.imag());
    p.has_z = se_re > 0.0 || se_im > 0.0;
    p.z_re = se_re > 0.0 ? p.diff.real() / se_re : 0.0;
    p.z_im = se_im > 0.0 ? p.diff.imag() / se_im : 0.0;
    rep.points.push_back(p);
    rep.max_abs_diff = std::max(rep.max_abs_diff, std::abs(p.diff));
    if (p.has_z) rep.max_abs_z = std::max({rep.max_abs_z, std::abs(p.z_re), std::abs(p.z_im)});
  }
  if (matched == 0 || matched != a.rows.size() || matched != b.rows.size())
    throw std::invalid_argument("compare: result grids/observables do not match");
  return rep;
}

void print_report(const CompareReport& rep, std::ostream& out) {
  out << "t,observable,diff_re,diff_im,z_re,z_im\n";
  for (const auto& p : rep.points) {
    out << fmt_double(p.t) << "," << p.observable << "," << fmt_double(p.diff.real()) << ","
        << fmt_double(p.diff.imag()) << ",";
    if (p.has_z)
      out << fmt_double(p.z_re) << "," << fmt_double(p.z_im);
    else
      out << ",";
    out << "\n";
  }
  out << "# max |diff| = " << fmt_double(rep.max_abs_diff)
      << ", max |z| = " << fmt_double(rep.max_abs_z) << "\n";
}

}  // namespace gbs::io
