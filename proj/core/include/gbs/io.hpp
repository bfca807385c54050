#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gbs/model.hpp"

namespace gbs::io {

/// Loads a model file (JSON):
///   modes          int
///   hopping        {"dense": [[ [re,im], ... ]]} or {"triplets": [[p,q,re,im], ...]} (1-based,
///                  Hermitian completion applied to triplets)
///   interaction    [[p,q,r,s,re,im], ...] sparse 6-tuples (1-based), optional
///   initial_state  occupation string like "10", or {"density_matrix_file": path}
///   time_grid      {"t_max": x, "points": n}  -> n points evenly spaced over [0, t_max]
/// Throws std::invalid_argument naming the offending field.
ModelSpec load_model(const std::string& path);

/// FNV-1a 64 over the file bytes, as 16 hex digits.
std::string file_hash(const std::string& path);

struct ResultRow {
  double t = 0.0;
  std::string observable;
  Complex mean{};
  Complex se{};
  std::string engine;
};

struct RunMetadata {
  std::string engine;
  std::string model_hash;
  std::string scheme;
  double dt = 0.0;
  long long n_traj = 0;
  std::uint64_t seed = 0;
  std::string version;
  std::string timestamp;  // the only field allowed to differ between identical runs
};

struct ResultTable {
  std::vector<ResultRow> rows;
  RunMetadata meta;
};

/// Columns: t,observable,mean_re,mean_im,se_re,se_im,engine with %.16e
/// numbers. Metadata goes to `path + ".meta.json"`.
void write_csv(const ResultTable& table, const std::string& path);
void write_json(const ResultTable& table, const std::string& path);
ResultTable read_csv(const std::string& path);

std::string render_csv(const ResultTable& table);

struct ComparePoint {
  double t = 0.0;
  std::string observable;
  Complex a{};
  Complex b{};
  Complex diff{};
  double z_re = 0.0;
  double z_im = 0.0;
  bool has_z = false;
};

struct CompareReport {
  std::vector<ComparePoint> points;
  double max_abs_diff = 0.0;
  double max_abs_z = 0.0;  // over points with standard errors
};

/// Pointwise comparison of two result tables; throws on mismatched grids or
/// observable sets.
CompareReport compare_results(const ResultTable& a, const ResultTable& b);

void print_report(const CompareReport& report, std::ostream& out);

}  // namespace gbs::io
