#include "gbs/engines.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gbs/brep.hpp"
#include "gbs/fock.hpp"
#include "gbs/version.hpp"

namespace gbs {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

Matrix load_matrix_file(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("observable: cannot open " + path);
  nlohmann::json j;
  in >> j;
  const auto& mj = j.contains("matrix") ? j["matrix"] : j;
  Matrix m(dim, dim);
  if (static_cast<int>(mj.size()) != dim)
    throw std::invalid_argument("observable: matrix in " + path + " has wrong dimension");
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      m(r, c) = Complex{mj[r][c][0].get<double>(), mj[r][c][1].get<double>()};
  return m;
}

}  // namespace

std::vector<NamedObservable> parse_observables(const std::string& list, int modes) {
  FockSpace fs(modes);
  std::vector<NamedObservable> out;
  std::vector<std::string> toks = split(list, ',');
  if (toks.empty()) {
    for (int j = 1; j <= modes; ++j)
      out.push_back({"n" + std::to_string(j), fs.number_op(j)});
    return out;
  }
  for (const auto& tok : toks) {
    if (tok.front() == '@') {
      out.push_back({tok.substr(1), load_matrix_file(tok.substr(1), fs.dim())});
    } else if (tok.front() == 'n') {
      int j = std::stoi(tok.substr(1));
      if (j < 1 || j > modes) throw std::invalid_argument("observable: bad mode in " + tok);
      out.push_back({tok, fs.number_op(j)});
    } else {
      auto parts = split(tok, ':');
      if (parts.size() != 2)
        throw std::invalid_argument("observable '" + tok + "': use nK, i:j or @file");
      int i = std::stoi(parts[0]), j = std::stoi(parts[1]);
      if (i < 1 || i > modes || j < 1 || j > modes)
        throw std::invalid_argument("observable: bad mode in " + tok);
      out.push_back({tok, fs.creation(i) * fs.annihilation(j)});
    }
  }
  return out;
}

io::ResultTable run_exact(const ModelSpec& spec, std::span<const NamedObservable> obs) {
  io::ResultTable table;
  table.meta.engine = "exact";
  table.meta.version = kVersion;
  Matrix rho0 = initial_density(spec);
  auto rhos = evolve_exact(spec, rho0);
  for (size_t i = 0; i < rhos.size(); ++i) {
    for (const auto& o : obs) {
      table.rows.push_back(
          {spec.time_grid[i], o.id, expectation(rhos[i], o.matrix), Complex{}, "exact"});
    }
  }
  return table;
}

io::ResultTable run_bmaster(const ModelSpec& spec, std::span<const NamedObservable> obs) {
  io::ResultTable table;
  table.meta.engine = "b-master";
  table.meta.version = kVersion;
  Matrix rho0 = initial_density(spec);
  BFunction b0 = b_from_rho(rho0, spec.modes);
  auto bs = propagate_b(b0, spec);
  for (size_t i = 0; i < bs.size(); ++i) {
    Matrix rho = rho_from_b(bs[i]);
    for (const auto& o : obs) {
      table.rows.push_back(
          {spec.time_grid[i], o.id, expectation(rho, o.matrix), Complex{}, "b-master"});
    }
  }
  return table;
}

io::ResultTable run_sde(const ModelSpec& spec, std::span<const NamedObservable> obs,
                        const SdeOptions& options) {
  io::ResultTable table;
  table.meta.engine = "sde";
  table.meta.version = kVersion;
  table.meta.scheme = scheme_name(options.scheme);
  table.meta.dt = options.dt;
  table.meta.n_traj = options.n_traj;
  table.meta.seed = options.seed;

  Matrix rho0 = initial_density(spec);
  BFunction b0 = b_from_rho(rho0, spec.modes);
  TrajectoryEnsemble ens =
      simulate_ensemble(spec, options.n_traj, options.dt, options.scheme, options.seed);

  std::vector<Matrix> mats;
  mats.reserve(obs.size());
  for (const auto& o : obs) mats.push_back(o.matrix);

  for (size_t ti = 0; ti < ens.times.size(); ++ti) {
    auto est = estimate_observables(ens, b0, mats, static_cast<int>(ti));
    for (size_t o = 0; o < obs.size(); ++o) {
      const auto& e = est[o];
      if (!std::isfinite(e.mean.real()) || !std::isfinite(e.mean.imag()))
        throw std::runtime_error("run_sde: non-finite estimate for " + obs[o].id);
      table.rows.push_back({ens.times[ti], obs[o].id, e.mean, e.se, "sde"});
      if (e.ratio_reliable)
        table.rows.push_back({ens.times[ti], obs[o].id + "[ratio]", e.ratio, e.ratio_se, "sde"});
      else
        table.rows.push_back(
            {ens.times[ti], obs[o].id + "[ratio:unreliable]", Complex{}, Complex{}, "sde"});
    }
    if (!est.empty())
      table.rows.push_back({ens.times[ti], "trace", est[0].trace_mean, est[0].trace_se, "sde"});
  }
  return table;
}

}  // namespace gbs
