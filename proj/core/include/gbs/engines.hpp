#pragma once

#include <span>
#include <string>
#include <vector>

#include "gbs/io.hpp"
#include "gbs/model.hpp"
#include "gbs/sde.hpp"

namespace gbs {

struct NamedObservable {
  std::string id;
  Matrix matrix;
};

/// Parses a comma-separated observable list: "n3" (number operator),
/// "1:2" (a_1+ a_2), "@file.json" (dense matrix, [re,im] entries). Empty
/// input gives n_1..n_M.
std::vector<NamedObservable> parse_observables(const std::string& list, int modes);

io::ResultTable run_exact(const ModelSpec& spec, std::span<const NamedObservable> obs);
io::ResultTable run_bmaster(const ModelSpec& spec, std::span<const NamedObservable> obs);

struct SdeOptions {
  int n_traj = 10000;
  double dt = 1e-3;
  Scheme scheme = Scheme::stratonovich_heun;
  std::uint64_t seed = 0;
};

/// Raw trajectory-mean rows per observable, plus "<id>[ratio]"
/// trace-normalized rows and a "trace" row per time.
io::ResultTable run_sde(const ModelSpec& spec, std::span<const NamedObservable> obs,
                        const SdeOptions& options);

}  // namespace gbs
