#pragma once

#include <random>

#include "gbs/algebra.hpp"
#include "gbs/model.hpp"

namespace gbs::testing {

inline GrassmannNumber random_number(const GeneratorSpace::Ptr& space, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  GrassmannNumber g(space);
  for (std::uint32_t m = 0; m < (std::uint32_t{1} << space->count()); ++m)
    g.set_coefficient(m, Complex{n01(rng), n01(rng)});
  return g;
}

inline GrassmannNumber random_parity(const GeneratorSpace::Ptr& space, std::mt19937_64& rng,
                                     bool odd) {
  std::normal_distribution<double> n01;
  GrassmannNumber g(space);
  for (std::uint32_t m = 0; m < (std::uint32_t{1} << space->count()); ++m)
    if ((std::popcount(m) & 1) == (odd ? 1 : 0)) g.set_coefficient(m, Complex{n01(rng), n01(rng)});
  return g;
}

inline Matrix random_matrix(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = Complex{n01(rng), n01(rng)};
  return m;
}

inline Matrix random_number_conserving(int modes, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  int dim = 1 << modes;
  Matrix m = Matrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      if (std::popcount(unsigned(i)) == std::popcount(unsigned(j)))
        m(i, j) = Complex{n01(rng), n01(rng)};
  return m;
}

/// Two-mode model with hopping t and density-density coupling U n_1 n_2
/// (V_pqrs = U eps_pq eps_rs).
inline ModelSpec hubbard_dimer(double t_hop, double u, double t_max = 0.0, int points = 1) {
  ModelSpec spec;
  spec.modes = 2;
  spec.hopping = Matrix::Zero(2, 2);
  spec.hopping(0, 1) = -t_hop;
  spec.hopping(1, 0) = -t_hop;
  if (u != 0.0) {
    spec.interaction.assign(16, Complex{});
    auto set = [&](int p, int q, int r, int s, double v) {
      spec.interaction[static_cast<size_t>(((p * 2 + q) * 2 + r) * 2 + s)] = v;
    };
    set(0, 1, 0, 1, u);
    set(0, 1, 1, 0, -u);
    set(1, 0, 0, 1, -u);
    set(1, 0, 1, 0, u);
  }
  spec.initial_state = std::string("10");
  spec.time_grid = {0.0};
  for (int i = 1; i < points; ++i) spec.time_grid.push_back(t_max * i / (points - 1));
  return ModelSpec::validated(std::move(spec));
}

/// Random Hermitian-compatible (T, V) pair for master-equation oracles.
inline ModelSpec random_model(int modes, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  ModelSpec spec;
  spec.modes = modes;
  Matrix t = random_matrix(modes, rng);
  spec.hopping = t + t.adjoint();
  const int M = modes;
  std::vector<Complex> v(static_cast<size_t>(M) * M * M * M);
  for (auto& c : v) c = Complex{n01(rng), n01(rng)};
  // enforce V_pqrs = conj(V_srqp) so the Hamiltonian is Hermitian
  auto at = [&](int p, int q, int r, int s) -> Complex& {
    return v[static_cast<size_t>(((p * M + q) * M + r) * M + s)];
  };
  for (int p = 0; p < M; ++p)
    for (int q = 0; q < M; ++q)
      for (int r = 0; r < M; ++r)
        for (int s = 0; s < M; ++s) {
          Complex sym = 0.5 * (at(p, q, r, s) + std::conj(at(s, r, q, p)));
          at(p, q, r, s) = sym;
          at(s, r, q, p) = std::conj(sym);
        }
  spec.interaction = std::move(v);
  spec.initial_state = std::string(static_cast<size_t>(modes), '0');
  spec.time_grid = {0.0};
  return ModelSpec::validated(std::move(spec));
}

}  // namespace gbs::testing
