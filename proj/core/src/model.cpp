#include "gbs/model.hpp"

#include <cmath>
#include <stdexcept>

namespace gbs {

namespace {
inline size_t idx4(int M, int p, int q, int r, int s) {
  return static_cast<size_t>(((p * M + q) * M + r) * M + s);
}
}  // namespace

std::complex<double> ModelSpec::v(int p, int q, int r, int s) const {
  if (interaction.empty()) return {};
  return interaction[idx4(modes, p, q, r, s)];
}

bool ModelSpec::has_interaction() const {
  for (const auto& c : interaction)
    if (c != std::complex<double>{}) return true;
  return false;
}

double interaction_norm(const ModelSpec& spec) {
  double s = 0.0;
  for (const auto& c : spec.interaction) s += std::norm(c);
  return std::sqrt(s);
}

ModelSpec ModelSpec::validated(ModelSpec raw) {
  if (raw.modes < 1 || raw.modes > 12)
    throw std::invalid_argument("model: modes must be in [1, 12]");
  const int M = raw.modes;
  if (raw.hopping.rows() != M || raw.hopping.cols() != M)
    throw std::invalid_argument("model: hopping matrix must be modes x modes");
  double tnorm = std::max(1.0, raw.hopping.norm());
  if ((raw.hopping - raw.hopping.adjoint()).norm() > 1e-10 * tnorm)
    throw std::invalid_argument("model: hopping matrix is not Hermitian");

  if (!raw.interaction.empty()) {
    if (raw.interaction.size() != static_cast<size_t>(M) * M * M * M)
      throw std::invalid_argument("model: interaction tensor must have modes^4 entries");
    // keep only the component contracted by a+a+ / aa: antisymmetrize over
    // (p<->q) and (r<->s)
    std::vector<std::complex<double>> a(raw.interaction.size());
    for (int p = 0; p < M; ++p)
      for (int q = 0; q < M; ++q)
        for (int r = 0; r < M; ++r)
          for (int s = 0; s < M; ++s) {
            auto& t = raw.interaction;
            a[idx4(M, p, q, r, s)] =
                0.25 * (t[idx4(M, p, q, r, s)] - t[idx4(M, q, p, r, s)] -
                        t[idx4(M, p, q, s, r)] + t[idx4(M, q, p, s, r)]);
          }
    raw.interaction = std::move(a);
    double vnorm = std::max(1.0, interaction_norm(raw));
    for (int p = 0; p < M; ++p)
      for (int q = 0; q < M; ++q)
        for (int r = 0; r < M; ++r)
          for (int s = 0; s < M; ++s) {
            auto d = raw.interaction[idx4(M, p, q, r, s)] -
                     std::conj(raw.interaction[idx4(M, s, r, q, p)]);
            if (std::abs(d) > 1e-10 * vnorm)
              throw std::invalid_argument(
                  "model: interaction violates Hermiticity (V_pqrs != conj(V_srqp))");
          }
  }

  if (raw.time_grid.empty()) raw.time_grid = {0.0};
  if (raw.time_grid.front() != 0.0)
    throw std::invalid_argument("model: time grid must start at 0");
  for (size_t i = 1; i < raw.time_grid.size(); ++i)
    if (raw.time_grid[i] <= raw.time_grid[i - 1])
      throw std::invalid_argument("model: time grid must be strictly increasing");

  if (std::holds_alternative<std::string>(raw.initial_state)) {
    const auto& occ = std::get<std::string>(raw.initial_state);
    if (static_cast<int>(occ.size()) != M)
      throw std::invalid_argument("model: occupation string length must equal modes");
    for (char c : occ)
      if (c != '0' && c != '1')
        throw std::invalid_argument("model: occupation string must be over {0,1}");
  }
  return raw;
}

}  // namespace gbs
