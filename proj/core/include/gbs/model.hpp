#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <variant>
#include <vector>

namespace gbs {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Quadratic-plus-pairwise model: H = a+_p T_pq a_q - 1/4 a+_p a+_q V_pqrs a_r a_s
/// (summation implied). `interaction` is the dense rank-4 tensor, row-major
/// in (p,q,r,s), 0-based. Construct via `validated`, which checks T
/// Hermitian, antisymmetrizes V over (p<->q) and (r<->s), and checks the
/// remaining Hermiticity condition V_pqrs = conj(V_srqp).
struct ModelSpec {
  int modes = 0;
  Matrix hopping;
  std::vector<std::complex<double>> interaction;  // size modes^4, may be empty for V = 0
  // occupation string like "10" (mode 1 first) or an explicit density matrix
  std::variant<std::string, Matrix> initial_state;
  std::vector<double> time_grid;  // ascending, starts at 0

  std::complex<double> v(int p, int q, int r, int s) const;
  bool has_interaction() const;

  /// Normalizes and validates; throws std::invalid_argument naming the
  /// offending field.
  static ModelSpec validated(ModelSpec raw);
};

/// Frobenius norm of the interaction tensor.
double interaction_norm(const ModelSpec& spec);

}  // namespace gbs
