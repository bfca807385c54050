#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "gbs/algebra.hpp"
#include "gbs/model.hpp"

namespace gbs {

/// Exact Fock-space reference machinery for M modes. Basis convention
/// (Jordan-Wigner): basis index n encodes occupations with mode 1 as the
/// most significant bit, n = sum_j n_j 2^(M-j); a_j carries the string sign
/// (-1)^(n_1+...+n_{j-1}).
class FockSpace {
public:
  explicit FockSpace(int modes);

  int modes() const { return modes_; }
  int dim() const { return 1 << modes_; }

  Matrix annihilation(int mode) const;  // 1-based
  Matrix creation(int mode) const;
  Matrix number_op(int mode) const;
  Matrix total_number() const;
  Matrix identity() const;

  /// Basis index for an occupation string like "10" (mode 1 first).
  int basis_index(const std::string& occupation) const;
  int occupation_of(int basis, int mode) const;

private:
  int modes_;
};

Matrix build_hamiltonian(const ModelSpec& spec);

/// rho(t) on the spec's time grid via Hermitian eigendecomposition of H;
/// trace and Hermiticity are preserved at the error floor.
std::vector<Matrix> evolve_exact(const ModelSpec& spec, const Matrix& rho0);

/// Single-time variant.
Matrix evolve_exact_at(const ModelSpec& spec, const Matrix& rho0, double t);

Complex expectation(const Matrix& rho, const Matrix& obs);

/// Initial density matrix of the spec (occupation string or explicit matrix).
Matrix initial_density(const ModelSpec& spec);

/// Checks a density matrix: Hermitian, unit trace, PSD (floor -1e-10) and
/// number-conserving. Throws std::invalid_argument otherwise.
void require_valid_density(const Matrix& rho, int modes);

/// Fock vector with Grassmann-valued amplitudes; amplitude factors are
/// written to the left of the basis ket (for bras, to the right of the
/// basis bra). Kets and bras with odd Grassmann components have definite
/// total parity per amplitude.
struct GrassmannFockVector {
  GeneratorSpace::Ptr space;
  int modes = 0;
  std::vector<GrassmannNumber> amplitudes;  // size 2^modes
};

/// |g> = prod_p (1 - g_p a_p+) |0>; every component must be odd.
GrassmannFockVector coherent_ket(std::span<const GrassmannNumber> g, int modes);

/// <h| with h_p the already-conjugated components ((g'_p)* for the paper's
/// <g'*|); amplitudes are the plain ascending products of h's.
GrassmannFockVector coherent_bra(std::span<const GrassmannNumber> h, int modes);

// ket-side operator actions (Jordan-Wigner signs; the odd operator passes
// amplitudes with an involution)
GrassmannFockVector apply_annihilation(const GrassmannFockVector& ket, int mode);
GrassmannFockVector apply_creation(const GrassmannFockVector& ket, int mode);

// bra-side actions: <psi| a and <psi| a+
GrassmannFockVector bra_apply_annihilation(const GrassmannFockVector& bra, int mode);
GrassmannFockVector bra_apply_creation(const GrassmannFockVector& bra, int mode);

/// Outer product |ket><bra| as a dim x dim matrix of Grassmann entries
/// (row-major), with all Grassmann factors collected to the left:
/// entry(n,m) = ket_n * invol^{popcount(n)}(bra_m).
std::vector<GrassmannNumber> dyadic(const GrassmannFockVector& ket, const GrassmannFockVector& bra);

}  // namespace gbs
