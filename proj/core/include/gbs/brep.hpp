#pragma once

#include <vector>

#include "gbs/algebra.hpp"
#include "gbs/fock.hpp"
#include "gbs/model.hpp"

namespace gbs {

/// Weight function B(e, e'*) of the coherent-dyadic expansion of an
/// operator; lives over GeneratorSpace::b_rep(modes). For number-conserving
/// density operators B is even with balanced e / e'* content.
struct BFunction {
  GrassmannNumber value;
  int modes = 0;
};

BFunction b_zero(int modes);

/// The written integration order of the expansion integral:
/// de'*_1 ... de'*_M de_M ... de_1 (as generator indices of b_rep(modes)).
std::vector<int> b_written_order(int modes);

/// Operator reconstructed from B against the dyadic of the propagated
/// coherent vectors g = Mu·e, g' = Mp·e' (columns carry the linear SDE
/// solution). Identity propagators give the plain expansion integral.
Matrix reconstruct_operator(const BFunction& b, const Matrix& mu, const Matrix& mp);

/// Expansion integral with basis vectors (identity propagators); cached
/// tables make this the fast path.
Matrix rho_from_b(const BFunction& b);

/// Inverse of rho_from_b via a dense solve over all monomial coefficients.
/// Exact for any operator; number-conserving operators come back with
/// balanced even support. Throws when the solve residual exceeds 1e-10
/// (signals a convention bug, never expected to fire).
BFunction b_from_rho(const Matrix& rho, int modes);

enum class CorrespondenceSide {
  annihilate_left,   // {a_j rho}_B   = e_j B
  create_left,       // {a_j+ rho}_B  = left-deriv_j B
  annihilate_right,  // {rho a_j}_B   = B right-deriv w.r.t. e'*_j
  create_right,      // {rho a_j+}_B  = B e'*_j
};

BFunction apply_correspondence(const BFunction& b, CorrespondenceSide side, int mode_j);

/// Right side of the B master equation as a linear map on B: divergence-form
/// drift and interaction terms assembled from the correspondence rules, equal
/// to {-i[H, rho]}_B.
BFunction master_rhs(const BFunction& b, const ModelSpec& spec);

/// Adaptive dopri5 integration (rtol 1e-10) of the linear coefficient system
/// on the spec's time grid.
std::vector<BFunction> propagate_b(const BFunction& b0, const ModelSpec& spec);

}  // namespace gbs
