#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gbs/brep.hpp"
#include "gbs/model.hpp"

namespace gbs {

/// One noise channel of the pair-potential factorization
/// V_pqrs = sum_gamma omega_gamma O_pr O_qs.
struct NoiseChannel {
  Complex omega;
  Matrix coupling;  // O, modes x modes
};

struct PairDecomposition {
  std::vector<NoiseChannel> channels;
  double reconstruction_residual = 0.0;  // relative Frobenius
};

/// Factorizes the (antisymmetrized) pair potential. W_(pr),(qs) = V_pqrs must
/// be complex-symmetric; real-symmetric W goes through a real
/// eigendecomposition (real signed omegas), genuinely complex W through a
/// Takagi factorization. Channels below 1e-12*||W|| are dropped; a
/// reconstruction residual above 1e-10 rejects the spec.
PairDecomposition decompose_potential(const ModelSpec& spec);

/// Drift matrix of the propagator equations: A = -iT + (i/4) K with
/// K_pq = sum_l V_lpql.
Matrix drift_matrix(const ModelSpec& spec);

/// Noise matrices B_gamma = sqrt(omega_gamma / 2i) * O_gamma (principal
/// square-root branch; the channel-global phase is immaterial under
/// sign-symmetric increments).
std::vector<Matrix> noise_matrices(const PairDecomposition& decomp);

/// Drift of the equivalent Ito SDE: A + 1/2 sum_gamma B_gamma^2. For an
/// antisymmetrized interaction this collapses to -iT.
Matrix ito_drift_matrix(const Matrix& drift, std::span<const Matrix> noises);

/// One Heun (predictor-corrector) step of dY = A Y dt + sum_g B_g Y dW_g in
/// the Stratonovich interpretation. Works on a modes x L state; columns are
/// propagated independently at the bit level.
void heun_step(Matrix& state, const Matrix& drift, std::span<const Matrix> noises, double dt,
               std::span<const double> dw);

/// One Euler-Maruyama step of the drift-corrected Ito form (pass
/// ito_drift_matrix as `ito_drift`).
void euler_ito_step(Matrix& state, const Matrix& ito_drift, std::span<const Matrix> noises,
                    double dt, std::span<const double> dw);

enum class Scheme { stratonovich_heun, ito_euler };

const char* scheme_name(Scheme s);

/// Unprimed/primed propagator pair at one time; both start at the identity
/// (g(0) = e, g'(0) = e').
struct PropagatorPair {
  Matrix unprimed;
  Matrix primed;
  double time = 0.0;
};

/// Independent trajectories sampled on the spec's time grid. Trajectory k's
/// Wiener streams are seeded with derived_seed(master_seed, k); per step the
/// draw order is dX[0..n_channels) then dY[0..n_channels). Results are
/// byte-identical for a given (master_seed, n_traj, dt) regardless of thread
/// count (GBSIM_THREADS governs parallelism only).
struct TrajectoryEnsemble {
  std::vector<std::vector<PropagatorPair>> trajectories;  // [traj][grid index]
  std::vector<std::uint64_t> seeds;
  Scheme scheme = Scheme::stratonovich_heun;
  double dt = 1e-3;
  std::vector<double> times;
  int modes = 0;
  int n_channels = 0;
};

TrajectoryEnsemble simulate_ensemble(const ModelSpec& spec, int n_traj, double dt, Scheme scheme,
                                     std::uint64_t master_seed);

struct ReconstructedState {
  Matrix mean;
  Eigen::MatrixXd se_real;
  Eigen::MatrixXd se_imag;
  int samples = 0;
};

/// Monte Carlo reconstruction of the density operator at a grid index:
/// trajectory-wise Lambda = reconstruct_operator(B0, Mu, Mp), averaged with
/// elementwise standard errors.
ReconstructedState reconstruct_rho(const TrajectoryEnsemble& ensemble, const BFunction& b0,
                                   int time_index);

struct ObservableEstimate {
  Complex mean;       // Tr(rho_hat obs), raw average
  Complex se;         // componentwise standard error of the mean
  Complex ratio;      // Tr(rho obs)/Tr(rho) ratio estimator
  Complex ratio_se;   // delta-method standard error
  bool ratio_reliable = true;
  Complex trace_mean; // Tr(rho_hat)
  Complex trace_se;
};

ObservableEstimate estimate_observable(const TrajectoryEnsemble& ensemble, const BFunction& b0,
                                       const Matrix& obs, int time_index);

std::vector<ObservableEstimate> estimate_observables(const TrajectoryEnsemble& ensemble,
                                                     const BFunction& b0,
                                                     std::span<const Matrix> obs,
                                                     int time_index);

}  // namespace gbs
