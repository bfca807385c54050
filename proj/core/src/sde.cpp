#include "gbs/sde.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "gbs/rng.hpp"

namespace gbs {

namespace {

Eigen::MatrixXcd build_w(const ModelSpec& spec) {
  const int M = spec.modes;
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(M * M, M * M);
  for (int p = 0; p < M; ++p)
    for (int q = 0; q < M; ++q)
      for (int r = 0; r < M; ++r)
        for (int s = 0; s < M; ++s) w(p * M + r, q * M + s) = spec.v(p, q, r, s);
  return w;
}

Matrix unvec(const Eigen::VectorXcd& v, int M) {
  Matrix o(M, M);
  for (int p = 0; p < M; ++p)
    for (int r = 0; r < M; ++r) o(p, r) = v(p * M + r);
  return o;
}

}  // namespace

PairDecomposition decompose_potential(const ModelSpec& spec) {
  const int M = spec.modes;
  PairDecomposition out;
  if (!spec.has_interaction()) return out;

  Eigen::MatrixXcd w = build_w(spec);
  const double scale = std::max(1.0, w.norm());
  if ((w - w.transpose()).norm() > 1e-10 * scale)
    throw std::invalid_argument("decompose_potential: W_(pr),(qs) is not complex-symmetric");

  const double drop = 1e-12 * scale;
  if (w.imag().norm() <= 1e-12 * scale) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w.real());
    for (int g = 0; g < w.rows(); ++g) {
      double omega = es.eigenvalues()(g);
      if (std::abs(omega) <= drop) continue;
      out.channels.push_back(
          {Complex{omega, 0.0}, unvec(es.eigenvectors().col(g).cast<Complex>(), M)});
    }
  } else {
    // Takagi via SVD: W = U S V^H, Z = U^H conj(V) unitary; W = (U Z^{1/2}) S (U Z^{1/2})^T
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::MatrixXcd z = svd.matrixU().adjoint() * svd.matrixV().conjugate();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ez(z);
    Eigen::VectorXcd sq = ez.eigenvalues();
    for (int k = 0; k < sq.size(); ++k) sq(k) = std::sqrt(sq(k));
    Eigen::MatrixXcd zsqrt =
        ez.eigenvectors() * sq.asDiagonal() * ez.eigenvectors().inverse();
    Eigen::MatrixXcd q = svd.matrixU() * zsqrt;
    for (int g = 0; g < w.rows(); ++g) {
      double omega = svd.singularValues()(g);
      if (omega <= drop) continue;
      out.channels.push_back({Complex{omega, 0.0}, unvec(q.col(g), M)});
    }
  }

  Eigen::MatrixXcd rec = Eigen::MatrixXcd::Zero(M * M, M * M);
  for (const auto& ch : out.channels) {
    Eigen::VectorXcd v(M * M);
    for (int p = 0; p < M; ++p)
      for (int r = 0; r < M; ++r) v(p * M + r) = ch.coupling(p, r);
    rec += ch.omega * (v * v.transpose());
  }
  out.reconstruction_residual = (rec - w).norm() / scale;
  if (out.reconstruction_residual > 1e-10)
    throw std::runtime_error("decompose_potential: reconstruction residual " +
                             std::to_string(out.reconstruction_residual));
  return out;
}

Matrix drift_matrix(const ModelSpec& spec) {
  const int M = spec.modes;
  const Complex i_unit{0.0, 1.0};
  Matrix k = Matrix::Zero(M, M);
  if (spec.has_interaction()) {
    for (int p = 0; p < M; ++p)
      for (int q = 0; q < M; ++q) {
        Complex acc{};
        for (int l = 0; l < M; ++l) acc += spec.v(l, p, q, l);
        k(p, q) = acc;
      }
  }
  return -i_unit * spec.hopping + (0.25 * i_unit) * k;
}

std::vector<Matrix> noise_matrices(const PairDecomposition& decomp) {
  std::vector<Matrix> out;
  out.reserve(decomp.channels.size());
  for (const auto& ch : decomp.channels) {
    Complex root = std::sqrt(ch.omega / Complex{0.0, 2.0});
    out.push_back(root * ch.coupling);
  }
  return out;
}

Matrix ito_drift_matrix(const Matrix& drift, std::span<const Matrix> noises) {
  Matrix out = drift;
  for (const auto& b : noises) out += 0.5 * (b * b);
  return out;
}

namespace {

// increment dY = drift*Y*dt + sum_g dw[g] * noises[g] * Y, accumulated per
// (row, column) so columns propagate independently at the bit level
void linear_increment(const Matrix& y, const Matrix& drift, std::span<const Matrix> noises,
                      double dt, std::span<const double> dw, Matrix& out) {
  const int rows = static_cast<int>(y.rows());
  const int cols = static_cast<int>(y.cols());
  out.resize(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int p = 0; p < rows; ++p) {
      Complex acc{};
      for (int k = 0; k < rows; ++k) acc += drift(p, k) * y(k, j);
      acc *= dt;
      for (size_t g = 0; g < noises.size(); ++g) {
        Complex nacc{};
        for (int k = 0; k < rows; ++k) nacc += noises[g](p, k) * y(k, j);
        acc += dw[g] * nacc;
      }
      out(p, j) = acc;
    }
  }
}

}  // namespace

void heun_step(Matrix& state, const Matrix& drift, std::span<const Matrix> noises, double dt,
               std::span<const double> dw) {
  if (dt <= 0.0) throw std::invalid_argument("heun_step: dt must be positive");
  Matrix k1, k2, pred;
  linear_increment(state, drift, noises, dt, dw, k1);
  pred = state + k1;
  linear_increment(pred, drift, noises, dt, dw, k2);
  state += 0.5 * (k1 + k2);
}

void euler_ito_step(Matrix& state, const Matrix& ito_drift, std::span<const Matrix> noises,
                    double dt, std::span<const double> dw) {
  if (dt <= 0.0) throw std::invalid_argument("euler_ito_step: dt must be positive");
  Matrix k1;
  linear_increment(state, ito_drift, noises, dt, dw, k1);
  state += k1;
}

const char* scheme_name(Scheme s) {
  return s == Scheme::stratonovich_heun ? "stratonovich" : "ito";
}

namespace {

int thread_count_from_env() {
  if (const char* env = std::getenv("GBSIM_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return std::min(n, 64);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

}  // namespace

TrajectoryEnsemble simulate_ensemble(const ModelSpec& spec, int n_traj, double dt, Scheme scheme,
                                     std::uint64_t master_seed) {
  if (n_traj < 1) throw std::invalid_argument("simulate_ensemble: n_traj must be >= 1");
  if (dt <= 0.0) throw std::invalid_argument("simulate_ensemble: dt must be positive");
  const int M = spec.modes;

  PairDecomposition decomp = decompose_potential(spec);
  std::vector<Matrix> noises = noise_matrices(decomp);
  Matrix drift = drift_matrix(spec);
  Matrix drift_ito = ito_drift_matrix(drift, noises);
  const int nch = static_cast<int>(noises.size());

  TrajectoryEnsemble ens;
  ens.scheme = scheme;
  ens.dt = dt;
  ens.times = spec.time_grid;
  ens.modes = M;
  ens.n_channels = nch;
  ens.trajectories.resize(static_cast<size_t>(n_traj));
  ens.seeds.resize(static_cast<size_t>(n_traj));

  // per-interval substep counts chosen once so grid times are hit exactly
  struct Leg {
    int steps;
    double h;
  };
  std::vector<Leg> legs;
  for (size_t i = 1; i < ens.times.size(); ++i) {
    double span = ens.times[i] - ens.times[i - 1];
    int steps = std::max(1, static_cast<int>(std::llround(span / dt)));
    legs.push_back({steps, span / steps});
  }

  auto run_one = [&](int k) {
    std::uint64_t seed = derived_seed(master_seed, static_cast<std::uint64_t>(k));
    ens.seeds[static_cast<size_t>(k)] = seed;
    GaussianStream stream(seed);
    std::vector<double> dx(static_cast<size_t>(nch)), dy(static_cast<size_t>(nch));
    Matrix mu = Matrix::Identity(M, M);
    Matrix mp = Matrix::Identity(M, M);
    auto& snaps = ens.trajectories[static_cast<size_t>(k)];
    snaps.reserve(ens.times.size());
    snaps.push_back({mu, mp, ens.times[0]});
    for (size_t leg = 0; leg < legs.size(); ++leg) {
      const double h = legs[leg].h;
      const double root_h = std::sqrt(h);
      for (int s = 0; s < legs[leg].steps; ++s) {
        stream.fill(dx, root_h);
        stream.fill(dy, root_h);
        if (scheme == Scheme::stratonovich_heun) {
          heun_step(mu, drift, noises, h, dx);
          heun_step(mp, drift, noises, h, dy);
        } else {
          euler_ito_step(mu, drift_ito, noises, h, dx);
          euler_ito_step(mp, drift_ito, noises, h, dy);
        }
      }
      snaps.push_back({mu, mp, ens.times[leg + 1]});
    }
  };

  const int nthreads = std::min(thread_count_from_env(), n_traj);
  if (nthreads <= 1) {
    for (int k = 0; k < n_traj; ++k) run_one(k);
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (;;) {
        int k = next.fetch_add(1);
        if (k >= n_traj) return;
        run_one(k);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return ens;
}

namespace {

void require_index(const TrajectoryEnsemble& ens, int time_index) {
  if (time_index < 0 || static_cast<size_t>(time_index) >= ens.times.size())
    throw std::invalid_argument("time index out of range");
  if (ens.trajectories.empty()) throw std::invalid_argument("empty ensemble");
}

}  // namespace

ReconstructedState reconstruct_rho(const TrajectoryEnsemble& ens, const BFunction& b0,
                                   int time_index) {
  require_index(ens, time_index);
  const int dim = 1 << ens.modes;
  Matrix sum = Matrix::Zero(dim, dim);
  Eigen::MatrixXd sum_re2 = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd sum_im2 = Eigen::MatrixXd::Zero(dim, dim);
  const auto n = static_cast<double>(ens.trajectories.size());
  for (const auto& traj : ens.trajectories) {
    const auto& snap = traj[static_cast<size_t>(time_index)];
    Matrix lam = reconstruct_operator(b0, snap.unprimed, snap.primed);
    sum += lam;
    sum_re2 += lam.real().cwiseProduct(lam.real());
    sum_im2 += lam.imag().cwiseProduct(lam.imag());
  }
  ReconstructedState out;
  out.samples = static_cast<int>(ens.trajectories.size());
  out.mean = sum / n;
  out.se_real.resize(dim, dim);
  out.se_imag.resize(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      double vr = std::max(0.0, sum_re2(i, j) / n - out.mean(i, j).real() * out.mean(i, j).real());
      double vi = std::max(0.0, sum_im2(i, j) / n - out.mean(i, j).imag() * out.mean(i, j).imag());
      out.se_real(i, j) = std::sqrt(vr / n);
      out.se_imag(i, j) = std::sqrt(vi / n);
    }
  return out;
}

std::vector<ObservableEstimate> estimate_observables(const TrajectoryEnsemble& ens,
                                                     const BFunction& b0,
                                                     std::span<const Matrix> obs,
                                                     int time_index) {
  require_index(ens, time_index);
  const size_t n = ens.trajectories.size();
  const size_t nobs = obs.size();
  std::vector<std::vector<Complex>> x(nobs, std::vector<Complex>(n));
  std::vector<Complex> tr(n);
  for (size_t k = 0; k < n; ++k) {
    const auto& snap = ens.trajectories[k][static_cast<size_t>(time_index)];
    Matrix lam = reconstruct_operator(b0, snap.unprimed, snap.primed);
    tr[k] = lam.trace();
    for (size_t o = 0; o < nobs; ++o) x[o][k] = (lam * obs[o]).trace();
  }
  auto mean_se = [&](const std::vector<Complex>& v) {
    Complex mu{};
    for (auto c : v) mu += c;
    mu /= static_cast<double>(v.size());
    double vr = 0.0, vi = 0.0;
    for (auto c : v) {
      vr += (c.real() - mu.real()) * (c.real() - mu.real());
      vi += (c.imag() - mu.imag()) * (c.imag() - mu.imag());
    }
    double nn = static_cast<double>(v.size());
    return std::pair<Complex, Complex>{mu,
                                       Complex{std::sqrt(vr / nn / nn), std::sqrt(vi / nn / nn)}};
  };
  auto [tr_mean, tr_se] = mean_se(tr);
  bool tr_ok = std::abs(tr_mean) > 5.0 * std::abs(tr_se);

  std::vector<ObservableEstimate> out(nobs);
  std::vector<Complex> y(n);
  for (size_t o = 0; o < nobs; ++o) {
    auto [mu, se] = mean_se(x[o]);
    ObservableEstimate est;
    est.mean = mu;
    est.se = se;
    est.trace_mean = tr_mean;
    est.trace_se = tr_se;
    est.ratio_reliable = tr_ok;
    if (tr_ok) {
      Complex r = mu / tr_mean;
      // first-order (delta method) fluctuations of the ratio
      for (size_t k = 0; k < n; ++k) y[k] = (x[o][k] - r * tr[k]) / tr_mean;
      auto [ym, yse] = mean_se(y);
      (void)ym;
      est.ratio = r;
      est.ratio_se = yse;
    } else {
      est.ratio = Complex{};
      est.ratio_se = Complex{};
    }
    out[o] = est;
  }
  return out;
}

ObservableEstimate estimate_observable(const TrajectoryEnsemble& ens, const BFunction& b0,
                                       const Matrix& obs, int time_index) {
  return estimate_observables(ens, b0, std::span<const Matrix>(&obs, 1), time_index)[0];
}

}  // namespace gbs
