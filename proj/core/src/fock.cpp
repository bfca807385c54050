#include "gbs/fock.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <stdexcept>

namespace gbs {

FockSpace::FockSpace(int modes) : modes_(modes) {
  if (modes < 1 || modes > 12) throw std::invalid_argument("FockSpace: modes must be in [1, 12]");
}

namespace {

inline int occ_bit(int basis, int mode, int M) { return (basis >> (M - mode)) & 1; }

// (-1)^(n_1+...+n_{j-1})
inline int jw_sign(int basis, int mode, int M) {
  int mask = basis >> (M - mode + 1);
  return (std::popcount(static_cast<unsigned>(mask)) & 1) ? -1 : 1;
}

}  // namespace

Matrix FockSpace::annihilation(int mode) const {
  if (mode < 1 || mode > modes_) throw std::invalid_argument("annihilation: bad mode");
  Matrix a = Matrix::Zero(dim(), dim());
  for (int n = 0; n < dim(); ++n) {
    if (!occ_bit(n, mode, modes_)) continue;
    int m = n & ~(1 << (modes_ - mode));
    a(m, n) = jw_sign(n, mode, modes_);
  }
  return a;
}

Matrix FockSpace::creation(int mode) const { return annihilation(mode).adjoint(); }

Matrix FockSpace::number_op(int mode) const {
  if (mode < 1 || mode > modes_) throw std::invalid_argument("number_op: bad mode");
  Matrix n = Matrix::Zero(dim(), dim());
  for (int b = 0; b < dim(); ++b) n(b, b) = occ_bit(b, mode, modes_);
  return n;
}

Matrix FockSpace::total_number() const {
  Matrix n = Matrix::Zero(dim(), dim());
  for (int b = 0; b < dim(); ++b) n(b, b) = std::popcount(static_cast<unsigned>(b));
  return n;
}

Matrix FockSpace::identity() const { return Matrix::Identity(dim(), dim()); }

int FockSpace::basis_index(const std::string& occupation) const {
  if (static_cast<int>(occupation.size()) != modes_)
    throw std::invalid_argument("basis_index: occupation length mismatch");
  int n = 0;
  for (int j = 1; j <= modes_; ++j) {
    char c = occupation[static_cast<size_t>(j - 1)];
    if (c != '0' && c != '1') throw std::invalid_argument("basis_index: bad occupation char");
    if (c == '1') n |= 1 << (modes_ - j);
  }
  return n;
}

int FockSpace::occupation_of(int basis, int mode) const { return occ_bit(basis, mode, modes_); }

Matrix build_hamiltonian(const ModelSpec& spec) {
  FockSpace fs(spec.modes);
  const int M = spec.modes;
  Matrix H = Matrix::Zero(fs.dim(), fs.dim());
  std::vector<Matrix> ann, cre;
  ann.reserve(M);
  cre.reserve(M);
  for (int j = 1; j <= M; ++j) {
    ann.push_back(fs.annihilation(j));
    cre.push_back(fs.creation(j));
  }
  for (int p = 0; p < M; ++p)
    for (int q = 0; q < M; ++q) {
      Complex t = spec.hopping(p, q);
      if (t != Complex{}) H += t * (cre[p] * ann[q]);
    }
  if (spec.has_interaction()) {
    for (int p = 0; p < M; ++p)
      for (int q = 0; q < M; ++q)
        for (int r = 0; r < M; ++r)
          for (int s = 0; s < M; ++s) {
            Complex v = spec.v(p, q, r, s);
            if (v != Complex{}) H -= 0.25 * v * (cre[p] * cre[q] * ann[r] * ann[s]);
          }
  }
  double scale = std::max(1.0, H.norm());
  if ((H - H.adjoint()).norm() > 1e-12 * scale)
    throw std::invalid_argument("build_hamiltonian: result not Hermitian; rejecting spec");
  return H;
}

std::vector<Matrix> evolve_exact(const ModelSpec& spec, const Matrix& rho0) {
  Matrix H = build_hamiltonian(spec);
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  const auto& lam = es.eigenvalues();
  const Matrix& U = es.eigenvectors();
  Matrix rho_eig = U.adjoint() * rho0 * U;
  std::vector<Matrix> out;
  out.reserve(spec.time_grid.size());
  for (double t : spec.time_grid) {
    Matrix rt(lam.size(), lam.size());
    for (int i = 0; i < lam.size(); ++i)
      for (int j = 0; j < lam.size(); ++j)
        rt(i, j) = std::exp(Complex{0.0, -(lam(i) - lam(j)) * t}) * rho_eig(i, j);
    out.push_back(U * rt * U.adjoint());
  }
  return out;
}

Matrix evolve_exact_at(const ModelSpec& spec, const Matrix& rho0, double t) {
  ModelSpec s = spec;
  s.time_grid = {0.0, std::abs(t) > 0 ? t : 1.0};
  auto r = evolve_exact(s, rho0);
  return std::abs(t) > 0 ? r[1] : r[0];
}

Complex expectation(const Matrix& rho, const Matrix& obs) {
  if (rho.rows() != obs.rows() || rho.cols() != obs.cols())
    throw std::invalid_argument("expectation: dimension mismatch");
  return (rho * obs).trace();
}

void require_valid_density(const Matrix& rho, int modes) {
  FockSpace fs(modes);
  if (rho.rows() != fs.dim() || rho.cols() != fs.dim())
    throw std::invalid_argument("density matrix: wrong dimension for mode count");
  double scale = std::max(1.0, rho.norm());
  if ((rho - rho.adjoint()).norm() > 1e-10 * scale)
    throw std::invalid_argument("density matrix: not Hermitian");
  if (std::abs(rho.trace() - Complex{1.0, 0.0}) > 1e-10)
    throw std::invalid_argument("density matrix: trace != 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("density matrix: not positive semidefinite");
  for (int n = 0; n < fs.dim(); ++n)
    for (int m = 0; m < fs.dim(); ++m) {
      if (std::popcount(static_cast<unsigned>(n)) != std::popcount(static_cast<unsigned>(m)) &&
          std::abs(rho(n, m)) > 1e-10 * scale)
        throw std::invalid_argument("density matrix: not number-conserving");
    }
}

Matrix initial_density(const ModelSpec& spec) {
  FockSpace fs(spec.modes);
  if (std::holds_alternative<std::string>(spec.initial_state)) {
    int idx = fs.basis_index(std::get<std::string>(spec.initial_state));
    Matrix rho = Matrix::Zero(fs.dim(), fs.dim());
    rho(idx, idx) = 1.0;
    return rho;
  }
  Matrix rho = std::get<Matrix>(spec.initial_state);
  require_valid_density(rho, spec.modes);
  return rho;
}

// --- Grassmann-amplitude vectors -----------------------------------------

namespace {

void require_components(std::span<const GrassmannNumber> g, int modes) {
  if (static_cast<int>(g.size()) != modes)
    throw std::invalid_argument("coherent state: need one component per mode");
  for (const auto& gi : g) {
    detail::require_same_space(g[0], gi);
    if (parity(gi) != Parity::odd && !gi.is_zero())
      throw std::invalid_argument(
          "coherent state: components must belong to the odd sector");
  }
}

}  // namespace

GrassmannFockVector coherent_ket(std::span<const GrassmannNumber> g, int modes) {
  require_components(g, modes);
  FockSpace fs(modes);
  auto space = g[0].space();
  GrassmannFockVector ket{space, modes, {}};
  ket.amplitudes.assign(static_cast<size_t>(fs.dim()), GrassmannNumber::zero(space));
  ket.amplitudes[0] = GrassmannNumber::scalar(space, Complex{1.0, 0.0});
  // apply (1 - g_p a_p+) for p = M..1 (rightmost factor acts first)
  for (int p = modes; p >= 1; --p) {
    GrassmannFockVector next = ket;
    for (int n = 0; n < fs.dim(); ++n) {
      if (ket.amplitudes[static_cast<size_t>(n)].is_zero()) continue;
      if (occ_bit(n, p, modes)) continue;
      int tgt = n | (1 << (modes - p));
      double sgn = -jw_sign(n, p, modes);  // the -g_p a_p+ term
      next.amplitudes[static_cast<size_t>(tgt)] +=
          sgn * (g[static_cast<size_t>(p - 1)] * involute(ket.amplitudes[static_cast<size_t>(n)]));
    }
    ket = std::move(next);
  }
  return ket;
}

GrassmannFockVector coherent_bra(std::span<const GrassmannNumber> h, int modes) {
  require_components(h, modes);
  FockSpace fs(modes);
  auto space = h[0].space();
  GrassmannFockVector bra{space, modes, {}};
  bra.amplitudes.assign(static_cast<size_t>(fs.dim()), GrassmannNumber::zero(space));
  for (int n = 0; n < fs.dim(); ++n) {
    GrassmannNumber prod = GrassmannNumber::scalar(space, Complex{1.0, 0.0});
    for (int j = 1; j <= modes; ++j) {
      if (occ_bit(n, j, modes)) prod = prod * h[static_cast<size_t>(j - 1)];
    }
    bra.amplitudes[static_cast<size_t>(n)] = std::move(prod);
  }
  return bra;
}

GrassmannFockVector apply_annihilation(const GrassmannFockVector& ket, int mode) {
  FockSpace fs(ket.modes);
  GrassmannFockVector out{ket.space, ket.modes, {}};
  out.amplitudes.assign(ket.amplitudes.size(), GrassmannNumber::zero(ket.space));
  for (int n = 0; n < fs.dim(); ++n) {
    if (!occ_bit(n, mode, ket.modes)) continue;
    int m = n & ~(1 << (ket.modes - mode));
    double sgn = jw_sign(n, mode, ket.modes);
    out.amplitudes[static_cast<size_t>(m)] +=
        sgn * involute(ket.amplitudes[static_cast<size_t>(n)]);
  }
  return out;
}

GrassmannFockVector apply_creation(const GrassmannFockVector& ket, int mode) {
  FockSpace fs(ket.modes);
  GrassmannFockVector out{ket.space, ket.modes, {}};
  out.amplitudes.assign(ket.amplitudes.size(), GrassmannNumber::zero(ket.space));
  for (int n = 0; n < fs.dim(); ++n) {
    if (occ_bit(n, mode, ket.modes)) continue;
    int m = n | (1 << (ket.modes - mode));
    double sgn = jw_sign(n, mode, ket.modes);
    out.amplitudes[static_cast<size_t>(m)] +=
        sgn * involute(ket.amplitudes[static_cast<size_t>(n)]);
  }
  return out;
}

GrassmannFockVector bra_apply_annihilation(const GrassmannFockVector& bra, int mode) {
  // <T| x a = jw(T,i) <T ∪ {i}| x̄ for i not in T
  FockSpace fs(bra.modes);
  GrassmannFockVector out{bra.space, bra.modes, {}};
  out.amplitudes.assign(bra.amplitudes.size(), GrassmannNumber::zero(bra.space));
  for (int n = 0; n < fs.dim(); ++n) {
    if (occ_bit(n, mode, bra.modes)) continue;
    int m = n | (1 << (bra.modes - mode));
    double sgn = jw_sign(n, mode, bra.modes);
    out.amplitudes[static_cast<size_t>(m)] +=
        sgn * involute(bra.amplitudes[static_cast<size_t>(n)]);
  }
  return out;
}

GrassmannFockVector bra_apply_creation(const GrassmannFockVector& bra, int mode) {
  // <T| x a+ = jw(T,i) <T \ {i}| x̄ for i in T
  FockSpace fs(bra.modes);
  GrassmannFockVector out{bra.space, bra.modes, {}};
  out.amplitudes.assign(bra.amplitudes.size(), GrassmannNumber::zero(bra.space));
  for (int n = 0; n < fs.dim(); ++n) {
    if (!occ_bit(n, mode, bra.modes)) continue;
    int m = n & ~(1 << (bra.modes - mode));
    double sgn = jw_sign(n, mode, bra.modes);
    out.amplitudes[static_cast<size_t>(m)] +=
        sgn * involute(bra.amplitudes[static_cast<size_t>(n)]);
  }
  return out;
}

std::vector<GrassmannNumber> dyadic(const GrassmannFockVector& ket,
                                    const GrassmannFockVector& bra) {
  if (ket.modes != bra.modes) throw std::invalid_argument("dyadic: mode mismatch");
  FockSpace fs(ket.modes);
  const int dim = fs.dim();
  std::vector<GrassmannNumber> out;
  out.reserve(static_cast<size_t>(dim) * dim);
  for (int n = 0; n < dim; ++n) {
    bool odd_row = std::popcount(static_cast<unsigned>(n)) & 1;
    for (int m = 0; m < dim; ++m) {
      const auto& b = bra.amplitudes[static_cast<size_t>(m)];
      out.push_back(ket.amplitudes[static_cast<size_t>(n)] * (odd_row ? involute(b) : b));
    }
  }
  return out;
}

}  // namespace gbs
