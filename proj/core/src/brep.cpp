#include "gbs/brep.hpp"

#include <Eigen/LU>
#include <boost/numeric/odeint.hpp>
#include <map>
#include <mutex>
#include <stdexcept>

namespace gbs {

namespace {

struct BRepTables {
  GeneratorSpace::Ptr space;
  int modes = 0;
  int dim = 0;
  std::vector<int> written_order;
  std::vector<GrassmannNumber> basis_dyadic;  // |e><e'*| entries, row-major
  Matrix forward;                             // monomial coeffs -> vec(rho)
  Eigen::PartialPivLU<Matrix> forward_lu;
};

Matrix integrate_against_dyadic(const GrassmannNumber& b,
                                const std::vector<GrassmannNumber>& entries, int dim,
                                std::span<const int> order) {
  Matrix rho(dim, dim);
  for (int n = 0; n < dim; ++n) {
    for (int m = 0; m < dim; ++m) {
      GrassmannNumber val =
          berezin_integrate(b * entries[static_cast<size_t>(n) * dim + m], order);
      bool clean = true;
      val.for_each_term([&](std::uint32_t mask, Complex) {
        if (mask != 0) clean = false;
      });
      if (!clean)
        throw std::logic_error("b integration left generator content; convention bug");
      rho(n, m) = val.coefficient(0);
    }
  }
  return rho;
}

std::shared_ptr<const BRepTables> get_tables(int modes) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const BRepTables>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(modes);
  if (it != cache.end()) return it->second;

  auto t = std::make_shared<BRepTables>();
  t->modes = modes;
  t->dim = 1 << modes;
  t->space = GeneratorSpace::b_rep(modes);
  t->written_order = b_written_order(modes);

  std::vector<GrassmannNumber> e, h;
  for (int j = 0; j < modes; ++j) e.push_back(GrassmannNumber::generator(t->space, j));
  for (int j = 0; j < modes; ++j) h.push_back(GrassmannNumber::generator(t->space, modes + j));
  t->basis_dyadic = dyadic(coherent_ket(e, modes), coherent_bra(h, modes));

  const int ncoef = 1 << (2 * modes);
  t->forward = Matrix::Zero(t->dim * t->dim, ncoef);
  for (int mask = 0; mask < ncoef; ++mask) {
    GrassmannNumber mono = GrassmannNumber::monomial(t->space, static_cast<std::uint32_t>(mask),
                                                     Complex{1.0, 0.0});
    Matrix rho = integrate_against_dyadic(mono, t->basis_dyadic, t->dim, t->written_order);
    for (int n = 0; n < t->dim; ++n)
      for (int m = 0; m < t->dim; ++m) t->forward(n * t->dim + m, mask) = rho(n, m);
  }
  t->forward_lu = Eigen::PartialPivLU<Matrix>(t->forward);
  auto out = std::shared_ptr<const BRepTables>(t);
  cache.emplace(modes, out);
  return out;
}

void require_b(const BFunction& b) {
  if (b.modes < 1) throw std::invalid_argument("BFunction: bad mode count");
  if (!b.value.space()->same_as(*GeneratorSpace::b_rep(b.modes)))
    throw std::invalid_argument("BFunction: value not over the b_rep space");
}

}  // namespace

BFunction b_zero(int modes) {
  return BFunction{GrassmannNumber::zero(GeneratorSpace::b_rep(modes)), modes};
}

std::vector<int> b_written_order(int modes) {
  std::vector<int> order;
  order.reserve(2 * static_cast<size_t>(modes));
  for (int j = 0; j < modes; ++j) order.push_back(modes + j);  // de'*_1 .. de'*_M
  for (int j = modes - 1; j >= 0; --j) order.push_back(j);     // de_M .. de_1
  return order;
}

Matrix reconstruct_operator(const BFunction& b, const Matrix& mu, const Matrix& mp) {
  require_b(b);
  const int M = b.modes;
  if (mu.rows() != M || mu.cols() != M || mp.rows() != M || mp.cols() != M)
    throw std::invalid_argument("reconstruct_operator: propagators must be modes x modes");
  auto space = b.value.space();
  std::vector<GrassmannNumber> g, h;
  g.reserve(static_cast<size_t>(M));
  h.reserve(static_cast<size_t>(M));
  for (int p = 0; p < M; ++p) {
    GrassmannNumber gp = GrassmannNumber::zero(space);
    GrassmannNumber hp = GrassmannNumber::zero(space);
    for (int q = 0; q < M; ++q) {
      gp.add_coefficient(std::uint32_t{1} << q, mu(p, q));
      hp.add_coefficient(std::uint32_t{1} << (M + q), std::conj(mp(p, q)));
    }
    g.push_back(std::move(gp));
    h.push_back(std::move(hp));
  }
  auto entries = dyadic(coherent_ket(g, M), coherent_bra(h, M));
  auto order = b_written_order(M);
  return integrate_against_dyadic(b.value, entries, 1 << M, order);
}

Matrix rho_from_b(const BFunction& b) {
  require_b(b);
  auto t = get_tables(b.modes);
  return integrate_against_dyadic(b.value, t->basis_dyadic, t->dim, t->written_order);
}

BFunction b_from_rho(const Matrix& rho, int modes) {
  auto t = get_tables(modes);
  if (rho.rows() != t->dim || rho.cols() != t->dim)
    throw std::invalid_argument("b_from_rho: operator dimension mismatch");
  Eigen::VectorXcd vec(t->dim * t->dim);
  for (int n = 0; n < t->dim; ++n)
    for (int m = 0; m < t->dim; ++m) vec(n * t->dim + m) = rho(n, m);
  Eigen::VectorXcd sol = t->forward_lu.solve(vec);
  double resid = (t->forward * sol - vec).norm();
  if (resid > 1e-10 * std::max(1.0, vec.norm()))
    throw std::runtime_error("b_from_rho: inversion residual " + std::to_string(resid));
  BFunction b = b_zero(modes);
  for (int mask = 0; mask < sol.size(); ++mask) {
    if (sol(mask) != Complex{})
      b.value.set_coefficient(static_cast<std::uint32_t>(mask), sol(mask));
  }
  return b;
}

BFunction apply_correspondence(const BFunction& b, CorrespondenceSide side, int mode_j) {
  require_b(b);
  if (mode_j < 1 || mode_j > b.modes)
    throw std::invalid_argument("apply_correspondence: bad mode");
  auto space = b.value.space();
  const int j = mode_j - 1;
  switch (side) {
    case CorrespondenceSide::annihilate_left:
      return {GrassmannNumber::generator(space, j) * b.value, b.modes};
    case CorrespondenceSide::create_left:
      return {formal_left_derivative(b.value, j), b.modes};
    case CorrespondenceSide::annihilate_right:
      return {formal_right_derivative(b.value, b.modes + j), b.modes};
    case CorrespondenceSide::create_right:
      return {b.value * GrassmannNumber::generator(space, b.modes + j), b.modes};
  }
  throw std::logic_error("apply_correspondence: bad side");
}

BFunction master_rhs(const BFunction& b, const ModelSpec& spec) {
  require_b(b);
  if (spec.modes != b.modes) throw std::invalid_argument("master_rhs: mode count mismatch");
  const int M = b.modes;
  auto space = b.value.space();
  GrassmannNumber out = GrassmannNumber::zero(space);
  const Complex i_unit{0.0, 1.0};

  std::vector<GrassmannNumber> e, h;
  for (int k = 0; k < M; ++k) e.push_back(GrassmannNumber::generator(space, k));
  for (int k = 0; k < M; ++k) h.push_back(GrassmannNumber::generator(space, M + k));

  for (int p = 0; p < M; ++p) {
    for (int q = 0; q < M; ++q) {
      Complex t = spec.hopping(p, q);
      if (t == Complex{}) continue;
      // -i T_pq d_p (e_q B)  and  +i T_pq (B e'*_p) d'_{q*}
      out += (-i_unit * t) * formal_left_derivative(e[static_cast<size_t>(q)] * b.value, p);
      out += (i_unit * t) *
             formal_right_derivative(b.value * h[static_cast<size_t>(p)], M + q);
    }
  }
  if (spec.has_interaction()) {
    for (int p = 0; p < M; ++p)
      for (int q = 0; q < M; ++q)
        for (int r = 0; r < M; ++r)
          for (int s = 0; s < M; ++s) {
            Complex v = spec.v(p, q, r, s);
            if (v == Complex{}) continue;
            GrassmannNumber t1 = formal_left_derivative(
                formal_left_derivative(
                    e[static_cast<size_t>(r)] * (e[static_cast<size_t>(s)] * b.value), q),
                p);
            out += (0.25 * i_unit * v) * t1;
            GrassmannNumber t2 = formal_right_derivative(
                formal_right_derivative(
                    (b.value * h[static_cast<size_t>(p)]) * h[static_cast<size_t>(q)], M + r),
                M + s);
            out += (-0.25 * i_unit * v) * t2;
          }
  }
  return {std::move(out), b.modes};
}

std::vector<BFunction> propagate_b(const BFunction& b0, const ModelSpec& spec) {
  require_b(b0);
  if (spec.modes != b0.modes) throw std::invalid_argument("propagate_b: mode count mismatch");
  const int M = b0.modes;
  const int ncoef = 1 << (2 * M);
  auto space = b0.value.space();

  // linear generator on the monomial coefficients
  Matrix L = Matrix::Zero(ncoef, ncoef);
  for (int mask = 0; mask < ncoef; ++mask) {
    BFunction mono{GrassmannNumber::monomial(space, static_cast<std::uint32_t>(mask),
                                             Complex{1.0, 0.0}),
                   M};
    GrassmannNumber col = master_rhs(mono, spec).value;
    col.for_each_term([&](std::uint32_t m, Complex c) { L(m, mask) = c; });
  }

  using state_type = std::vector<double>;
  state_type y(2 * static_cast<size_t>(ncoef), 0.0);
  b0.value.for_each_term([&](std::uint32_t m, Complex c) {
    y[2 * m] = c.real();
    y[2 * m + 1] = c.imag();
  });

  auto rhs = [&](const state_type& x, state_type& dxdt, double) {
    Eigen::VectorXcd v(ncoef);
    for (int k = 0; k < ncoef; ++k) v(k) = Complex{x[2 * k], x[2 * k + 1]};
    Eigen::VectorXcd dv = L * v;
    for (int k = 0; k < ncoef; ++k) {
      dxdt[2 * k] = dv(k).real();
      dxdt[2 * k + 1] = dv(k).imag();
    }
  };

  std::vector<BFunction> out;
  out.reserve(spec.time_grid.size());
  auto record = [&](const state_type& x, double) {
    BFunction b = b_zero(M);
    for (int k = 0; k < ncoef; ++k) {
      Complex c{x[2 * k], x[2 * k + 1]};
      if (c != Complex{}) b.value.set_coefficient(static_cast<std::uint32_t>(k), c);
    }
    out.push_back(std::move(b));
  };

  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_controlled(1e-12, 1e-10, ode::runge_kutta_dopri5<state_type>());
  ode::integrate_times(stepper, rhs, y, spec.time_grid.begin(), spec.time_grid.end(), 1e-3,
                       record);
  if (out.size() != spec.time_grid.size())
    throw std::runtime_error("propagate_b: integrator did not visit every grid time");
  return out;
}

}  // namespace gbs
