#include "gbs/selftest.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

#include "gbs/brep.hpp"
#include "gbs/fock.hpp"
#include "gbs/rng.hpp"
#include "gbs/sde.hpp"

namespace gbs {

namespace {

GrassmannNumber random_number(const GeneratorSpace::Ptr& space, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  GrassmannNumber g(space);
  for (std::uint32_t m = 0; m < (std::uint32_t{1} << space->count()); ++m)
    g.set_coefficient(m, Complex{n01(rng), n01(rng)});
  return g;
}

ModelSpec hubbard_dimer(double t_hop, double u, double t_max = 0.0, int points = 1) {
  ModelSpec spec;
  spec.modes = 2;
  spec.hopping = Matrix::Zero(2, 2);
  spec.hopping(0, 1) = -t_hop;
  spec.hopping(1, 0) = -t_hop;
  spec.interaction.assign(16, Complex{});
  auto set = [&](int p, int q, int r, int s, double v) {
    spec.interaction[static_cast<size_t>(((p * 2 + q) * 2 + r) * 2 + s)] = v;
  };
  // V_pqrs = U eps_pq eps_rs gives the density-density term U n_1 n_2
  set(0, 1, 0, 1, u);
  set(0, 1, 1, 0, -u);
  set(1, 0, 0, 1, -u);
  set(1, 0, 1, 0, u);
  spec.initial_state = std::string("10");
  spec.time_grid = {0.0};
  for (int i = 1; i < points; ++i) spec.time_grid.push_back(t_max * i / (points - 1));
  return ModelSpec::validated(std::move(spec));
}

struct Runner {
  std::ostream& out;
  bool all_ok = true;
  void check(const char* name, const std::function<bool(std::string&)>& fn) {
    std::string detail;
    bool ok = false;
    try {
      ok = fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    out << (ok ? "[ok]   " : "[FAIL] ") << name;
    if (!detail.empty()) out << " — " << detail;
    out << "\n";
    all_ok = all_ok && ok;
  }
};

}  // namespace

bool run_validation(std::ostream& out) {
  Runner r{out};
  std::mt19937_64 rng(12345);

  r.check("algebra laws (associativity, distributivity, anticommutation)", [&](std::string& d) {
    auto space = GeneratorSpace::modes_only(4);
    double worst = 0.0;
    for (int it = 0; it < 200; ++it) {
      auto a = random_number(space, rng), b = random_number(space, rng),
           c = random_number(space, rng);
      worst = std::max(worst, distance((a * b) * c, a * (b * c)));
      worst = std::max(worst, distance(a * (b + c), a * b + a * c));
      auto ao = odd_part(a), bo = odd_part(b);
      worst = std::max(worst, norm(ao * bo + bo * ao));
      auto ae = even_part(a);
      worst = std::max(worst, distance(ae * b, b * ae));
    }
    d = "max residual " + std::to_string(worst);
    return worst < 1e-10;
  });

  r.check("conjugation is an antihomomorphism", [&](std::string& d) {
    auto space = GeneratorSpace::with_conjugates(3);
    double worst = 0.0;
    for (int it = 0; it < 100; ++it) {
      auto a = random_number(space, rng), b = random_number(space, rng);
      worst = std::max(worst, distance(conjugate(a * b), conjugate(b) * conjugate(a)));
      worst = std::max(worst, distance(conjugate(conjugate(a)), a));
    }
    d = "max residual " + std::to_string(worst);
    return worst < 1e-10;
  });

  r.check("Berezin convention pins", [&](std::string&) {
    auto space = GeneratorSpace::modes_only(2);
    auto e1e2 = GrassmannNumber::monomial(space, 0b11, Complex{1.0, 0.0});
    const int order_21[] = {1, 0};  // de2 de1
    const int order_12[] = {0, 1};  // de1 de2
    return berezin_integrate(e1e2, order_21).coefficient(0) == Complex{-1.0, 0.0} &&
           berezin_integrate(e1e2, order_12).coefficient(0) == Complex{1.0, 0.0};
  });

  r.check("norm: triangle inequality and definiteness", [&](std::string& d) {
    auto space = GeneratorSpace::modes_only(4);
    double worst = 0.0;
    for (int it = 0; it < 2000; ++it) {
      auto a = random_number(space, rng), b = random_number(space, rng);
      worst = std::max(worst, norm(a + b) - (norm(a) + norm(b)));
    }
    d = "max excess " + std::to_string(worst);
    return worst <= 1e-12;
  });

  r.check("canonical anticommutation relations (M=3)", [&](std::string& d) {
    FockSpace fs(3);
    double worst = 0.0;
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j) {
        Matrix ac = fs.annihilation(i) * fs.creation(j) + fs.creation(j) * fs.annihilation(i);
        Matrix expect = (i == j) ? fs.identity() : Matrix::Zero(8, 8);
        worst = std::max(worst, (ac - expect).norm());
        worst = std::max(worst, (fs.annihilation(i) * fs.annihilation(j) +
                                 fs.annihilation(j) * fs.annihilation(i))
                                    .norm());
      }
    d = "max residual " + std::to_string(worst);
    return worst == 0.0;
  });

  r.check("coherent eigenrelation a_j|e> = e_j|e> (M=3)", [&](std::string& d) {
    const int M = 3;
    auto space = GeneratorSpace::modes_only(M);
    std::vector<GrassmannNumber> e;
    for (int j = 0; j < M; ++j) e.push_back(GrassmannNumber::generator(space, j));
    auto ket = coherent_ket(e, M);
    double worst = 0.0;
    for (int j = 1; j <= M; ++j) {
      auto lhs = apply_annihilation(ket, j);
      for (int n = 0; n < (1 << M); ++n) {
        auto rhs = e[static_cast<size_t>(j - 1)] * ket.amplitudes[static_cast<size_t>(n)];
        worst = std::max(worst, distance(lhs.amplitudes[static_cast<size_t>(n)], rhs));
      }
    }
    d = "max residual " + std::to_string(worst);
    return worst == 0.0;
  });

  r.check("B round trip on random number-conserving states (M=2)", [&](std::string& d) {
    std::normal_distribution<double> n01;
    double worst = 0.0;
    for (int it = 0; it < 20; ++it) {
      Matrix rho = Matrix::Zero(4, 4);
      for (int n = 0; n < 4; ++n)
        for (int m = 0; m < 4; ++m)
          if (std::popcount(unsigned(n)) == std::popcount(unsigned(m)))
            rho(n, m) = Complex{n01(rng), n01(rng)};
      worst = std::max(worst, (rho_from_b(b_from_rho(rho, 2)) - rho).norm());
    }
    d = "max residual " + std::to_string(worst);
    return worst < 1e-12;
  });

  r.check("correspondence rules vs Fock products (M=2)", [&](std::string& d) {
    std::normal_distribution<double> n01;
    FockSpace fs(2);
    double worst = 0.0;
    for (int it = 0; it < 5; ++it) {
      Matrix rho(4, 4);
      for (int n = 0; n < 4; ++n)
        for (int m = 0; m < 4; ++m) rho(n, m) = Complex{n01(rng), n01(rng)};
      BFunction b = b_from_rho(rho, 2);
      for (int j = 1; j <= 2; ++j) {
        worst = std::max(
            worst, distance(b_from_rho(fs.annihilation(j) * rho, 2).value,
                            apply_correspondence(b, CorrespondenceSide::annihilate_left, j).value));
        worst = std::max(
            worst, distance(b_from_rho(fs.creation(j) * rho, 2).value,
                            apply_correspondence(b, CorrespondenceSide::create_left, j).value));
        worst = std::max(
            worst, distance(b_from_rho(rho * fs.annihilation(j), 2).value,
                            apply_correspondence(b, CorrespondenceSide::annihilate_right, j).value));
        worst = std::max(
            worst, distance(b_from_rho(rho * fs.creation(j), 2).value,
                            apply_correspondence(b, CorrespondenceSide::create_right, j).value));
      }
    }
    d = "max residual " + std::to_string(worst);
    return worst < 1e-11;
  });

  r.check("master equation matches the von Neumann commutator (M=2)", [&](std::string& d) {
    std::normal_distribution<double> n01;
    ModelSpec spec = hubbard_dimer(1.0, 0.7);
    Matrix h = build_hamiltonian(spec);
    double worst = 0.0;
    for (int it = 0; it < 3; ++it) {
      Matrix rho(4, 4);
      for (int n = 0; n < 4; ++n)
        for (int m = 0; m < 4; ++m) rho(n, m) = Complex{n01(rng), n01(rng)};
      BFunction b = b_from_rho(rho, 2);
      Matrix lhs = rho_from_b(master_rhs(b, spec));
      Matrix rhs = Complex{0.0, -1.0} * (h * rho - rho * h);
      worst = std::max(worst, (lhs - rhs).norm());
    }
    d = "max residual " + std::to_string(worst);
    return worst < 1e-11;
  });

  r.check("pair decomposition residual and Ito drift identity", [&](std::string& d) {
    ModelSpec spec = hubbard_dimer(1.0, 1.3);
    auto decomp = decompose_potential(spec);
    auto noises = noise_matrices(decomp);
    Matrix ito = ito_drift_matrix(drift_matrix(spec), noises);
    double drift_err = (ito - (Complex{0.0, -1.0} * spec.hopping)).norm();
    d = "residual " + std::to_string(decomp.reconstruction_residual) + ", drift err " +
        std::to_string(drift_err);
    return decomp.reconstruction_residual < 1e-12 && drift_err < 1e-12;
  });

  r.check("Wiener stream moments (2e5 draws)", [&](std::string& d) {
    const int n = 200000;
    GaussianStream gs(987);
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (int i = 0; i < n; ++i) {
      double x = gs.next();
      s1 += x;
      s2 += x * x;
      s4 += x * x * x * x;
    }
    double mean = s1 / n, var = s2 / n, kurt = s4 / n;
    bool ok = std::abs(mean) < 5.0 / std::sqrt(double(n)) && std::abs(var - 1.0) < 0.02 &&
              std::abs(kurt - 3.0) < 0.1;
    std::ostringstream os;
    os << "mean " << mean << ", var " << var << ", kurtosis " << kurt;
    d = os.str();
    return ok;
  });

  r.check("free SDE: deterministic and matches the Rabi law", [&](std::string& d) {
    ModelSpec spec = hubbard_dimer(1.0, 0.0, 1.0, 3);
    auto e1 = simulate_ensemble(spec, 3, 1e-3, Scheme::stratonovich_heun, 42);
    auto e2 = simulate_ensemble(spec, 3, 1e-3, Scheme::stratonovich_heun, 42);
    for (size_t k = 0; k < e1.trajectories.size(); ++k)
      for (size_t t = 0; t < e1.times.size(); ++t) {
        const auto& p1 = e1.trajectories[k][t];
        const auto& p2 = e2.trajectories[k][t];
        if (!p1.unprimed.cwiseEqual(p2.unprimed).all() ||
            !p1.primed.cwiseEqual(p2.primed).all())
          return false;
      }
    BFunction b0 = b_from_rho(initial_density(spec), 2);
    FockSpace fs(2);
    double worst = 0.0;
    for (size_t t = 0; t < e1.times.size(); ++t) {
      auto est = estimate_observable(e1, b0, fs.number_op(1), static_cast<int>(t));
      double expect = std::cos(e1.times[t]) * std::cos(e1.times[t]);
      worst = std::max(worst, std::abs(est.mean.real() - expect));
      worst = std::max(worst, std::abs(est.se));
    }
    d = "max error " + std::to_string(worst);
    return worst < 1e-6;
  });

  return r.all_ok;
}

}  // namespace gbs
